#include "lapdeconv/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lapdeconv/errors.hpp"

namespace lapdeconv {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

double coeff_scale(const Polynomial& p) {
  double s = 0.0;
  for (const auto& c : p.coeffs()) s = std::max(s, std::abs(c));
  return s;
}

std::string format_complex(Complex z) {
  std::ostringstream os;
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

double require_real(Complex z, double scale, const char* what) {
  if (std::abs(z.imag()) > 1e-8 * std::max(1.0, scale)) {
    throw std::runtime_error(std::string("non-real ") + what + " coefficient: " + format_complex(z));
  }
  return z.real();
}

void note_merged_roots(const std::vector<Root>& roots, std::vector<std::string>& warnings) {
  for (const auto& root : roots) {
    if (root.multiplicity > 1) {
      warnings.push_back("clustered roots near " + format_complex(root.value) +
                         " merged into a pole of multiplicity " + std::to_string(root.multiplicity));
    }
  }
}

}  // namespace

Complex ExpPoly::eval_complex(double x, int deriv) const {
  Complex total = 0.0;
  for (const auto& term : terms_) {
    const Complex e = std::exp(term.pole * x);
    Complex acc = 0.0;
    for (int j = 0; j < static_cast<int>(term.coeffs.size()); ++j) {
      // d^m [x^j e^{sx} / j!] = sum_i C(m,i) x^{j-i}/(j-i)! s^{m-i} e^{sx}
      Complex inner = 0.0;
      for (int i = 0; i <= std::min(deriv, j); ++i) {
        inner += binomial(deriv, i) * std::pow(x, j - i) / factorial(j - i) *
                 std::pow(term.pole, deriv - i);
      }
      acc += term.coeffs[j] * inner;
    }
    total += acc * e;
  }
  return total;
}

std::vector<PoleTerm> partial_fractions(const Polynomial& num, Complex lead,
                                        std::span<const Root> poles) {
  std::vector<PoleTerm> out;
  out.reserve(poles.size());
  for (std::size_t l = 0; l < poles.size(); ++l) {
    const Complex p = poles[l].value;
    const int alpha = poles[l].multiplicity;

    // rest(s) = lead * prod_{m != l} (s - p_m)^alpha_m
    std::vector<Complex> other;
    for (std::size_t m = 0; m < poles.size(); ++m) {
      if (m == l) continue;
      other.insert(other.end(), poles[m].multiplicity, poles[m].value);
    }
    const Polynomial rest = Polynomial::from_roots(other, lead).shifted(p);
    const Polynomial top = num.shifted(p);

    // Leading alpha Taylor coefficients of top / rest around p.
    std::vector<Complex> series(alpha, 0.0);
    for (int k = 0; k < alpha; ++k) {
      Complex acc = top[k];
      for (int i = 1; i <= k; ++i) acc -= rest[i] * series[k - i];
      series[k] = acc / rest[0];
    }

    PoleTerm term{p, alpha, std::vector<Complex>(alpha)};
    for (int j = 0; j < alpha; ++j) term.coeffs[j] = series[alpha - 1 - j];
    out.push_back(std::move(term));
  }
  return out;
}

RationalLaplaceKernel RationalLaplaceKernel::from_rational(std::span<const double> num,
                                                           std::span<const double> den,
                                                           std::string description) {
  return build(num, den, std::move(description), {});
}

RationalLaplaceKernel RationalLaplaceKernel::build(std::span<const double> num,
                                                   std::span<const double> den,
                                                   std::string description,
                                                   std::vector<Root> known_poles) {
  for (double c : num) {
    if (!std::isfinite(c)) throw KernelSpecError("kernel numerator has non-finite coefficients");
  }
  for (double c : den) {
    if (!std::isfinite(c)) throw KernelSpecError("kernel denominator has non-finite coefficients");
  }
  RationalLaplaceKernel g;
  g.num_ = Polynomial::from_real(num);
  g.den_ = Polynomial::from_real(den);
  g.description_ = std::move(description);
  if (g.num_.is_zero()) throw KernelSpecError("kernel numerator is identically zero");
  if (g.den_.is_zero()) throw KernelSpecError("kernel denominator is identically zero");
  g.r_ = g.den_.degree() - g.num_.degree();
  if (g.r_ < 1) {
    throw KernelSpecError("kernel transform must be strictly proper (deg den > deg num), got r = " +
                          std::to_string(g.r_));
  }
  g.b_r_ = (g.num_.leading() / g.den_.leading()).real();

  g.zeros_ = find_roots(g.num_);
  g.poles_ = known_poles.empty() ? find_roots(g.den_) : std::move(known_poles);
  const auto& poles = g.poles_;
  double scale = 1.0;
  for (const auto& z : g.zeros_) scale = std::max(scale, std::abs(z.value));
  for (const auto& p : poles) scale = std::max(scale, std::abs(p.value));
  for (const auto& z : g.zeros_) {
    for (const auto& p : poles) {
      if (std::abs(z.value - p.value) < 1e-8 * scale) {
        throw KernelSpecError("kernel numerator and denominator share the root " +
                              format_complex(z.value) + "; cancel it first");
      }
    }
  }
  note_merged_roots(g.zeros_, g.warnings_);
  for (const auto& z : g.zeros_) {
    if (z.value.real() >= 0.0) g.stable_ = false;
  }
  if (!g.stable_) {
    g.warnings_.push_back("g~ has a zero with non-negative real part; the resolvent is not integrable");
  }
  return g;
}

RationalLaplaceKernel RationalLaplaceKernel::from_exp_poly(double a, int r,
                                                           std::span<const double> rho,
                                                           std::string description) {
  if (!(a > 0.0) || !std::isfinite(a)) throw KernelSpecError("exp-poly kernel requires a > 0");
  if (r < 1) throw KernelSpecError("exp-poly kernel requires r >= 1");
  if (rho.empty() || rho[0] != 1.0) throw KernelSpecError("exp-poly kernel requires rho_0 = 1");
  const int k = static_cast<int>(rho.size()) - 1;

  // P(s) = sum_j rho_j z^{k-j} with z = s + a.
  std::vector<Complex> in_z(k + 1);
  for (int j = 0; j <= k; ++j) in_z[k - j] = rho[j];
  const Polynomial p_of_s = Polynomial(in_z).shifted(Complex(a));
  const std::vector<Complex> shift(k + r, Complex(-a));
  const Polynomial den = Polynomial::from_roots(shift);

  const auto num_real = p_of_s.real_coeffs();
  const auto den_real = den.real_coeffs();
  return build(num_real, den_real, std::move(description), {Root{Complex(-a), k + r}});
}

ExpPoly RationalLaplaceKernel::time_domain() const {
  return ExpPoly(partial_fractions(num_, den_.leading(), poles_));
}

RationalFunction phi_tilde(const RationalLaplaceKernel& g) {
  const Polynomial sr_num = Polynomial::monomial(g.r()) * g.num();
  std::vector<Complex> top = (sr_num - Complex(g.B()) * g.den()).coeffs();
  // The leading terms cancel by construction of B_r.
  if (static_cast<int>(top.size()) > g.den().degree()) top.resize(g.den().degree());
  Polynomial num(top);
  if (coeff_scale(num) <= 1e-14 * coeff_scale(sr_num)) {
    return {Polynomial(), Polynomial({1.0})};
  }

  // Cancel common powers of s.
  std::vector<Complex> n = num.coeffs();
  std::vector<Complex> d = sr_num.coeffs();
  while (n.size() > 1 && d.size() > 1 && n.front() == Complex(0.0) && d.front() == Complex(0.0)) {
    n.erase(n.begin());
    d.erase(d.begin());
  }
  return {Polynomial(n), Polynomial(d)};
}

double ResolventDecomposition::phi(double x) const {
  double acc = 0.0;
  for (int j = 0; j < static_cast<int>(a0.size()); ++j) acc += a0[j] * std::pow(x, j) / factorial(j);
  return acc + phi1()(x);
}

Complex ResolventDecomposition::transform(Complex s) const {
  Complex acc = 0.0;
  for (int j = 0; j < static_cast<int>(a0.size()); ++j) acc += a0[j] / std::pow(s, j + 1);
  for (const auto& term : poles) {
    for (int j = 0; j < term.multiplicity; ++j) acc += term.coeffs[j] / std::pow(s - term.pole, j + 1);
  }
  return acc;
}

std::vector<double> inversion_coefficients(std::span<const double> a0,
                                           std::span<const PoleTerm> poles, int r) {
  std::vector<double> b(r, 0.0);
  for (int j = 0; j < r; ++j) {
    Complex acc = j < static_cast<int>(a0.size()) ? a0[j] : 0.0;
    double scale = std::abs(acc);
    for (const auto& term : poles) {
      for (int i = 0; i <= std::min(j, term.multiplicity - 1); ++i) {
        const Complex piece = binomial(j, i) * term.coeffs[i] * std::pow(term.pole, j - i);
        scale = std::max(scale, std::abs(piece));
        acc += piece;
      }
    }
    b[j] = require_real(acc, scale, "b_j");
  }
  return b;
}

ResolventDecomposition decompose(const RationalLaplaceKernel& g, double cluster_radius) {
  ResolventDecomposition out;
  out.r = g.r();
  out.B = g.B();
  out.a0.assign(g.r(), 0.0);
  out.b.assign(g.r(), 0.0);

  const double num_scale = coeff_scale(g.num());
  if (std::abs(g.num()(0.0)) <= 1e-12 * num_scale) {
    throw KernelSpecError("g~ vanishes at s = 0; the resolvent has no polynomial-plus-integrable form");
  }

  const Polynomial sr_num = Polynomial::monomial(g.r()) * g.num();
  std::vector<Complex> top = (sr_num - Complex(g.B()) * g.den()).coeffs();
  if (static_cast<int>(top.size()) > g.den().degree()) top.resize(g.den().degree());
  const Polynomial numerator(top);
  if (coeff_scale(numerator) <= 1e-14 * coeff_scale(sr_num)) return out;

  auto zeros = cluster_radius == 1e-6 ? g.zeros() : find_roots(g.num(), cluster_radius);
  note_merged_roots(zeros, out.warnings);

  std::vector<Root> poles;
  poles.push_back({Complex(0.0), g.r()});
  poles.insert(poles.end(), zeros.begin(), zeros.end());

  auto terms = partial_fractions(numerator, g.num().leading(), poles);

  const double scale = std::max(1.0, coeff_scale(numerator) / std::abs(g.num().leading()));
  for (int j = 0; j < g.r(); ++j) out.a0[j] = require_real(terms[0].coeffs[j], scale, "a_0j");
  out.poles.assign(std::make_move_iterator(terms.begin() + 1), std::make_move_iterator(terms.end()));

  // Enforce exact conjugate symmetry between paired poles.
  for (auto& term : out.poles) {
    if (term.pole.imag() >= 0.0) continue;
    for (const auto& partner : out.poles) {
      if (partner.pole == std::conj(term.pole) && partner.multiplicity == term.multiplicity) {
        for (int j = 0; j < term.multiplicity; ++j) term.coeffs[j] = std::conj(partner.coeffs[j]);
      }
    }
  }
  for (auto& term : out.poles) {
    if (term.pole.imag() == 0.0) {
      for (auto& c : term.coeffs) c = Complex(require_real(c, scale, "real-pole"), 0.0);
    }
  }

  out.b = inversion_coefficients(out.a0, out.poles, g.r());
  return out;
}

double phi1_eval(const ResolventDecomposition& d, double x, int deriv) {
  if (d.poles.empty()) return 0.0;
  return d.phi1()(x, deriv);
}

Example2Coefficients example2_coefficients(double a, std::span<const double> rho, int r) {
  if (rho.empty() || rho[0] != 1.0) throw KernelSpecError("exp-poly family requires rho_0 = 1");
  if (r < 1) throw KernelSpecError("exp-poly family requires r >= 1");
  const int k = static_cast<int>(rho.size()) - 1;

  Example2Coefficients c;
  c.a = a;
  c.r = r;
  c.alpha.assign(r + 1, 0.0);
  c.alpha[r] = 1.0;
  for (int l = 1; l <= r; ++l) {
    double acc = 0.0;
    for (int j = std::max(0, l - k); j <= l - 1; ++j) acc += c.alpha[r - j] * rho[l - j];
    c.alpha[r - l] = -acc;
  }

  if (k == 0) return c;
  std::vector<Complex> in_z(k + 1);
  for (int j = 0; j <= k; ++j) in_z[k - j] = rho[j];
  const auto z_roots = find_roots(Polynomial(in_z));
  for (const auto& z : z_roots) {
    if (z.multiplicity > 1) {
      throw KernelSpecError("P(s) has a repeated root; use the general decomposition instead");
    }
    c.roots.push_back(z.value - a);
  }
  for (int l = 0; l < k; ++l) {
    Complex beta = std::pow(c.roots[l] + a, k + r);
    for (int j = 0; j < k; ++j) {
      if (j != l) beta /= (c.roots[l] - c.roots[j]);
    }
    c.beta.push_back(beta);
  }
  return c;
}

ResolventDecomposition decomposition_from_example2(const Example2Coefficients& c) {
  const int r = c.r;
  ResolventDecomposition out;
  out.r = r;
  out.B = 1.0;

  // q^(m) coefficient of the polynomial part is sum_{i>=m} C(i,m) a^(i-m) alpha_i,
  // and equals -b_{r-1-m} in the inversion formula.
  out.b.assign(r, 0.0);
  for (int j = 0; j < r; ++j) {
    const int m = r - 1 - j;
    double acc = 0.0;
    for (int i = m; i <= r; ++i) acc += binomial(i, m) * std::pow(c.a, i - m) * c.alpha[i];
    out.b[j] = -acc;
  }

  // phi1^(r)(x) = -sum_l beta_l e^{s_l x} with simple poles: a_{l,0} s_l^r = -beta_l.
  for (std::size_t l = 0; l < c.roots.size(); ++l) {
    out.poles.push_back({c.roots[l], 1, {-c.beta[l] / std::pow(c.roots[l], r)}});
  }

  out.a0.assign(r, 0.0);
  for (int j = 0; j < r; ++j) {
    Complex acc = out.b[j];
    for (const auto& term : out.poles) acc -= term.coeffs[0] * std::pow(term.pole, j);
    out.a0[j] = require_real(acc, std::max(1.0, std::abs(out.b[j])), "a_0j");
  }
  return out;
}

}  // namespace lapdeconv
