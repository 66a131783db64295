#include "lapdeconv/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace lapdeconv {

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  trim();
}

Polynomial::Polynomial(std::initializer_list<double> coeffs)
    : Polynomial(std::vector<Complex>(coeffs.begin(), coeffs.end())) {}

Polynomial Polynomial::from_real(std::span<const double> coeffs) {
  return Polynomial(std::vector<Complex>(coeffs.begin(), coeffs.end()));
}

Polynomial Polynomial::monomial(int degree, Complex coeff) {
  std::vector<Complex> c(degree + 1, 0.0);
  c[degree] = coeff;
  return Polynomial(std::move(c));
}

Polynomial Polynomial::from_roots(std::span<const Complex> roots, Complex lead) {
  std::vector<Complex> c{lead};
  for (const Complex& z : roots) {
    std::vector<Complex> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= z * c[k];
    }
    c = std::move(next);
  }
  return Polynomial(std::move(c));
}

void Polynomial::trim() {
  double scale = 0.0;
  for (const auto& c : coeffs_) scale = std::max(scale, std::abs(c));
  while (coeffs_.size() > 1 && std::abs(coeffs_.back()) <= 1e-12 * scale) coeffs_.pop_back();
  if (coeffs_.size() == 1 && std::abs(coeffs_[0]) == 0.0) coeffs_[0] = 0.0;
}

Complex Polynomial::operator()(Complex s) const {
  Complex acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (degree() == 0) return Polynomial();
  std::vector<Complex> c(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) c[k - 1] = static_cast<double>(k) * coeffs_[k];
  return Polynomial(std::move(c));
}

Polynomial Polynomial::shifted(Complex center) const {
  // Repeated synthetic division (Taylor shift), O(n^2).
  std::vector<Complex> c = coeffs_;
  const std::size_t n = c.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t k = n - 1; k > i; --k) c[k - 1] += center * c[k];
  }
  Polynomial out;
  out.coeffs_ = std::move(c);
  return out;
}

double Polynomial::max_imag() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c.imag()));
  return m;
}

std::vector<double> Polynomial::real_coeffs() const {
  std::vector<double> out(coeffs_.size());
  std::transform(coeffs_.begin(), coeffs_.end(), out.begin(), [](Complex c) { return c.real(); });
  return out;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<Complex> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (std::size_t k = 0; k < a.coeffs_.size(); ++k) c[k] += a.coeffs_[k];
  for (std::size_t k = 0; k < b.coeffs_.size(); ++k) c[k] += b.coeffs_[k];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + Complex(-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  std::vector<Complex> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t k = 0; k < b.coeffs_.size(); ++k) c[i + k] += a.coeffs_[i] * b.coeffs_[k];
  }
  return Polynomial(std::move(c));
}

Polynomial operator*(Complex s, const Polynomial& a) {
  std::vector<Complex> c = a.coeffs_;
  for (auto& x : c) x *= s;
  return Polynomial(std::move(c));
}

std::vector<Root> find_roots(const Polynomial& p, double cluster_radius) {
  const int n = p.degree();
  if (n < 1) return {};

  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  const Complex lead = p.leading();
  // First row holds -c_{n-1} ... -c_0 of the monic polynomial.
  for (int k = 1; k < n; ++k) companion(k, k - 1) = 1.0;
  for (int k = 0; k < n; ++k) companion(0, k) = -p[n - 1 - k] / lead;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<Complex> raw(solver.eigenvalues().data(), solver.eigenvalues().data() + n);

  double scale = 1.0;
  for (const auto& z : raw) scale = std::max(scale, std::abs(z));
  const double radius = cluster_radius * scale;

  auto link = [](const std::vector<Complex>& pts, double r, std::vector<int>& label) {
    const int m = static_cast<int>(pts.size());
    label.assign(m, -1);
    int groups = 0;
    for (int i = 0; i < m; ++i) {
      if (label[i] >= 0) continue;
      label[i] = groups;
      std::vector<int> stack{i};
      while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        for (int k = 0; k < m; ++k) {
          if (label[k] < 0 && std::abs(pts[k] - pts[cur]) < r) {
            label[k] = groups;
            stack.push_back(k);
          }
        }
      }
      ++groups;
    }
    return groups;
  };

  // A root of multiplicity m is a simple root of p^(m-1).
  std::vector<Polynomial> derivs{p};
  for (int k = 1; k <= n; ++k) derivs.push_back(derivs.back().derivative());
  auto polish = [&](Complex z, int m) {
    const auto& f = derivs[m - 1];
    const auto& df = derivs[m];
    for (int it = 0; it < 8; ++it) {
      const Complex d = df(z);
      if (std::abs(d) == 0.0) break;
      const Complex next = z - f(z) / d;
      if (!(std::abs(f(next)) < std::abs(f(z)))) break;
      z = next;
    }
    return z;
  };
  // Taylor coefficients of p at z below order m at rounding level.
  auto is_multiple = [&](Complex z, int m) {
    const auto c = p.shifted(z);
    for (int k = 0; k < m; ++k) {
      double level = 0.0;
      double binom = 1.0;  // C(i, k), built up from i = k
      for (int i = k; i <= n; ++i) {
        if (i > k) binom = binom * i / (i - k);
        level += std::abs(p[i]) * binom * std::pow(std::abs(z), i - k);
      }
      if (std::abs(c[k]) > 1e3 * std::numeric_limits<double>::epsilon() * level) return false;
    }
    return true;
  };

  std::vector<int> label;
  const int clusters = link(raw, radius, label);
  std::vector<Root> fine(clusters);
  for (auto& r : fine) r.multiplicity = 0;
  for (int i = 0; i < n; ++i) {
    fine[label[i]].value += raw[i];
    fine[label[i]].multiplicity += 1;
  }
  for (auto& r : fine) r.value /= static_cast<double>(r.multiplicity);

  // Eigenvalues of an m-fold root scatter like eps^(1/m); merge wider groups
  // when p itself confirms the multiplicity.
  std::vector<Complex> centres;
  for (const auto& r : fine) centres.push_back(r.value);
  std::vector<int> group;
  const int groups = link(centres, 1e-2 * scale, group);
  std::vector<Root> roots;
  for (int g = 0; g < groups; ++g) {
    std::vector<Root> members;
    for (int i = 0; i < clusters; ++i) {
      if (group[i] == g) members.push_back(fine[i]);
    }
    if (members.size() > 1) {
      int m = 0;
      Complex z = 0.0;
      for (const auto& r : members) {
        z += static_cast<double>(r.multiplicity) * r.value;
        m += r.multiplicity;
      }
      z = polish(z / static_cast<double>(m), m);
      if (is_multiple(z, m)) {
        roots.push_back({z, m});
        continue;
      }
    }
    for (auto& r : members) {
      r.value = polish(r.value, r.multiplicity);
      roots.push_back(r);
    }
  }

  if (p.max_imag() == 0.0) {
    std::vector<bool> done(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (done[i]) continue;
      done[i] = true;
      if (std::abs(roots[i].value.imag()) <= radius) {
        roots[i].value.imag(0.0);
        continue;
      }
      std::size_t best = roots.size();
      double best_dist = 0.0;
      for (std::size_t k = 0; k < roots.size(); ++k) {
        if (done[k] || roots[k].multiplicity != roots[i].multiplicity) continue;
        const double dist = std::abs(roots[k].value - std::conj(roots[i].value));
        if (best == roots.size() || dist < best_dist) {
          best = k;
          best_dist = dist;
        }
      }
      if (best < roots.size()) {
        done[best] = true;
        const Complex mid = 0.5 * (roots[i].value + std::conj(roots[best].value));
        roots[i].value = mid;
        roots[best].value = std::conj(mid);
      }
    }
  }

  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return roots;
}

}  // namespace lapdeconv
