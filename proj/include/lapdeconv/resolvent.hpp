#pragma once

#include <span>
#include <string>
#include <vector>

#include "lapdeconv/polynomial.hpp"

namespace lapdeconv {

/// One pole of a partial-fraction expansion: sum_j coeffs[j] / (s - pole)^(j+1),
/// whose inverse Laplace transform is sum_j coeffs[j] x^j e^(pole x) / j!.
struct PoleTerm {
  Complex pole;
  int multiplicity = 1;
  std::vector<Complex> coeffs;
};

/// Exponential polynomial sum_l sum_j c_{l,j} x^j e^(s_l x) / j! with closed-form
/// derivatives of any order.
class ExpPoly {
 public:
  ExpPoly() = default;
  explicit ExpPoly(std::vector<PoleTerm> terms) : terms_(std::move(terms)) {}

  const std::vector<PoleTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  Complex eval_complex(double x, int deriv = 0) const;
  /// Real part; the imaginary residue of conjugate-symmetric inputs is dropped.
  double operator()(double x, int deriv = 0) const { return eval_complex(x, deriv).real(); }

 private:
  std::vector<PoleTerm> terms_;
};

/// Partial fractions of num(s) / (lead * prod_l (s - p_l)^alpha_l) for a strictly
/// proper ratio. Coefficients come from a local Taylor expansion at each pole.
std::vector<PoleTerm> partial_fractions(const Polynomial& num, Complex lead,
                                        std::span<const Root> poles);

/// Convolution kernel g given by its rational Laplace transform num/den.
/// r = deg(den) - deg(num) and B_r = lc(num)/lc(den), i.e. g^(r-1)(0) = B_r.
class RationalLaplaceKernel {
 public:
  /// Throws KernelSpecError if den is zero, the ratio is not strictly proper,
  /// coefficients are non-finite or num and den share a root.
  static RationalLaplaceKernel from_rational(std::span<const double> num,
                                             std::span<const double> den,
                                             std::string description = "rational");
  /// g(t) = e^(-a t) t^(r-1) sum_j rho_j t^j / (j + r - 1)!, rho_0 = 1, whose
  /// transform is P(s) / (s + a)^(k + r) with P(s) = sum_j rho_j (s + a)^(k - j).
  static RationalLaplaceKernel from_exp_poly(double a, int r, std::span<const double> rho,
                                             std::string description = "exp-poly");

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  int r() const { return r_; }
  double B() const { return b_r_; }
  const std::string& description() const { return description_; }
  /// All zeros of g~ have negative real part. Violation is allowed; the
  /// resolvent then grows exponentially.
  bool stable() const { return stable_; }
  const std::vector<Root>& zeros() const { return zeros_; }
  /// Roots of den with multiplicities.
  const std::vector<Root>& poles() const { return poles_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  Complex transform(Complex s) const { return num_(s) / den_(s); }
  /// Inverse Laplace transform g(t) as an exponential polynomial.
  ExpPoly time_domain() const;

 private:
  RationalLaplaceKernel() = default;
  static RationalLaplaceKernel build(std::span<const double> num, std::span<const double> den,
                                     std::string description, std::vector<Root> known_poles);
  Polynomial num_;
  Polynomial den_;
  int r_ = 0;
  double b_r_ = 0.0;
  std::string description_;
  bool stable_ = true;
  std::vector<Root> zeros_;
  std::vector<Root> poles_;
  std::vector<std::string> warnings_;
};

struct RationalFunction {
  Polynomial num;
  Polynomial den;
  Complex operator()(Complex s) const { return num(s) / den(s); }
};

/// phi~(s) = (s^r g~(s) - B_r) / (s^r g~(s)), returned as a reduced proper
/// ratio (common powers of s cancelled); num is the zero polynomial when g~ = B_r / s^r.
RationalFunction phi_tilde(const RationalLaplaceKernel& g);

/// Resolvent phi = phi0 + phi1 of g^(r):
///   phi0(t) = sum_{j<r} a0[j] t^j / j!
///   phi1(x) = sum_l sum_j a_{l,j} x^j e^(s_l x) / j!
/// together with the coefficients b_j of the explicit inversion formula
///   f = B_r^{-1} (q^(r) - sum_j b_j q^(r-1-j) - q * phi1^(r)).
struct ResolventDecomposition {
  int r = 0;
  double B = 0.0;
  std::vector<double> a0;
  std::vector<PoleTerm> poles;
  std::vector<double> b;
  std::vector<std::string> warnings;

  ExpPoly phi1() const { return ExpPoly(poles); }
  /// phi0 + phi1 at x.
  double phi(double x) const;
  /// Laplace transform rebuilt from the partial fractions.
  Complex transform(Complex s) const;
};

/// Throws KernelSpecError when g~ vanishes at s = 0.
ResolventDecomposition decompose(const RationalLaplaceKernel& g, double cluster_radius = 1e-6);

/// d^deriv/dx^deriv phi1(x) in closed form.
double phi1_eval(const ResolventDecomposition& d, double x, int deriv);

/// b_j = a0[j] + sum_l sum_{i <= min(j, alpha_l - 1)} C(j, i) a_{l,i} s_l^(j - i)
std::vector<double> inversion_coefficients(std::span<const double> a0,
                                           std::span<const PoleTerm> poles, int r);

/// Closed-form coefficients of the exp-poly kernel family: 1/g~(s) =
/// sum_j alpha_j (s + a)^j + sum_l beta_l / (s - s_l).
struct Example2Coefficients {
  double a = 0.0;
  int r = 0;
  std::vector<double> alpha;  // alpha_0 .. alpha_r
  std::vector<Complex> beta;  // beta_1 .. beta_k
  std::vector<Complex> roots; // s_1 .. s_k
};

/// Throws KernelSpecError if rho_0 != 1 or P has repeated roots.
Example2Coefficients example2_coefficients(double a, std::span<const double> rho, int r);

/// Converts the closed-form family coefficients into a ResolventDecomposition
/// (B_r = 1, simple poles), independently of decompose().
ResolventDecomposition decomposition_from_example2(const Example2Coefficients& c);

}  // namespace lapdeconv
