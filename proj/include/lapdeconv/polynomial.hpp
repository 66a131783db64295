#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace lapdeconv {

using Complex = std::complex<double>;

/// Dense polynomial with complex coefficients in ascending degree.
/// Trailing coefficients below 1e-12 relative to the largest are trimmed.
class Polynomial {
 public:
  Polynomial() : coeffs_{Complex(0.0)} {}
  explicit Polynomial(std::vector<Complex> coeffs);
  Polynomial(std::initializer_list<double> coeffs);
  static Polynomial from_real(std::span<const double> coeffs);
  static Polynomial monomial(int degree, Complex coeff = 1.0);
  /// lead * prod (s - roots[i])
  static Polynomial from_roots(std::span<const Complex> roots, Complex lead = 1.0);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == Complex(0.0); }
  const std::vector<Complex>& coeffs() const { return coeffs_; }
  Complex operator[](int k) const { return k <= degree() ? coeffs_[k] : Complex(0.0); }
  Complex leading() const { return coeffs_.back(); }

  Complex operator()(Complex s) const;
  Polynomial derivative() const;
  /// Coefficients of p(center + h) as a polynomial in h.
  Polynomial shifted(Complex center) const;
  /// Largest |imag| over the coefficients.
  double max_imag() const;
  std::vector<double> real_coeffs() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Complex c, const Polynomial& a);

 private:
  void trim();
  std::vector<Complex> coeffs_;
};

/// A root together with its detected multiplicity.
struct Root {
  Complex value;
  int multiplicity = 1;
};

/// Roots of p via companion-matrix eigenvalues. Eigenvalues closer than
/// `cluster_radius` (relative to the root scale) merge into one root of higher
/// multiplicity; groups up to 1e-2 apart merge as well when the Taylor
/// coefficients of p below that order vanish to rounding at the group centre.
/// Each root of multiplicity m is Newton-polished on p^(m-1). For polynomials
/// with real coefficients the output is made exactly conjugate-symmetric, with
/// real roots listed with zero imaginary part. Sorted by (real, imag).
std::vector<Root> find_roots(const Polynomial& p, double cluster_radius = 1e-6);

}  // namespace lapdeconv
