#pragma once

#include <algorithm>
#include <memory>
#include <span>
#include <vector>

namespace lapdeconv {

/// Polynomial smoothing kernel of order (L, j) on a compact support [lo, hi].
///
/// The kernel satisfies
///   int t^l K(t) dt = 0          for l in {0..L-1} \ {j}
///   int t^j K(t) dt = (-1)^j j!
/// and has double zeros at both support endpoints, so its extension by zero is
/// continuously differentiable. Interior kernels live on [-1, 1]; boundary
/// kernels on [-1, rho] (left edge) or, after reflection, on [-rho, 1].
class SmoothingKernel {
 public:
  /// `local` holds ascending coefficients in u = (t - c) / h, with c and h
  /// the centre and half-width of [lo, hi].
  SmoothingKernel(int order, int derivative, double lo, double hi,
                  std::vector<double> local);

  int order() const { return order_; }
  int derivative() const { return derivative_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  /// Monomial coefficients in t, ascending degree. Export only: for small
  /// rho these are large and cancel, so evaluation uses the centred form.
  std::span<const double> coeffs() const { return coeffs_; }
  /// Coefficients in the centred variable u = (t - centre) / half_width.
  std::span<const double> local_coeffs() const { return local_; }
  double centre() const { return centre_; }
  double half_width() const { return half_width_; }
  int degree() const { return static_cast<int>(local_.size()) - 1; }

  /// Polynomial value inside the support, exactly 0 outside.
  double operator()(double t) const {
    if (t < lo_ || t > hi_) return 0.0;
    const double u = (t - centre_) / half_width_;
    double acc = 0.0;
    for (auto it = local_.rbegin(); it != local_.rend(); ++it) acc = acc * u + *it;
    return acc;
  }

  /// int_lo^min(t, hi) K(s) ds; 0 below the support.
  double primitive(double t) const {
    if (t <= lo_) return 0.0;
    const double u = (std::min(t, hi_) - centre_) / half_width_;
    double acc = 0.0;
    for (auto it = primitive_.rbegin(); it != primitive_.rend(); ++it) acc = acc * u + *it;
    return half_width_ * (acc - primitive_at_lo_);
  }

  /// int_lo^hi t^l K(t) dt, exact for the stored polynomial.
  double moment(int l) const;
  /// int K(t)^2 dt, exact for the stored polynomial.
  double squared_norm() const;

 private:
  int order_;
  int derivative_;
  double lo_;
  double hi_;
  double centre_;
  double half_width_;
  std::vector<double> local_;
  std::vector<double> primitive_;  // antiderivative in u
  double primitive_at_lo_ = 0.0;
  std::vector<double> coeffs_;
};

/// Interior kernel of order (L, j) on [-1, 1].
SmoothingKernel make_kernel(int order, int derivative);

/// Boundary kernel of order (L, j) on [-1, rho], 0 < rho <= 1.
/// rho = 1 reproduces make_kernel(L, j) exactly.
SmoothingKernel make_boundary_kernel(int order, int derivative, double rho);

/// K~(t) = (-1)^j K(-t); maps a [-1, rho] kernel onto [-rho, 1] while
/// preserving the moment targets.
SmoothingKernel reflect(const SmoothingKernel& k);

inline double eval_kernel(const SmoothingKernel& k, double t) { return k(t); }

/// Process-wide memo of boundary/interior kernels keyed by (L, j, rho rounded
/// to 1e-6). Kernels are built at the rounded rho so lookups are
/// deterministic regardless of call order. Thread-safe.
class KernelCache {
 public:
  static KernelCache& instance();

  /// Kernel on [-1, rho] (or [-1, 1] for rho >= 1).
  std::shared_ptr<const SmoothingKernel> left(int order, int derivative, double rho);
  /// Reflected kernel on [-rho, 1].
  std::shared_ptr<const SmoothingKernel> right(int order, int derivative, double rho);

  /// Smallest rho handed out; points closer to the boundary use this value.
  static constexpr double kMinRho = 1e-6;

 private:
  KernelCache() = default;
  std::shared_ptr<const SmoothingKernel> get(int order, int derivative, double rho,
                                             bool reflected);
};

}  // namespace lapdeconv
