#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace lapdeconv {

/// Fixed-design observations y_i = q(t_i) + sigma * eps_i on [0, T].
class NoisySample {
 public:
  /// Validates sorted times within [0, T], n >= 2, finite values and sigma >= 0.
  /// Throws InputError otherwise.
  NoisySample(std::vector<double> times, std::vector<double> values, double T, double sigma);

  std::span<const double> times() const { return times_; }
  std::span<const double> values() const { return values_; }
  /// Quadrature weights t_i - t_{i-1} with t_0 = 0.
  std::span<const double> spacings() const { return spacings_; }
  std::size_t size() const { return times_.size(); }
  double T() const { return T_; }
  double sigma() const { return sigma_; }
  /// Design regularity: max_i (t_i - t_{i-1}) * n / T.
  double mu() const { return mu_; }
  double max_spacing() const { return max_spacing_; }

  NoisySample with_values(std::vector<double> values) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  std::vector<double> spacings_;
  double T_;
  double sigma_;
  double mu_ = 1.0;
  double max_spacing_ = 0.0;
};

/// Difference-based noise estimate sqrt(sum (y_i - y_{i-1})^2 / (2 (n - 1))).
/// Convenience only; the estimator treats sigma as known.
double estimate_sigma(std::span<const double> values);

/// `count` equispaced points on [0, T] including both endpoints.
std::vector<double> uniform_grid(double T, std::size_t count);

struct DerivativeEstimate {
  int j = 0;
  std::vector<double> grid;
  std::vector<double> values;
  double bandwidth = 0.0;
  int kernel_order = 0;
};

/// How observation i is weighted inside the smoothing sum.
enum class Weights {
  /// K_j((t - t_i) / lambda) (t_i - t_{i-1})
  kPriestleyChao,
  /// int over the cell [s_{i-1}, s_i] of K_j((t - u) / lambda) du, with
  /// s_i = (t_i + t_{i+1}) / 2, s_0 = 0, s_n = T. Removes most of the
  /// Riemann-sum error of high-order derivative kernels on sparse designs.
  kGasserMuller,
};

/// Kernel estimate of q^(j):
///   lambda^-(j+1) sum_i w_i(t) y_i,  w_i from `weights`
/// with boundary kernels within lambda of either end of [0, T].
/// Throws EstimatorError on an empty grid, lambda outside (0, T/2], or a
/// smoothing window that contains no observation.
DerivativeEstimate pc_estimate(const NoisySample& data, int j, int order, double lambda,
                               std::span<const double> grid,
                               Weights weights = Weights::kPriestleyChao);

struct LepskiConfig {
  /// Ratio of the geometric bandwidth grid a^-l.
  double a = 1.2;
  /// Threshold constant C_j. Unset ("auto"): C_j^2 = mu^2 ||K_j||^2 (1 + 1e-6)
  /// with interior_norm; otherwise the boundary strips are included,
  ///   C_j^2(h) = mu^2 (1 + 1e-6) ((T - 2h) ||K_j||^2 + 2h int_0^1 ||K_j,rho||^2 drho) / T.
  std::optional<double> c;
  /// Measure Lepski distances on [lambda_0, T - lambda_0] (lambda_0 the largest
  /// compared level) rather than on [0, T].
  bool interior_norm = true;
  /// Multiplier in front of C_j^2 sigma^2 T^2 / (n h^(2j+1)); 4 is the
  /// theoretical value, 3 the practical default.
  double threshold_mult = 3.0;
  /// Bandwidths below this many maximal design spacings are left out of the
  /// grid (the largest level is always kept). Below roughly 10-20 spacings the
  /// Riemann-sum error of the estimate outweighs its noise at small sigma.
  double min_window_spacings = 20.0;
  /// Weighting of the estimates being compared.
  Weights weights = Weights::kPriestleyChao;
};

struct BandwidthGrid {
  int j = 0;
  double a = 0.0;
  /// a^-l for l = 0..J_n, strictly decreasing.
  std::vector<double> levels;
};

/// Lambda_j with J_n = floor(log_a(n / (sigma^2 T^2)) / (2j + 1)). Throws
/// EstimatorError when sigma^2 T^2 >= n (adaptation impossible at this noise
/// level) or sigma <= 0.
BandwidthGrid make_bandwidth_grid(std::size_t n, double sigma, double T, int j, double a);

struct LepskiSelection {
  double bandwidth = 0.0;
  std::size_t index = 0;
  /// The levels actually compared (grid after the admissibility filter).
  std::vector<double> levels;
  /// C_j per level.
  std::vector<double> c;
};

/// Largest lambda in the grid such that for every smaller level h
///   ||q_lambda - q_h||^2 <= threshold_mult C_j^2 sigma^2 T^2 / (n h^(2j+1)),
/// with squared distances by trapezoid rule on max(4n, 2000) points over [0, T]
/// or, with cfg.interior_norm, over [lambda_0, T - lambda_0].
LepskiSelection lepski_select(const NoisySample& data, int j, int order,
                              const LepskiConfig& cfg);

/// The right-hand side of the Lepski test for level h.
double lepski_threshold(const NoisySample& data, int j, double h, double c,
                        const LepskiConfig& cfg);

/// C_j used at level h.
double lepski_constant(const NoisySample& data, int j, int order, double h,
                       const LepskiConfig& cfg);

/// int_0^1 ||K_j,rho||^2 drho over the boundary kernels of order (L, j).
double mean_boundary_squared_norm(int order, int j);

/// Squared L2([0, T]) distance of two curves on a uniform grid, trapezoid rule.
double squared_l2_distance(std::span<const double> a, std::span<const double> b, double T);

/// lepski_select followed by pc_estimate at the selected bandwidth.
DerivativeEstimate estimate_derivative(const NoisySample& data, int j, int order,
                                       const LepskiConfig& cfg, std::span<const double> grid);

}  // namespace lapdeconv
