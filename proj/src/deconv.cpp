#include "lapdeconv/deconv.hpp"

#include <cmath>
#include <string>

#include "lapdeconv/errors.hpp"

namespace lapdeconv {

DeconvolutionResult deconvolve(const NoisySample& data, const RationalLaplaceKernel& g,
                               const EstimatorConfig& cfg) {
  return deconvolve(data, decompose(g), cfg);
}

DeconvolutionResult deconvolve(const NoisySample& data, const ResolventDecomposition& d,
                               const EstimatorConfig& cfg) {
  const int r = d.r;
  if (cfg.order <= r) {
    throw KernelSpecError("smoothing kernel order L = " + std::to_string(cfg.order) +
                          " must exceed r = " + std::to_string(r));
  }
  if (!cfg.fixed_bandwidths.empty() && cfg.fixed_bandwidths.size() != 1 &&
      cfg.fixed_bandwidths.size() != static_cast<std::size_t>(r + 1)) {
    throw InputError("expected 1 or r + 1 = " + std::to_string(r + 1) + " fixed bandwidths");
  }

  DeconvolutionResult out;
  out.r = r;
  out.B = d.B;
  out.config = cfg;
  out.grid = uniform_grid(data.T(), cfg.grid_size);
  const std::size_t G = out.grid.size();

  std::vector<std::vector<double>> q(r + 1);
  out.bandwidths.resize(r + 1);
  for (int j = 0; j <= r; ++j) {
    double lambda;
    if (cfg.fixed_bandwidths.empty()) {
      lambda = lepski_select(data, j, cfg.order, cfg.lepski).bandwidth;
    } else {
      lambda = cfg.fixed_bandwidths.size() == 1 ? cfg.fixed_bandwidths[0] : cfg.fixed_bandwidths[j];
    }
    out.bandwidths[j] = lambda;
    q[j] = pc_estimate(data, j, cfg.order, lambda, out.grid, cfg.lepski.weights).values;
  }

  auto& terms = out.terms;
  terms.derivative = q[r];
  terms.combination.assign(G, 0.0);
  for (int j = 0; j < r; ++j) {
    for (std::size_t k = 0; k < G; ++k) terms.combination[k] += d.b[j] * q[r - 1 - j][k];
  }

  terms.integral.assign(G, 0.0);
  if (!d.poles.empty()) {
    const ExpPoly phi1 = d.phi1();
    const double h = out.grid[1] - out.grid[0];
    std::vector<double> kernel(G);
    std::vector<double> kernel_d(G);
    for (std::size_t m = 0; m < G; ++m) {
      kernel[m] = phi1(out.grid[m], r);
      kernel_d[m] = phi1(out.grid[m], r + 1);
    }
    const auto& q0 = q[0];
    const auto& q1 = q[1];
    // Trapezoid plus the h^2/12 Euler-Maclaurin end correction for
    // F(x) = q(t - x) phi(x); phi^(r) is often large and fast near 0.
    for (std::size_t k = 1; k < G; ++k) {
      double acc = 0.5 * (q0[k] * kernel[0] + q0[0] * kernel[k]);
      for (std::size_t m = 1; m < k; ++m) acc += q0[k - m] * kernel[m];
      const double slope_end = -q1[0] * kernel[k] + q0[0] * kernel_d[k];
      const double slope_start = -q1[k] * kernel[0] + q0[k] * kernel_d[0];
      terms.integral[k] = acc * h - h * h / 12.0 * (slope_end - slope_start);
    }
  }

  out.f_hat.resize(G);
  for (std::size_t k = 0; k < G; ++k) {
    out.f_hat[k] = (terms.derivative[k] - terms.combination[k] - terms.integral[k]) / d.B;
  }
  return out;
}

double risk_mse(const DeconvolutionResult& result, const std::function<double(double)>& truth,
                double trim) {
  if (!(trim >= 0.0) || trim >= 0.5) throw InputError("trim must lie in [0, 0.5)");
  const double T = result.grid.back();
  const double lo = trim * T;
  const double hi = (1.0 - trim) * T;
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < result.grid.size(); ++k) {
    const double t = result.grid[k];
    if (t < lo || t > hi) continue;
    const double e = result.f_hat[k] - truth(t);
    acc += e * e;
    ++count;
  }
  return count ? acc / static_cast<double>(count) : 0.0;
}

}  // namespace lapdeconv
