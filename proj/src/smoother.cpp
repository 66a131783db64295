#include "lapdeconv/smoother.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "lapdeconv/errors.hpp"
#include "lapdeconv/kernels.hpp"

namespace lapdeconv {

NoisySample::NoisySample(std::vector<double> times, std::vector<double> values, double T,
                         double sigma)
    : times_(std::move(times)), values_(std::move(values)), T_(T), sigma_(sigma) {
  if (times_.size() != values_.size()) {
    throw InputError("times and values differ in length (" + std::to_string(times_.size()) +
                     " vs " + std::to_string(values_.size()) + ")");
  }
  if (times_.size() < 2) throw InputError("at least 2 observations are required");
  if (!(T_ > 0.0) || !std::isfinite(T_)) throw InputError("interval length T must be positive");
  if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) throw InputError("sigma must be finite and >= 0");

  spacings_.resize(times_.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    const double t = times_[i];
    if (!std::isfinite(t) || !std::isfinite(values_[i])) {
      throw InputError("non-finite observation at row " + std::to_string(i + 1));
    }
    if (t < 0.0 || t > T_) {
      throw InputError("observation time " + std::to_string(t) + " outside [0, T]");
    }
    if (t < prev) throw InputError("observation times must be sorted ascending");
    spacings_[i] = t - prev;
    max_spacing_ = std::max(max_spacing_, spacings_[i]);
    prev = t;
  }
  mu_ = max_spacing_ * static_cast<double>(times_.size()) / T_;
}

NoisySample NoisySample::with_values(std::vector<double> values) const {
  NoisySample out = *this;
  if (values.size() != times_.size()) throw InputError("replacement values differ in length");
  out.values_ = std::move(values);
  return out;
}

double estimate_sigma(std::span<const double> values) {
  if (values.size() < 2) throw InputError("sigma estimate needs at least 2 values");
  double acc = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    acc += d * d;
  }
  return std::sqrt(acc / (2.0 * static_cast<double>(values.size() - 1)));
}

std::vector<double> uniform_grid(double T, std::size_t count) {
  if (count < 2) throw InputError("evaluation grid needs at least 2 points");
  std::vector<double> grid(count);
  const double step = T / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) grid[k] = static_cast<double>(k) * step;
  grid.back() = T;
  return grid;
}

DerivativeEstimate pc_estimate(const NoisySample& data, int j, int order, double lambda,
                               std::span<const double> grid, Weights weights) {
  if (grid.empty()) throw EstimatorError("pc_estimate: evaluation grid is empty");
  const double T = data.T();
  if (!(lambda > 0.0) || lambda > 0.5 * T) {
    throw EstimatorError("pc_estimate: bandwidth must lie in (0, T/2], got " + std::to_string(lambda));
  }

  auto& cache = KernelCache::instance();
  const auto interior = cache.left(order, j, 1.0);
  const auto times = data.times();
  const auto spacings = data.spacings();
  const auto y = data.values();
  const std::size_t n = times.size();
  std::vector<double> edges;
  if (weights == Weights::kGasserMuller) {
    edges.resize(n + 1);
    edges[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) edges[i] = 0.5 * (times[i - 1] + times[i]);
    edges[n] = T;
  }
  const double scale = std::pow(lambda, -(j + 1));

  DerivativeEstimate out;
  out.j = j;
  out.grid.assign(grid.begin(), grid.end());
  out.values.resize(grid.size());
  out.bandwidth = lambda;
  out.kernel_order = order;

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    std::shared_ptr<const SmoothingKernel> edge;
    const SmoothingKernel* kernel = interior.get();
    if (t < lambda) {
      edge = cache.left(order, j, t / lambda);
      kernel = edge.get();
    } else if (T - t < lambda) {
      edge = cache.right(order, j, (T - t) / lambda);
      kernel = edge.get();
    }

    // u = (t - t_i) / lambda in [lo, hi]  <=>  t_i in [t - hi lambda, t - lo lambda]
    const auto first = std::lower_bound(times.begin(), times.end(), t - kernel->hi() * lambda);
    const auto last = std::upper_bound(first, times.end(), t - kernel->lo() * lambda);
    if (first == last) {
      std::ostringstream msg;
      msg << "pc_estimate: no observation within the smoothing window at t = " << t
          << " (bandwidth " << lambda << " too small for the design)";
      throw EstimatorError(msg.str());
    }
    double acc = 0.0;
    if (weights == Weights::kPriestleyChao) {
      for (auto it = first; it != last; ++it) {
        const auto i = static_cast<std::size_t>(it - times.begin());
        acc += (*kernel)((t - times[i]) / lambda) * spacings[i] * y[i];
      }
    } else {
      // cells overlapping the support, [s_i, s_{i+1}] for observation i
      const double lo = t - kernel->hi() * lambda;
      const double hi = t - kernel->lo() * lambda;
      auto i = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), lo) - edges.begin());
      i = i == 0 ? 0 : i - 1;
      for (; i < n && edges[i] < hi; ++i) {
        const double w = kernel->primitive((t - edges[i]) / lambda) - kernel->primitive((t - edges[i + 1]) / lambda);
        acc += lambda * w * y[i];
      }
    }
    out.values[k] = scale * acc;
  }
  return out;
}

BandwidthGrid make_bandwidth_grid(std::size_t n, double sigma, double T, int j, double a) {
  if (!(a > 1.0)) throw EstimatorError("bandwidth grid ratio a must exceed 1");
  if (!(sigma > 0.0)) {
    throw EstimatorError("Lepski selection needs sigma > 0; supply fixed bandwidths for noiseless data");
  }
  const double ratio = static_cast<double>(n) / (sigma * sigma * T * T);
  if (ratio <= 1.0) {
    std::ostringstream msg;
    msg << "bandwidth grid is empty: sigma^2 T^2 = " << sigma * sigma * T * T << " >= n = " << n
        << "; adaptation is impossible at this noise level";
    throw EstimatorError(msg.str());
  }
  const double top = std::log(ratio) / std::log(a) / (2.0 * j + 1.0);
  const int levels = std::max(0, static_cast<int>(std::floor(top)));
  BandwidthGrid grid{j, a, {}};
  grid.levels.reserve(levels + 1);
  for (int l = 0; l <= levels; ++l) grid.levels.push_back(std::pow(a, -l));
  return grid;
}

double squared_l2_distance(std::span<const double> a, std::span<const double> b, double T) {
  const std::size_t m = a.size();
  const double h = T / static_cast<double>(m - 1);
  double acc = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double d = a[k] - b[k];
    acc += (k == 0 || k + 1 == m ? 0.5 : 1.0) * d * d;
  }
  return acc * h;
}

double mean_boundary_squared_norm(int order, int j) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, double> memo;
  std::lock_guard lock(mutex);
  const auto key = std::make_pair(order, j);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const double value = boost::math::quadrature::gauss<double, 30>::integrate(
      [&](double rho) { return static_cast<double>(make_boundary_kernel(order, j, rho).squared_norm()); },
      0.0, 1.0);
  memo.emplace(key, value);
  return value;
}

double lepski_constant(const NoisySample& data, int j, int order, double h,
                       const LepskiConfig& cfg) {
  if (cfg.c) return *cfg.c;
  const double interior = KernelCache::instance().left(order, j, 1.0)->squared_norm();
  const double T = data.T();
  const double edge = cfg.interior_norm ? 0.0 : std::min(2.0 * h, T);
  const double norm2 = ((T - edge) * interior + edge * mean_boundary_squared_norm(order, j)) / T;
  return std::sqrt(data.mu() * data.mu() * norm2 * (1.0 + 1e-6));
}

double lepski_threshold(const NoisySample& data, int j, double h, double c, const LepskiConfig& cfg) {
  const double s = data.sigma();
  const double T = data.T();
  return cfg.threshold_mult * c * c * s * s * T * T /
         (static_cast<double>(data.size()) * std::pow(h, 2 * j + 1));
}

LepskiSelection lepski_select(const NoisySample& data, int j, int order, const LepskiConfig& cfg) {
  const auto full = make_bandwidth_grid(data.size(), data.sigma(), data.T(), j, cfg.a);
  LepskiSelection sel;
  std::vector<double> capped;
  for (double level : full.levels) {
    if (level <= 0.5 * data.T()) capped.push_back(level);
  }
  // The floor never removes the largest level, the least discretization-prone one.
  const double floor = capped.empty()
                           ? 0.0
                           : std::min(cfg.min_window_spacings * data.max_spacing(), capped.front());
  for (double level : capped) {
    if (level >= floor) sel.levels.push_back(level);
  }
  if (sel.levels.empty()) {
    throw EstimatorError("no admissible bandwidth for derivative order " + std::to_string(j) +
                         ": every grid level exceeds T/2");
  }
  for (double level : sel.levels) sel.c.push_back(lepski_constant(data, j, order, level, cfg));

  const double margin = cfg.interior_norm ? std::min(sel.levels.front(), 0.25 * data.T()) : 0.0;
  const double span = data.T() - 2.0 * margin;
  auto dense = uniform_grid(span, std::max<std::size_t>(4 * data.size(), 2000));
  for (double& t : dense) t += margin;
  std::vector<std::vector<double>> curves;
  curves.reserve(sel.levels.size());
  for (double level : sel.levels) curves.push_back(pc_estimate(data, j, order, level, dense, cfg.weights).values);

  // Levels are decreasing, so the first passing index is the largest bandwidth.
  // The smallest level passes vacuously.
  const std::size_t m = sel.levels.size();
  sel.index = m - 1;
  for (std::size_t cand = 0; cand < m; ++cand) {
    bool ok = true;
    for (std::size_t h = cand + 1; h < m && ok; ++h) {
      const double dist = squared_l2_distance(curves[cand], curves[h], span);
      ok = dist <= lepski_threshold(data, j, sel.levels[h], sel.c[h], cfg);
    }
    if (ok) {
      sel.index = cand;
      break;
    }
  }
  sel.bandwidth = sel.levels[sel.index];
  return sel;
}

DerivativeEstimate estimate_derivative(const NoisySample& data, int j, int order,
                                       const LepskiConfig& cfg, std::span<const double> grid) {
  const auto sel = lepski_select(data, j, order, cfg);
  return pc_estimate(data, j, order, sel.bandwidth, grid, cfg.weights);
}

}  // namespace lapdeconv
