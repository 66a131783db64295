#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lapdeconv/deconv.hpp"
#include "lapdeconv/resolvent.hpp"

namespace lapdeconv {

using RealFunction = std::function<double(double)>;
using KernelParams = std::map<std::string, double>;

/// Builtin convolution kernels g1..g5 in rational Laplace form.
///   g1: b^3 / ((s+a)^2 ((s+a)^2 + b^2)),  a = 5, b = 2
///   g2: 1 / (s + a),                      a = 5
///   g3: (s + a + b) / (s + a)^2,          a = 1, b = 2
///   g4: P(s) / (s + a)^(k + r), P with roots -4 +- 2.5i, -0.75 +- 1.5i; a = 1, r = 3
///   g5: as g4 with the extra roots -2 +- 2i
/// `params` overrides a, b (g1..g3) or a, r (g4, g5). Throws KernelSpecError
/// for unknown names or parameters.
RationalLaplaceKernel builtin_g(const std::string& name, const KernelParams& params = {});

/// Closed-form time-domain g for the builtins.
RealFunction builtin_g_time(const std::string& name, const KernelParams& params = {});

/// Targets f1(t) = t^2 e^-t, f2 = 1 - Gamma_{2,2}(t), f3 = 1 - Gamma_{3,0.75}(t)
/// (Gamma_{shape,scale} the gamma c.d.f.).
RealFunction builtin_f(const std::string& name);

/// sigma_0(g) of the benchmark noise ladder sigma_0 / 2^i.
double nominal_sigma(const std::string& g_name);

inline const std::vector<std::string>& builtin_g_names() {
  static const std::vector<std::string> names{"g1", "g2", "g3", "g4", "g5"};
  return names;
}
inline const std::vector<std::string>& builtin_f_names() {
  static const std::vector<std::string> names{"f1", "f2", "f3"};
  return names;
}

/// q(t_i) = int_0^t_i g(t_i - tau) f(tau) dtau by composite trapezoid on the
/// observation grid (with t_0 = 0) refined `refinement` times.
std::vector<double> forward_convolve(const RealFunction& g, const RealFunction& f,
                                     std::span<const double> times, int refinement = 8);
std::vector<double> forward_convolve(const RationalLaplaceKernel& g, const RealFunction& f,
                                     std::span<const double> times, int refinement = 8);

/// Per-replication normal stream keyed by (seed, run): reproducible across
/// platforms and independent of execution order.
class ReplicationRng {
 public:
  ReplicationRng(std::uint64_t seed, std::uint64_t run);
  double uniform();  // in (0, 1)
  double normal();   // Marsaglia polar method

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct Scenario {
  std::string g_name = "g2";
  std::string f_name = "f1";
  std::size_t n = 100;
  double T = 10.0;
  double sigma = 0.1;
  /// Position on the noise ladder (reporting only).
  int noise_index = 0;
  std::size_t runs = 400;
  std::uint64_t seed = 1;
  EstimatorConfig estimator;
  double trim = 0.1;
};

/// Scenario for Table-style cell (g, f, n, i): sigma = sigma_0(g) / 2^i.
Scenario table_cell(const std::string& g_name, const std::string& f_name, std::size_t n,
                    int noise_index, std::size_t runs, std::uint64_t seed,
                    const EstimatorConfig& estimator = {});

/// All 5 g x 3 f x 5 noise levels x given sample sizes.
std::vector<Scenario> table_scenarios(std::size_t runs, std::uint64_t seed,
                                      const EstimatorConfig& estimator = {},
                                      const std::vector<std::size_t>& sizes = {100, 250});

struct ScenarioResult {
  Scenario scenario;
  double mean = 0.0;
  double std = 0.0;
  std::size_t completed = 0;
  std::size_t failures = 0;
  /// NaN for failed replications.
  std::vector<double> run_mse;
  /// bandwidth_counts[j][lambda] = number of runs that selected lambda for q^(j).
  std::vector<std::map<double, std::size_t>> bandwidth_counts;
  std::vector<std::string> failure_messages;
};

/// Noise-free q on the design t_i = i T / n.
std::vector<double> scenario_signal(const Scenario& sc);

/// Observations of replication `run`: y_i = q(t_i) + sigma eps_i.
NoisySample simulate_sample(const Scenario& sc, std::span<const double> signal, std::size_t run);

/// Runs all replications (concurrently, up to `threads` workers; 0 = default)
/// and aggregates deterministically.
ScenarioResult run_experiment(const Scenario& sc, unsigned threads = 0);

/// Mean and sample standard deviation by pairwise summation.
std::pair<double, double> mean_and_std(std::span<const double> values);

}  // namespace lapdeconv
