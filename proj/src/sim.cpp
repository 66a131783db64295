#include "lapdeconv/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "lapdeconv/errors.hpp"
#include "lapdeconv/parallel.hpp"

namespace lapdeconv {

namespace {

struct BuiltinParams {
  double a = 0.0;
  double b = 0.0;
  int r = 0;
};

BuiltinParams resolve_params(const std::string& name, const KernelParams& params) {
  BuiltinParams p;
  std::vector<std::string> allowed;
  if (name == "g1") {
    p = {5.0, 2.0, 4};
    allowed = {"a", "b"};
  } else if (name == "g2") {
    p = {5.0, 0.0, 1};
    allowed = {"a"};
  } else if (name == "g3") {
    p = {1.0, 2.0, 1};
    allowed = {"a", "b"};
  } else if (name == "g4" || name == "g5") {
    p = {1.0, 0.0, 3};
    allowed = {"a", "r"};
  } else {
    throw KernelSpecError("unknown builtin kernel '" + name + "' (expected g1..g5)");
  }
  for (const auto& [key, value] : params) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw KernelSpecError("builtin kernel " + name + " has no parameter '" + key + "'");
    }
    if (!std::isfinite(value)) throw KernelSpecError("parameter '" + key + "' is not finite");
    if (key == "a") p.a = value;
    if (key == "b") p.b = value;
    if (key == "r") {
      if (value < 1 || value != std::floor(value)) throw KernelSpecError("parameter r must be a positive integer");
      p.r = static_cast<int>(value);
    }
  }
  if (!(p.a > 0.0)) throw KernelSpecError("builtin kernel parameter a must be positive");
  return p;
}

std::vector<Complex> family_roots(const std::string& name) {
  std::vector<Complex> roots{{-4.0, 2.5}, {-4.0, -2.5}, {-0.75, 1.5}, {-0.75, -1.5}};
  if (name == "g5") {
    roots.emplace_back(-2.0, 2.0);
    roots.emplace_back(-2.0, -2.0);
  }
  return roots;
}

// rho_0..rho_k with P(s) = sum_j rho_j (s + a)^(k - j) = prod (s - s_l).
std::vector<double> family_rho(const std::string& name, double a) {
  const auto roots = family_roots(name);
  const Polynomial in_z = Polynomial::from_roots(roots).shifted(Complex(-a));
  const int k = in_z.degree();
  std::vector<double> rho(k + 1);
  for (int j = 0; j <= k; ++j) rho[j] = in_z[k - j].real();
  rho[0] = 1.0;
  return rho;
}

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

// Pairwise summation keeps the aggregate independent of completion order and
// accurate for long runs.
double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

RationalLaplaceKernel builtin_g(const std::string& name, const KernelParams& params) {
  const auto p = resolve_params(name, params);
  if (name == "g1") {
    // b^3 / ((s+a)^2 ((s+a)^2 + b^2))
    const std::vector<Complex> poles{-p.a, -p.a, {-p.a, p.b}, {-p.a, -p.b}};
    const auto den = Polynomial::from_roots(poles).real_coeffs();
    const std::vector<double> num{p.b * p.b * p.b};
    return RationalLaplaceKernel::from_rational(num, den, "g1");
  }
  if (name == "g2") {
    const std::vector<double> rho{1.0};
    return RationalLaplaceKernel::from_exp_poly(p.a, 1, rho, "g2");
  }
  if (name == "g3") {
    const std::vector<double> rho{1.0, p.b};
    return RationalLaplaceKernel::from_exp_poly(p.a, 1, rho, "g3");
  }
  const auto rho = family_rho(name, p.a);
  return RationalLaplaceKernel::from_exp_poly(p.a, p.r, rho, name);
}

RealFunction builtin_g_time(const std::string& name, const KernelParams& params) {
  const auto p = resolve_params(name, params);
  if (name == "g1") {
    return [a = p.a, b = p.b](double t) { return std::exp(-a * t) * (b * t - std::sin(b * t)); };
  }
  if (name == "g2") {
    return [a = p.a](double t) { return std::exp(-a * t); };
  }
  if (name == "g3") {
    return [a = p.a, b = p.b](double t) { return std::exp(-a * t) * (b * t + 1.0); };
  }
  const auto rho = family_rho(name, p.a);
  return [a = p.a, r = p.r, rho](double t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < rho.size(); ++j) {
      acc += rho[j] * std::pow(t, static_cast<double>(j)) / factorial(static_cast<int>(j) + r - 1);
    }
    return std::exp(-a * t) * std::pow(t, r - 1) * acc;
  };
}

RealFunction builtin_f(const std::string& name) {
  if (name == "f1") return [](double t) { return t * t * std::exp(-t); };
  if (name == "f2") {
    return [](double t) { return t <= 0.0 ? 1.0 : boost::math::gamma_q(2.0, t / 2.0); };
  }
  if (name == "f3") {
    return [](double t) { return t <= 0.0 ? 1.0 : boost::math::gamma_q(3.0, t / 0.75); };
  }
  throw KernelSpecError("unknown builtin target '" + name + "' (expected f1..f3)");
}

double nominal_sigma(const std::string& g_name) {
  if (g_name == "g1") return 0.001;
  if (g_name == "g2") return 0.1;
  if (g_name == "g3") return 0.01;
  if (g_name == "g4" || g_name == "g5") return 0.002;
  throw KernelSpecError("unknown builtin kernel '" + g_name + "' (expected g1..g5)");
}

std::vector<double> forward_convolve(const RealFunction& g, const RealFunction& f,
                                     std::span<const double> times, int refinement) {
  if (refinement < 1) throw InputError("refinement factor must be >= 1");
  // Quadrature nodes: t_0 = 0 and the observation times, each gap split evenly.
  std::vector<double> nodes{0.0};
  std::vector<std::size_t> node_of(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double from = nodes.back();
    const double gap = times[i] - from;
    if (gap > 0.0) {
      for (int s = 1; s <= refinement; ++s) nodes.push_back(s == refinement ? times[i] : from + gap * s / refinement);
    }
    node_of[i] = nodes.size() - 1;
  }

  std::vector<double> fv(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) fv[k] = f(nodes[k]);

  const double h = nodes.back() / static_cast<double>(nodes.size() - 1);
  bool uniform = true;
  for (std::size_t k = 0; k < nodes.size() && uniform; ++k) {
    uniform = std::abs(nodes[k] - static_cast<double>(k) * h) <= 1e-9 * std::max(1.0, nodes.back());
  }

  std::vector<double> q(times.size(), 0.0);
  if (uniform) {
    std::vector<double> gv(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) gv[k] = g(static_cast<double>(k) * h);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const std::size_t m = node_of[i];
      if (m == 0) continue;
      double acc = 0.5 * (gv[m] * fv[0] + gv[0] * fv[m]);
      for (std::size_t k = 1; k < m; ++k) acc += gv[m - k] * fv[k];
      q[i] = acc * h;
    }
    return q;
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    const std::size_t m = node_of[i];
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double w = nodes[k + 1] - nodes[k];
      acc += 0.5 * w * (g(times[i] - nodes[k]) * fv[k] + g(times[i] - nodes[k + 1]) * fv[k + 1]);
    }
    q[i] = acc;
  }
  return q;
}

std::vector<double> forward_convolve(const RationalLaplaceKernel& g, const RealFunction& f,
                                     std::span<const double> times, int refinement) {
  const ExpPoly time_domain = g.time_domain();
  return forward_convolve([&time_domain](double t) { return time_domain(t); }, f, times, refinement);
}

ReplicationRng::ReplicationRng(std::uint64_t seed, std::uint64_t run)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(run + 0x632BE59BD9B4E019ULL))) {}

double ReplicationRng::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double ReplicationRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

Scenario table_cell(const std::string& g_name, const std::string& f_name, std::size_t n,
                    int noise_index, std::size_t runs, std::uint64_t seed,
                    const EstimatorConfig& estimator) {
  builtin_f(f_name);  // validates the name
  Scenario sc;
  sc.g_name = g_name;
  sc.f_name = f_name;
  sc.n = n;
  sc.T = 10.0;
  sc.sigma = nominal_sigma(g_name) / std::pow(2.0, noise_index);
  sc.noise_index = noise_index;
  sc.runs = runs;
  sc.seed = seed;
  sc.estimator = estimator;
  return sc;
}

std::vector<Scenario> table_scenarios(std::size_t runs, std::uint64_t seed,
                                      const EstimatorConfig& estimator,
                                      const std::vector<std::size_t>& sizes) {
  std::vector<Scenario> out;
  for (std::size_t n : sizes) {
    for (const auto& g : builtin_g_names()) {
      for (const auto& f : builtin_f_names()) {
        for (int i = 0; i <= 4; ++i) out.push_back(table_cell(g, f, n, i, runs, seed, estimator));
      }
    }
  }
  return out;
}

std::vector<double> scenario_signal(const Scenario& sc) {
  std::vector<double> times(sc.n);
  for (std::size_t i = 0; i < sc.n; ++i) times[i] = sc.T * static_cast<double>(i + 1) / static_cast<double>(sc.n);
  return forward_convolve(builtin_g_time(sc.g_name), builtin_f(sc.f_name), times);
}

NoisySample simulate_sample(const Scenario& sc, std::span<const double> signal, std::size_t run) {
  std::vector<double> times(sc.n);
  std::vector<double> y(sc.n);
  ReplicationRng rng(sc.seed, run);
  for (std::size_t i = 0; i < sc.n; ++i) {
    times[i] = sc.T * static_cast<double>(i + 1) / static_cast<double>(sc.n);
    y[i] = signal[i] + sc.sigma * rng.normal();
  }
  return NoisySample(std::move(times), std::move(y), sc.T, sc.sigma);
}

std::pair<double, double> mean_and_std(std::span<const double> values) {
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  const double n = static_cast<double>(values.size());
  const double mean = pairwise_sum(values) / n;
  if (values.size() < 2) return {mean, 0.0};
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  return {mean, std::sqrt(pairwise_sum(sq) / (n - 1.0))};
}

ScenarioResult run_experiment(const Scenario& sc, unsigned threads) {
  if (sc.n < 10) throw InputError("scenario needs n >= 10");
  if (sc.runs < 1) throw InputError("scenario needs runs >= 1");
  if (!(sc.sigma > 0.0)) throw InputError("scenario needs sigma > 0");

  const auto g = builtin_g(sc.g_name);
  const auto decomposition = decompose(g);
  const auto truth = builtin_f(sc.f_name);
  const auto signal = scenario_signal(sc);

  ScenarioResult result;
  result.scenario = sc;
  result.run_mse.assign(sc.runs, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::vector<double>> chosen(sc.runs);
  std::vector<std::string> errors(sc.runs);

  parallel_for(sc.runs, threads ? threads : default_thread_count(), [&](std::size_t run) {
    try {
      const auto data = simulate_sample(sc, signal, run);
      const auto est = deconvolve(data, decomposition, sc.estimator);
      result.run_mse[run] = risk_mse(est, truth, sc.trim);
      chosen[run] = est.bandwidths;
    } catch (const EstimatorError& e) {
      errors[run] = e.what();
    }
  });

  std::vector<double> ok;
  result.bandwidth_counts.resize(decomposition.r + 1);
  for (std::size_t run = 0; run < sc.runs; ++run) {
    if (std::isnan(result.run_mse[run])) {
      ++result.failures;
      result.failure_messages.push_back("run " + std::to_string(run) + ": " + errors[run]);
      continue;
    }
    ok.push_back(result.run_mse[run]);
    for (std::size_t j = 0; j < chosen[run].size(); ++j) ++result.bandwidth_counts[j][chosen[run][j]];
  }
  result.completed = ok.size();
  std::tie(result.mean, result.std) = mean_and_std(ok);
  return result;
}

}  // namespace lapdeconv
