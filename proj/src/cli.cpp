#include "lapdeconv/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lapdeconv/deconv.hpp"
#include "lapdeconv/errors.hpp"
#include "lapdeconv/io.hpp"
#include "lapdeconv/kernel_spec.hpp"
#include "lapdeconv/kernels.hpp"
#include "lapdeconv/parallel.hpp"
#include "lapdeconv/sim.hpp"

namespace lapdeconv {

namespace {

struct EstimatorFlags {
  int order = 8;
  double a = 1.2;
  std::string c = "auto";
  double threshold_mult = 3.0;
  double min_window_spacings = 20.0;
  bool full_interval_norm = false;
  std::size_t grid_size = 1024;
  std::vector<double> bandwidths;
  std::string weights = "pc";

  void attach(CLI::App& cmd) {
    cmd.add_option("--L", order, "Smoothing kernel order L (> r)")->capture_default_str();
    cmd.add_option("--a", a, "Bandwidth grid ratio a > 1")->capture_default_str();
    cmd.add_option("--C", c, "Lepski constant C_j, a number or 'auto'")->capture_default_str();
    cmd.add_option("--threshold", threshold_mult, "Lepski threshold multiplier")->capture_default_str();
    cmd.add_option("--min-window-spacings", min_window_spacings,
                   "Smallest bandwidth, in maximal design spacings")
        ->capture_default_str();
    cmd.add_flag("--full-interval-norm", full_interval_norm,
                 "Lepski distances over [0, T] instead of the interior");
    cmd.add_option("--grid-size", grid_size, "Evaluation grid size")->capture_default_str();
    cmd.add_option("--weights", weights, "Observation weights: pc (Priestley-Chao) or gm (Gasser-Muller cells)")
        ->check(CLI::IsMember({"pc", "gm"}))
        ->capture_default_str();
    cmd.add_option("--bandwidths", bandwidths,
                   "Fixed bandwidths lambda_0..lambda_r (or one for all); skips Lepski");
  }

  EstimatorConfig config() const {
    EstimatorConfig cfg;
    cfg.order = order;
    cfg.grid_size = grid_size;
    cfg.fixed_bandwidths = bandwidths;
    cfg.lepski.a = a;
    cfg.lepski.threshold_mult = threshold_mult;
    cfg.lepski.min_window_spacings = min_window_spacings;
    cfg.lepski.interior_norm = !full_interval_norm;
    cfg.lepski.weights = weights == "gm" ? Weights::kGasserMuller : Weights::kPriestleyChao;
    if (c == "auto") {
      cfg.lepski.c.reset();
    } else {
      try {
        std::size_t used = 0;
        const double v = std::stod(c, &used);
        if (used != c.size() || !(v > 0.0)) throw std::invalid_argument(c);
        cfg.lepski.c = v;
      } catch (const std::exception&) {
        throw InputError("--C must be a positive number or 'auto', got '" + c + "'");
      }
    }
    if (order < 2) throw KernelSpecError("--L must be >= 2");
    if (!(a > 1.0)) throw InputError("--a must exceed 1");
    if (!(threshold_mult > 0.0)) throw InputError("--threshold must be positive");
    if (grid_size < 2) throw InputError("--grid-size must be >= 2");
    for (double bw : bandwidths) {
      if (!(bw > 0.0)) throw InputError("--bandwidths must be positive");
    }
    return cfg;
  }
};

void write_file_or(std::ostream& fallback, const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    fallback << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot write '" + path + "'");
  file << content;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

int cmd_deconvolve(const std::string& input, const std::string& kernel_text,
                   std::optional<double> sigma, bool estimate, std::optional<double> T_opt,
                   double trim, const EstimatorFlags& flags, const std::string& output,
                   std::string sidecar, std::ostream& out, std::ostream& err) {
  const auto cfg = flags.config();
  const auto g = parse_kernel_spec(kernel_text);
  const auto d = decompose(g);
  if (cfg.order <= g.r()) {
    throw KernelSpecError("kernel order L = " + std::to_string(cfg.order) + " must exceed r = " +
                          std::to_string(g.r()));
  }
  for (const auto& w : g.warnings()) err << "warning: " << w << '\n';

  const auto series = read_series_csv(input);
  const double T = T_opt ? *T_opt : series.t.back();
  double s = 0.0;
  if (sigma) {
    s = *sigma;
  } else if (estimate) {
    s = estimate_sigma(series.y);
  } else {
    throw InputError("either --sigma or --estimate-sigma is required");
  }
  if (!(trim >= 0.0) || trim >= 0.5) throw InputError("--trim must lie in [0, 0.5)");
  const NoisySample data(series.t, series.y, T, s);
  const auto result = deconvolve(data, d, cfg);

  std::ostringstream csv;
  write_columns_csv(csv, "t", "f_hat", result.grid, result.f_hat);
  write_file_or(out, output, csv.str());

  nlohmann::json meta;
  meta["input"] = input;
  meta["n"] = data.size();
  meta["T"] = T;
  meta["sigma"] = s;
  meta["sigma_estimated"] = !sigma.has_value();
  meta["mu"] = data.mu();
  meta["trim"] = trim;
  meta["bandwidths"] = result.bandwidths;
  meta["decomposition"] = decomposition_summary(g, d);
  meta["config"] = estimator_config_json(cfg);
  if (sidecar.empty()) sidecar = output == "-" ? "-" : output + ".json";
  write_file_or(out, sidecar, meta.dump(2) + "\n");
  return kExitOk;
}

int cmd_simulate(const std::string& cell, bool full, std::size_t runs, std::uint64_t seed,
                 unsigned threads, const std::string& csv_path, const std::string& json_path,
                 const std::string& emit_data, const EstimatorFlags& flags, std::ostream& out) {
  const auto cfg = flags.config();
  std::vector<Scenario> scenarios;
  if (full == !cell.empty()) throw InputError("pass exactly one of --cell g,f,n,i or --full");
  if (runs < 1) throw InputError("--runs must be >= 1");
  if (full) {
    scenarios = table_scenarios(runs, seed, cfg);
  } else {
    const auto parts = split(cell, ',');
    if (parts.size() != 4) throw InputError("--cell expects g,f,n,i (e.g. g2,f1,100,0)");
    std::size_t n = 0;
    int i = 0;
    try {
      n = std::stoul(parts[2]);
      i = std::stoi(parts[3]);
    } catch (const std::exception&) {
      throw InputError("--cell: n and i must be integers");
    }
    if (n < 10) throw InputError("--cell: n must be >= 10");
    if (i < 0) throw InputError("--cell: noise index i must be >= 0");
    scenarios.push_back(table_cell(parts[0], parts[1], n, i, runs, seed, cfg));
    const auto g = builtin_g(parts[0]);
    if (cfg.order <= g.r()) {
      throw KernelSpecError("kernel order L = " + std::to_string(cfg.order) + " must exceed r = " +
                            std::to_string(g.r()));
    }
  }

  if (!emit_data.empty()) {
    if (full) throw InputError("--emit-data needs --cell");
    const auto& sc = scenarios.front();
    const auto signal = scenario_signal(sc);
    const auto sample = simulate_sample(sc, signal, 0);
    std::ostringstream csv;
    write_columns_csv(csv, "t", "y", std::vector<double>(sample.times().begin(), sample.times().end()),
                      std::vector<double>(sample.values().begin(), sample.values().end()));
    write_file_or(out, emit_data, csv.str());
    if (csv_path.empty() && json_path.empty()) return kExitOk;
  }

  std::vector<ScenarioResult> results;
  results.reserve(scenarios.size());
  for (const auto& sc : scenarios) results.push_back(run_experiment(sc, threads));

  std::ostringstream csv;
  write_report_csv(csv, results);
  write_file_or(out, csv_path, csv.str());
  if (!json_path.empty()) write_file_or(out, json_path, report_json(results).dump(2) + "\n");
  for (const auto& r : results) {
    if (r.failures == r.scenario.runs) return kExitEstimator;
  }
  return kExitOk;
}

int cmd_make_kernel(int order, int j, double rho, const std::string& json_path,
                    const std::string& csv_path, std::ostream& out) {
  const auto k = make_boundary_kernel(order, j, rho);
  nlohmann::json coeffs = std::vector<double>(k.coeffs().begin(), k.coeffs().end());
  write_file_or(out, json_path, coeffs.dump() + "\n");
  if (!csv_path.empty()) {
    std::vector<double> t(1001);
    std::vector<double> v(1001);
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = k.lo() + (k.hi() - k.lo()) * static_cast<double>(i) / 1000.0;
      v[i] = k(t[i]);
    }
    std::ostringstream csv;
    write_columns_csv(csv, "t", "K", t, v);
    write_file_or(out, csv_path, csv.str());
  }
  return kExitOk;
}

int cmd_inspect_kernel(const std::string& kernel_text, std::ostream& out) {
  const auto g = parse_kernel_spec(kernel_text);
  const auto d = decompose(g);
  out << decomposition_summary(g, d).dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive Laplace deconvolution"};
  app.require_subcommand(1);

  // deconvolve
  auto* dec = app.add_subcommand("deconvolve", "Estimate f from noisy samples of q = g * f");
  std::string input, kernel_text, output, sidecar;
  std::optional<double> sigma, T_opt;
  bool estimate = false;
  double trim = 0.1;
  EstimatorFlags dec_flags;
  dec->add_option("--input", input, "CSV with header t,y")->required();
  dec->add_option("--kernel", kernel_text, "Kernel spec: inline JSON or a file")->required();
  auto* sigma_opt = dec->add_option("--sigma", sigma, "Known noise level");
  dec->add_flag("--estimate-sigma", estimate, "Use the difference-based sigma estimate")->excludes(sigma_opt);
  dec->add_option("--T", T_opt, "Interval length (default: largest t)");
  dec->add_option("--trim", trim, "Boundary fraction excluded from risk summaries")->capture_default_str();
  dec->add_option("--output", output, "Output CSV t,f_hat")->required();
  dec->add_option("--sidecar", sidecar, "JSON sidecar (default: <output>.json)");
  dec_flags.attach(*dec);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo benchmark");
  std::string cell, csv_path, json_path, emit_data;
  bool full = false;
  std::size_t runs = 400;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  EstimatorFlags sim_flags;
  sim->add_option("--cell", cell, "Single cell g,f,n,i");
  sim->add_flag("--full", full, "All 150 cells");
  sim->add_option("--runs", runs, "Replications per cell")->capture_default_str();
  sim->add_option("--seed", seed, "Base seed")->capture_default_str();
  sim->add_option("--threads", threads, "Worker threads (default: LAPDECONV_THREADS or all cores)");
  sim->add_option("--csv", csv_path, "Report CSV (default: stdout)");
  sim->add_option("--json", json_path, "Report JSON");
  sim->add_option("--emit-data", emit_data, "Write replication 0 of the cell as CSV t,y");
  sim_flags.attach(*sim);

  // make-kernel
  auto* mk = app.add_subcommand("make-kernel", "Build a smoothing kernel of order (L, j)");
  int mk_order = 8, mk_j = 0;
  double mk_rho = 1.0;
  std::string mk_json, mk_csv;
  mk->add_option("--L", mk_order, "Kernel order")->capture_default_str();
  mk->add_option("--j", mk_j, "Derivative order")->capture_default_str();
  mk->add_option("--rho", mk_rho, "Boundary support [-1, rho]")->capture_default_str();
  mk->add_option("--json", mk_json, "Coefficient JSON (default: stdout)");
  mk->add_option("--csv", mk_csv, "1001-point (t, K(t)) samples");

  // inspect-kernel
  auto* ins = app.add_subcommand("inspect-kernel", "Print r, B_r, poles, b_j and stability");
  std::string ins_kernel;
  ins->add_option("--kernel", ins_kernel, "Kernel spec: inline JSON or a file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitMalformedInput;
  }

  try {
    if (*dec) {
      return cmd_deconvolve(input, kernel_text, sigma, estimate, T_opt, trim, dec_flags, output,
                            sidecar, out, err);
    }
    if (*sim) {
      return cmd_simulate(cell, full, runs, seed, threads, csv_path, json_path, emit_data, sim_flags,
                          out);
    }
    if (*mk) return cmd_make_kernel(mk_order, mk_j, mk_rho, mk_json, mk_csv, out);
    if (*ins) return cmd_inspect_kernel(ins_kernel, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitMalformedInput;
  } catch (const KernelSpecError& e) {
    err << "error: " << e.what() << '\n';
    return kExitKernelSpec;
  } catch (const EstimatorError& e) {
    err << "error: " << e.what() << '\n';
    return kExitEstimator;
  }
  return kExitMalformedInput;
}

}  // namespace lapdeconv
