// Command-line front end: instance generation, single solves, Monte-Carlo
// sweeps, curvature diagnostics, and plotting.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "demix/analysis.hpp"
#include "demix/errors.hpp"
#include "demix/experiments.hpp"
#include "demix/matched_filter.hpp"
#include "demix/serialize.hpp"
#include "demix/solvers.hpp"

namespace {

using demix::rng::derive;

struct GenerateOpts {
  std::string out;
  std::uint64_t seed = 0;
  int n = 256, s = 16, b = 4, m = 120, q = 0;
  double noise_sigma = 0.0;
  std::string link = "sigmoid";
  std::string design = "dense";
  std::string family = "gaussian";
  double scale = 0.0;  // 0 = 1/sqrt(m)
  double T = 20.0;
  double b_norm_exponent = 0.5;
  std::string phi = "identity";
  std::string psi = "random-orthonormal";
};

void run_generate(const GenerateOpts& o) {
  demix::SignalConfig cfg;
  cfg.n = o.n;
  cfg.s = o.s;
  cfg.b = o.b;
  cfg.m = o.m;
  cfg.noise_sigma = o.noise_sigma;
  if (o.design == "factored") {
    if (o.q < 1) throw demix::ConfigError("factored designs need --q >= 1");
    if (o.m % o.q != 0) throw demix::ConfigError("m must be a multiple of q");
    cfg.q = o.q;
    cfg.k = o.m / o.q;
  } else if (o.design != "dense") {
    throw demix::ConfigError("--design must be dense or factored");
  }

  demix::BasisPair bases;
  bases.phi = demix::gen_orthobasis(cfg.n, demix::basis_kind_from_string(o.phi),
                                    derive(o.seed, "phi"));
  bases.psi = demix::gen_orthobasis(cfg.n, demix::basis_kind_from_string(o.psi),
                                    derive(o.seed, "psi"));

  demix::DesignOperator design;
  const demix::SubgaussianFamily family = demix::family_from_string(o.family);
  if (cfg.factored()) {
    design = demix::gen_factored(cfg.k, cfg.q, cfg.n, o.T, family,
                                 derive(o.seed, "design"), o.b_norm_exponent);
  } else {
    const double scale = o.scale > 0.0 ? o.scale : 1.0 / std::sqrt(o.m);
    design =
        demix::gen_subgaussian(cfg.m, cfg.n, family, scale, derive(o.seed, "design"));
  }

  const demix::LinkSpec& link = demix::link_by_name(o.link);
  const demix::SuperpositionInstance inst =
      demix::synthesize_instance(cfg, bases, std::move(design), link, o.seed);
  demix::save_json(demix::instance_to_json(inst, bases), o.out);
  std::cout << o.out << "\n";
}

struct SolveOpts {
  std::string instance;
  std::string algorithm = "struct-dht";
  std::string out;  // empty = stdout
  double eta = 0.0;
  int max_iters = 500;
  double tol = 1e-7;
  double lambda = 0.0;
  bool trace = false;
  std::string trace_csv;
  double omega_max = 6.0;
  double resolution = 0.0;  // 0 = pi / (8 T)
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void run_solve(const SolveOpts& o) {
  demix::LoadedInstance loaded = demix::instance_from_json(demix::load_json(o.instance));
  const demix::SuperpositionInstance& inst = loaded.instance;
  const demix::LinkSpec& link = demix::link_by_name(inst.link_name);

  demix::SolverParams params;
  params.eta_prime = o.eta;
  params.max_iters = o.max_iters;
  params.tol = o.tol;
  params.lambda = o.lambda;
  params.trace = o.trace || !o.trace_csv.empty();
  params.init_seed = o.seed_set ? o.seed : derive(inst.seed, "solve");
  params.sparsity = demix::SparsityModel::block(inst.config.s, inst.config.b);

  demix::SolveResult result;
  if (o.algorithm == "struct-dht") {
    result = demix::struct_dht(inst, loaded.bases, link, params);
  } else if (o.algorithm == "dht") {
    params.sparsity = demix::SparsityModel::plain(inst.config.s);
    result = demix::struct_dht(inst, loaded.bases, link, params);
  } else if (o.algorithm == "dst") {
    result = demix::dst(inst, loaded.bases, link, params);
  } else if (o.algorithm == "mf-struct-dht") {
    const double T = inst.design.diag_bound();
    const double resolution =
        o.resolution > 0.0
            ? o.resolution
            : std::numbers::pi / (8.0 * (T > 0.0 ? T : 20.0));
    const demix::ToneGrid grid = demix::ToneGrid::make(o.omega_max, resolution);
    const demix::StackedCoefficients* truth =
        inst.theta_true.has_value() ? &inst.theta_true.value() : nullptr;
    result = demix::mf_struct_dht(inst.y, inst.design, loaded.bases, link, grid,
                                  params, truth);
  } else {
    throw demix::ConfigError("unknown algorithm \"" + o.algorithm + "\"");
  }

  nlohmann::json j = demix::solve_result_to_json(result);
  if (inst.theta_true.has_value()) {
    j["normalized_error"] =
        demix::format_g17(demix::normalized_error(result.beta_hat, inst.beta));
  }
  if (!o.trace_csv.empty()) {
    std::ofstream trace_out(o.trace_csv);
    if (!trace_out) {
      throw demix::IoError("cannot open \"" + o.trace_csv + "\" for writing");
    }
    trace_out << "iter," << (result.trace_is_error ? "error" : "loss") << "\n";
    for (std::size_t i = 0; i < result.error_trace.size(); ++i) {
      trace_out << i << "," << demix::format_g17(result.error_trace[i]) << "\n";
    }
  }
  if (o.out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    demix::save_json(j, o.out);
    std::cout << o.out << "\n";
  }
}

struct ExperimentOpts {
  std::string config;
  std::string out;
  int threads = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void run_experiment(const ExperimentOpts& o) {
  demix::ExperimentConfig cfg = demix::load_experiment_config(o.config);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.threads >= 0) cfg.threads = o.threads;
  if (o.seed_set) cfg.seed = o.seed;

  const demix::SweepResult sweep = demix::run_sweep(cfg);

  std::vector<std::string> paths =
      demix::emit_outputs(sweep, cfg.emit, cfg.output_dir);
  const std::string json_path =
      (std::filesystem::path(cfg.output_dir) / "sweep.json").string();
  demix::save_json(demix::sweep_to_json(sweep), json_path);
  paths.push_back(json_path);

  for (const demix::AggregateRow& agg : sweep.aggregates) {
    std::cout << agg.algorithm << " m=" << agg.m
              << " success=" << agg.success_probability
              << " mean_error=" << agg.mean_normalized_error << "\n";
  }
  for (const std::string& p : paths) std::cout << p << "\n";
}

struct AnalyzeOpts {
  std::string instance;
  int level_multiplier = 6;
  int trials = 20;
  std::uint64_t seed = 0;
  double eta = 0.0;
};

void run_analyze(const AnalyzeOpts& o) {
  demix::LoadedInstance loaded = demix::instance_from_json(demix::load_json(o.instance));
  const demix::SuperpositionInstance& inst = loaded.instance;
  const demix::LinkSpec& link = demix::link_by_name(inst.link_name);
  const int level = o.level_multiplier * inst.config.s;

  const demix::SpectralEstimate est = demix::estimate_srsc_srss(
      inst, loaded.bases, link, level, o.trials, o.seed);

  nlohmann::json j;
  j["schema"] = "demix-analysis-v1";
  j["level"] = est.level;
  j["trials"] = est.trials;
  j["m_hat"] = demix::format_g17(est.m_hat);
  j["M_hat"] = demix::format_g17(est.M_hat);
  const bool degenerate = !(est.m_hat > 0.0);
  j["degenerate"] = degenerate;
  if (degenerate) {
    j["window"] = nullptr;
    j["condition_ok"] = false;
  } else {
    const demix::StepSizeWindow w = demix::step_size_window(est.m_hat, est.M_hat);
    j["window"] = {{"lower", demix::format_g17(w.lower)},
                   {"upper", demix::format_g17(w.upper)}};
    j["condition_ok"] = w.condition_ok;
  }
  const double eta_default =
      o.eta > 0.0 ? o.eta
                  : (est.M_hat > 0.0 ? 1.0 / (2.0 * est.M_hat) : 0.5);
  j["eta_default"] = demix::format_g17(eta_default);
  j["rho_at_default_step"] =
      demix::format_g17(demix::theoretical_rate(eta_default, est.m_hat, est.M_hat));
  std::cout << j.dump(2) << "\n";
}

struct PlotOpts {
  std::string csv;
  std::string out = ".";
  std::vector<std::string> kinds = {"svg-success", "svg-error"};
};

void run_plot(const PlotOpts& o) {
  std::ifstream in(o.csv);
  if (!in) throw demix::IoError("cannot open \"" + o.csv + "\"");
  demix::SweepResult sweep;
  sweep.rows = demix::rows_from_csv(in);
  // Reconstruct algorithm and grid orderings from the rows.
  for (const demix::TrialResult& row : sweep.rows) {
    if (std::find(sweep.config.algorithms.begin(), sweep.config.algorithms.end(),
                  row.algorithm) == sweep.config.algorithms.end()) {
      sweep.config.algorithms.push_back(row.algorithm);
    }
    if (std::find(sweep.config.m_grid.begin(), sweep.config.m_grid.end(), row.m) ==
        sweep.config.m_grid.end()) {
      sweep.config.m_grid.push_back(row.m);
    }
  }
  std::sort(sweep.config.m_grid.begin(), sweep.config.m_grid.end());
  sweep.aggregates = demix::aggregate_rows(sweep.config, sweep.rows);
  for (const std::string& p : demix::emit_outputs(sweep, o.kinds, o.out)) {
    std::cout << p << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recovery of two block-sparse components from nonlinear "
               "observations of their superposition"};
  app.require_subcommand(1);

  GenerateOpts gen;
  CLI::App* generate = app.add_subcommand("generate", "synthesize an instance JSON");
  generate->add_option("--out", gen.out, "output path")->required();
  generate->add_option("--seed", gen.seed, "master seed");
  generate->add_option("--n", gen.n, "ambient dimension");
  generate->add_option("--s", gen.s, "sparsity per component");
  generate->add_option("--b", gen.b, "block length");
  generate->add_option("--m", gen.m, "number of observations");
  generate->add_option("--q", gen.q, "inner dimension (factored designs)");
  generate->add_option("--noise-sigma", gen.noise_sigma, "noise std deviation");
  generate->add_option("--link", gen.link, "identity | sigmoid | sin | sawtooth");
  generate->add_option("--design", gen.design, "dense | factored");
  generate->add_option("--family", gen.family, "gaussian | rademacher");
  generate->add_option("--scale", gen.scale, "dense design scale (0 = 1/sqrt(m))");
  generate->add_option("--T", gen.T, "diagonal bound for factored designs");
  generate->add_option("--b-norm-exponent", gen.b_norm_exponent,
                       "B row normalization exponent");
  generate->add_option("--phi", gen.phi, "identity | dct | random-orthonormal");
  generate->add_option("--psi", gen.psi, "identity | dct | random-orthonormal");
  generate->callback([&gen] { run_generate(gen); });

  SolveOpts solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "run one algorithm on an instance");
  solve_cmd->add_option("--instance", solve.instance, "instance JSON")->required();
  solve_cmd->add_option("--algorithm", solve.algorithm,
                        "struct-dht | dht | dst | mf-struct-dht");
  solve_cmd->add_option("--out", solve.out, "result path (default: stdout)");
  solve_cmd->add_option("--eta", solve.eta, "step size (0 = auto)");
  solve_cmd->add_option("--max-iters", solve.max_iters, "iteration cap");
  solve_cmd->add_option("--tol", solve.tol, "relative-change stopping tolerance");
  solve_cmd->add_option("--lambda", solve.lambda, "soft-threshold level (dst)");
  solve_cmd->add_flag("--trace", solve.trace, "record the per-iteration trace");
  solve_cmd->add_option("--trace-csv", solve.trace_csv, "write the trace as CSV");
  solve_cmd->add_option("--omega-max", solve.omega_max, "tone grid half-width");
  solve_cmd->add_option("--resolution", solve.resolution,
                        "tone grid spacing (0 = pi/(8T))");
  solve_cmd->add_option("--seed", solve.seed, "initialization seed")
      ->each([&solve](const std::string&) { solve.seed_set = true; });
  solve_cmd->callback([&solve] { run_solve(solve); });

  ExperimentOpts exp;
  CLI::App* exp_cmd = app.add_subcommand("experiment", "run a Monte-Carlo sweep");
  exp_cmd->add_option("--config", exp.config, "experiment config file")->required();
  exp_cmd->add_option("--out", exp.out, "output directory override");
  exp_cmd->add_option("--threads", exp.threads, "worker threads (0 = hardware)");
  exp_cmd->add_option("--seed", exp.seed, "seed override")
      ->each([&exp](const std::string&) { exp.seed_set = true; });
  exp_cmd->callback([&exp] { run_experiment(exp); });

  AnalyzeOpts ana;
  CLI::App* ana_cmd =
      app.add_subcommand("analyze", "restricted-curvature and rate diagnostics");
  ana_cmd->add_option("--instance", ana.instance, "instance JSON")->required();
  ana_cmd->add_option("--level-multiplier", ana.level_multiplier,
                      "curvature level as a multiple of s");
  ana_cmd->add_option("--trials", ana.trials, "sampling trials");
  ana_cmd->add_option("--seed", ana.seed, "sampling seed");
  ana_cmd->add_option("--eta", ana.eta, "step size for the rate report (0 = auto)");
  ana_cmd->callback([&ana] { run_analyze(ana); });

  PlotOpts plot;
  CLI::App* plot_cmd = app.add_subcommand("plot", "render SVG charts from a sweep CSV");
  plot_cmd->add_option("--csv", plot.csv, "sweep CSV path")->required();
  plot_cmd->add_option("--out", plot.out, "output directory");
  plot_cmd->add_option("--kinds", plot.kinds, "svg-success and/or svg-error")
      ->delimiter(',');
  plot_cmd->callback([&plot] { run_plot(plot); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return demix::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return demix::exit_code_for(e);
  }
  return demix::kExitOk;
}
