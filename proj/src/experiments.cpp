#include "demix/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "demix/errors.hpp"
#include "demix/plots.hpp"
#include "demix/serialize.hpp"

namespace demix {

using nlohmann::json;

namespace {

const std::vector<std::string> kKnownAlgorithms = {"struct-dht", "dht", "dst",
                                                   "mf-struct-dht"};
const std::vector<std::string> kKnownEmitKinds = {"csv", "svg-success", "svg-error"};

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

void check_compatible(const ExperimentConfig& config, const std::string& algorithm) {
  if (!contains(kKnownAlgorithms, algorithm)) {
    throw ConfigError("unknown algorithm: \"" + algorithm + "\"");
  }
  const LinkSpec& link = link_by_name(config.link_name);
  if (link.periodic() && algorithm != "mf-struct-dht") {
    throw ConfigError("periodic link \"" + link.name + "\" requires mf-struct-dht, got " +
                      algorithm);
  }
  if (!link.periodic() && algorithm == "mf-struct-dht") {
    throw ConfigError("mf-struct-dht requires a periodic link, got \"" + link.name +
                      "\"");
  }
  if (algorithm == "mf-struct-dht" && config.design_form != "factored") {
    throw ConfigError("mf-struct-dht requires a factored design");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (base.n < 1 || base.s < 1 || base.b < 1) {
    throw ConfigError("experiment: n, s, b must be positive");
  }
  if (base.s > base.n) throw ConfigError("experiment: s must not exceed n");
  if (base.s % base.b != 0 || base.n % base.b != 0) {
    throw ConfigError("experiment: b must divide both s and n");
  }
  if (base.noise_sigma < 0.0) throw ConfigError("experiment: noise_sigma < 0");
  if (trials < 1) throw ConfigError("experiment: trials must be >= 1");
  if (!(success_threshold > 0.0 && success_threshold < 1.0)) {
    throw ConfigError("experiment: success_threshold must lie in (0, 1)");
  }
  if (m_grid.empty()) throw ConfigError("experiment: m_grid must not be empty");
  for (std::size_t i = 0; i < m_grid.size(); ++i) {
    if (m_grid[i] < 1) throw ConfigError("experiment: m_grid entries must be >= 1");
    if (i > 0 && m_grid[i] <= m_grid[i - 1]) {
      throw ConfigError("experiment: m_grid must be strictly increasing");
    }
  }
  if (design_form != "dense" && design_form != "factored") {
    throw ConfigError("experiment: design form must be dense or factored");
  }
  if (design_form == "factored") {
    if (base.q < 1) throw ConfigError("experiment: factored design needs q >= 1");
    for (int m : m_grid) {
      if (m % base.q != 0) {
        throw ConfigError("experiment: every m in the grid must be a multiple of q");
      }
    }
    if (design_T <= 0.0) throw ConfigError("experiment: T must be positive");
  }
  if (solver.max_iters < 1) throw ConfigError("experiment: max_iters must be >= 1");
  if (solver.tol < 0.0) throw ConfigError("experiment: tol must be >= 0");
  if (solver.lambda < 0.0) throw ConfigError("experiment: lambda must be >= 0");
  for (const std::string& kind : emit) {
    if (!contains(kKnownEmitKinds, kind)) {
      throw ConfigError("experiment: unknown emit kind \"" + kind + "\"");
    }
  }
  for (const std::string& algo : algorithms) check_compatible(*this, algo);
}

std::uint64_t trial_seed(std::uint64_t seed, const std::string& algorithm, int m,
                         int trial_index) {
  return rng::derive(rng::derive(seed, algorithm), "trial",
                     static_cast<std::uint64_t>(m),
                     static_cast<std::uint64_t>(trial_index));
}

BasisPair experiment_bases(const ExperimentConfig& config) {
  BasisPair bases;
  bases.phi = gen_orthobasis(config.base.n, config.phi_kind,
                             rng::derive(config.seed, "phi"));
  bases.psi = gen_orthobasis(config.base.n, config.psi_kind,
                             rng::derive(config.seed, "psi"));
  return bases;
}

namespace {

// DST baseline with the documented lambda policy: a fixed lambda runs once;
// lambda = 0 sweeps a small logarithmic grid under lambda_max = ||grad F(0)||_inf
// and keeps the best result for the trial.
SolveResult run_dst(const SuperpositionInstance& inst, const BasisPair& bases,
                    const LinkSpec& link, SolverParams params) {
  if (params.lambda > 0.0) return dst(inst, bases, link, params);
  const StackedCoefficients origin(
      Eigen::VectorXd::Zero(2 * static_cast<Eigen::Index>(inst.config.n)));
  const double lambda_max =
      loss_gradient(origin, inst, bases, link).cwiseAbs().maxCoeff();
  if (!(lambda_max > 0.0)) return dst(inst, bases, link, params);

  const double factors[] = {0.3, 0.1, 0.03, 0.01};
  SolveResult best;
  double best_score = std::numeric_limits<double>::infinity();
  for (double f : factors) {
    params.lambda = f * lambda_max;
    SolveResult r = dst(inst, bases, link, params);
    double score;
    if (inst.theta_true.has_value()) {
      score = normalized_error(r.beta_hat, inst.beta);
    } else {
      const StackedCoefficients t = StackedCoefficients::from_halves(
          r.theta1_hat, r.theta2_hat);
      score = loss_value(t, inst, bases, link);
    }
    if (score < best_score) {
      best_score = score;
      best = std::move(r);
    }
  }
  return best;
}

TrialResult execute_trial(const ExperimentConfig& config, const BasisPair& bases,
                          const std::string& algorithm, int m, int trial_index) {
  check_compatible(config, algorithm);

  TrialResult row;
  row.algorithm = algorithm;
  row.m = m;
  row.trial_index = trial_index;

  const std::uint64_t tseed = trial_seed(config.seed, algorithm, m, trial_index);
  SignalConfig cfg = config.base;
  cfg.m = m;
  if (config.design_form == "factored") {
    cfg.q = config.base.q;
    cfg.k = m / cfg.q;
  } else {
    cfg.q = 0;
    cfg.k = 0;
  }
  const LinkSpec& link = link_by_name(config.link_name);

  DesignOperator design;
  if (config.design_form == "factored") {
    design = gen_factored(cfg.k, cfg.q, cfg.n, config.design_T, config.design_family,
                          rng::derive(tseed, "design"), config.b_norm_exponent);
  } else {
    const double scale =
        config.design_scale > 0.0 ? config.design_scale : 1.0 / std::sqrt(m);
    design = gen_subgaussian(m, cfg.n, config.design_family, scale,
                             rng::derive(tseed, "design"));
  }
  const SuperpositionInstance inst =
      synthesize_instance(cfg, bases, std::move(design), link, tseed);

  SolverParams params = config.solver;
  params.init_seed = rng::derive(tseed, "solver");

  const auto start = std::chrono::steady_clock::now();
  SolveResult sol;
  if (algorithm == "struct-dht") {
    params.sparsity = SparsityModel::block(cfg.s, cfg.b);
    sol = struct_dht(inst, bases, link, params);
  } else if (algorithm == "dht") {
    params.sparsity = SparsityModel::plain(cfg.s);
    sol = struct_dht(inst, bases, link, params);
  } else if (algorithm == "dst") {
    params.sparsity = SparsityModel::block(cfg.s, cfg.b);
    sol = run_dst(inst, bases, link, params);
  } else {  // mf-struct-dht
    params.sparsity = SparsityModel::block(cfg.s, cfg.b);
    const double resolution = config.grid_resolution > 0.0
                                  ? config.grid_resolution
                                  : std::numbers::pi / (8.0 * config.design_T);
    const ToneGrid grid = ToneGrid::make(config.grid_omega_max, resolution);
    sol = mf_struct_dht(inst.y, inst.design, bases, link, grid, params,
                        &inst.theta_true.value());
  }
  const auto stop = std::chrono::steady_clock::now();

  row.normalized_error = normalized_error(sol.beta_hat, inst.beta);
  row.success = row.normalized_error < config.success_threshold;
  row.iterations = sol.iterations;
  row.error_theta1 = normalized_error(sol.theta1_hat, inst.theta_true->theta1());
  row.error_theta2 = normalized_error(sol.theta2_hat, inst.theta_true->theta2());
  if (config.record_timings) {
    row.wall_time_seconds = std::chrono::duration<double>(stop - start).count();
  }
  return row;
}

}  // namespace

TrialResult run_trial(const ExperimentConfig& config, const BasisPair& bases,
                      const std::string& algorithm, int m, int trial_index) {
  return execute_trial(config, bases, algorithm, m, trial_index);
}

TrialResult run_trial(const ExperimentConfig& config, const std::string& algorithm,
                      int m, int trial_index) {
  const BasisPair bases = experiment_bases(config);
  return execute_trial(config, bases, algorithm, m, trial_index);
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  SweepResult sweep;
  sweep.config = config;
  if (config.algorithms.empty()) return sweep;

  const BasisPair bases = experiment_bases(config);

  struct Task {
    const std::string* algorithm;
    int m;
    int trial;
  };
  std::vector<Task> tasks;
  tasks.reserve(config.algorithms.size() * config.m_grid.size() * config.trials);
  for (const std::string& algo : config.algorithms) {
    for (int m : config.m_grid) {
      for (int t = 0; t < config.trials; ++t) tasks.push_back({&algo, m, t});
    }
  }
  sweep.rows.resize(tasks.size());

  const auto worker_body = [&](std::atomic<std::size_t>& next) {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      try {
        sweep.rows[i] =
            execute_trial(config, bases, *task.algorithm, task.m, task.trial);
      } catch (const std::exception& e) {
        TrialResult row;
        row.algorithm = *task.algorithm;
        row.m = task.m;
        row.trial_index = task.trial;
        row.normalized_error = std::numeric_limits<double>::quiet_NaN();
        row.success = false;
        row.error_message = e.what();
        sweep.rows[i] = std::move(row);
      }
    }
  };

  int nthreads = config.threads > 0
                     ? config.threads
                     : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(tasks.size())));
  std::atomic<std::size_t> next{0};
  if (nthreads == 1) {
    worker_body(next);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&] { worker_body(next); });
    }
    for (std::thread& t : pool) t.join();
  }

  sweep.aggregates = aggregate_rows(config, sweep.rows);
  return sweep;
}

std::vector<AggregateRow> aggregate_rows(const ExperimentConfig& config,
                                         const std::vector<TrialResult>& rows) {
  std::vector<AggregateRow> out;
  for (const std::string& algo : config.algorithms) {
    for (int m : config.m_grid) {
      AggregateRow agg;
      agg.algorithm = algo;
      agg.m = m;
      int successes = 0;
      int finite = 0;
      double error_sum = 0.0;
      for (const TrialResult& row : rows) {
        if (row.algorithm != algo || row.m != m) continue;
        ++agg.trials;
        if (row.success) ++successes;
        if (std::isfinite(row.normalized_error)) {
          ++finite;
          error_sum += row.normalized_error;
        }
      }
      if (agg.trials == 0) continue;
      agg.success_probability = static_cast<double>(successes) / agg.trials;
      agg.mean_normalized_error =
          finite > 0 ? error_sum / finite : std::numeric_limits<double>::quiet_NaN();
      out.push_back(std::move(agg));
    }
  }
  return out;
}

std::string sweep_to_csv(const SweepResult& sweep) {
  std::ostringstream out;
  out << "algorithm,m,trial,normalized_error,success,iterations,wall_time_seconds\n";
  for (const TrialResult& row : sweep.rows) {
    out << row.algorithm << "," << row.m << "," << row.trial_index << ","
        << format_g17(row.normalized_error) << "," << (row.success ? 1 : 0) << ","
        << row.iterations << "," << format_g17(row.wall_time_seconds) << "\n";
  }
  return out.str();
}

std::vector<TrialResult> rows_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV input");
  if (line == "algorithm,m,trial,normalized_error,success,iterations,wall_time_"
              "seconds\r") {
    line.pop_back();
  }
  if (line != "algorithm,m,trial,normalized_error,success,iterations,wall_time_"
              "seconds") {
    throw IoError("unexpected CSV header: \"" + line + "\"");
  }
  std::vector<TrialResult> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 7) {
      throw IoError("CSV line " + std::to_string(lineno) + ": expected 7 fields");
    }
    TrialResult row;
    row.algorithm = fields[0];
    row.m = std::stoi(fields[1]);
    row.trial_index = std::stoi(fields[2]);
    row.normalized_error = std::strtod(fields[3].c_str(), nullptr);
    row.success = fields[4] == "1" || fields[4] == "true";
    row.iterations = std::stoi(fields[5]);
    row.wall_time_seconds = std::strtod(fields[6].c_str(), nullptr);
    rows.push_back(std::move(row));
  }
  return rows;
}

json experiment_config_to_json(const ExperimentConfig& config) {
  json j;
  j["model"] = {{"n", config.base.n},       {"s", config.base.s},
                {"b", config.base.b},       {"q", config.base.q},
                {"noise_sigma", format_g17(config.base.noise_sigma)}};
  j["link"] = config.link_name;
  j["algorithms"] = config.algorithms;
  j["m_grid"] = config.m_grid;
  j["trials"] = config.trials;
  j["success_threshold"] = format_g17(config.success_threshold);
  j["seed"] = config.seed;
  j["solver"] = {{"eta_prime", format_g17(config.solver.eta_prime)},
                 {"max_iters", config.solver.max_iters},
                 {"tol", format_g17(config.solver.tol)},
                 {"lambda", format_g17(config.solver.lambda)},
                 {"trace", config.solver.trace}};
  j["design"] = {{"form", config.design_form},
                 {"family", to_string(config.design_family)},
                 {"scale", format_g17(config.design_scale)},
                 {"T", format_g17(config.design_T)},
                 {"b_norm_exponent", format_g17(config.b_norm_exponent)}};
  j["bases"] = {{"phi", to_string(config.phi_kind)},
                {"psi", to_string(config.psi_kind)}};
  j["grid"] = {{"omega_max", format_g17(config.grid_omega_max)},
               {"resolution", format_g17(config.grid_resolution)}};
  j["output_dir"] = config.output_dir;
  j["emit"] = config.emit;
  j["record_timings"] = config.record_timings;
  return j;
}

json sweep_to_json(const SweepResult& sweep) {
  json j;
  j["schema"] = "demix-sweep-v1";
  j["config"] = experiment_config_to_json(sweep.config);
  json rows = json::array();
  for (const TrialResult& row : sweep.rows) {
    json r;
    r["algorithm"] = row.algorithm;
    r["m"] = row.m;
    r["trial"] = row.trial_index;
    r["normalized_error"] = format_g17(row.normalized_error);
    r["success"] = row.success;
    r["iterations"] = row.iterations;
    r["wall_time_seconds"] = format_g17(row.wall_time_seconds);
    r["normalized_error_theta1"] = format_g17(row.error_theta1);
    r["normalized_error_theta2"] = format_g17(row.error_theta2);
    if (!row.error_message.empty()) r["error"] = row.error_message;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  json aggs = json::array();
  for (const AggregateRow& agg : sweep.aggregates) {
    aggs.push_back({{"algorithm", agg.algorithm},
                    {"m", agg.m},
                    {"success_probability", format_g17(agg.success_probability)},
                    {"mean_normalized_error", format_g17(agg.mean_normalized_error)},
                    {"trials", agg.trials}});
  }
  j["aggregates"] = std::move(aggs);
  return j;
}

std::vector<std::string> emit_outputs(const SweepResult& sweep,
                                      const std::vector<std::string>& kinds,
                                      const std::string& output_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw IoError("cannot create output directory \"" + output_dir + "\"");

  const auto write_file = [](const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open \"" + path + "\" for writing");
    out << content;
    if (!out) throw IoError("failed while writing \"" + path + "\"");
  };

  const auto series_from_aggregates = [&](bool success) {
    std::vector<plots::Series> series;
    for (const std::string& algo : sweep.config.algorithms) {
      plots::Series s;
      s.name = algo;
      for (const AggregateRow& agg : sweep.aggregates) {
        if (agg.algorithm != algo) continue;
        const double y =
            success ? agg.success_probability : agg.mean_normalized_error;
        if (std::isfinite(y)) s.points.emplace_back(agg.m, y);
      }
      series.push_back(std::move(s));
    }
    return series;
  };

  std::vector<std::string> paths;
  for (const std::string& kind : kinds) {
    if (kind == "csv") {
      const std::string path = (fs::path(output_dir) / "sweep.csv").string();
      write_file(path, sweep_to_csv(sweep));
      paths.push_back(path);
    } else if (kind == "svg-success") {
      if (sweep.rows.empty()) {
        throw ConfigError("emit_outputs: refusing to plot an empty sweep");
      }
      const std::string path = (fs::path(output_dir) / "success_vs_m.svg").string();
      write_file(path, plots::line_chart_svg(
                           "Recovery probability", "observations m",
                           "success probability", series_from_aggregates(true),
                           0.0, 1.0));
      paths.push_back(path);
    } else if (kind == "svg-error") {
      if (sweep.rows.empty()) {
        throw ConfigError("emit_outputs: refusing to plot an empty sweep");
      }
      double top = 0.0;
      for (const AggregateRow& agg : sweep.aggregates) {
        if (std::isfinite(agg.mean_normalized_error)) {
          top = std::max(top, agg.mean_normalized_error);
        }
      }
      const std::string path = (fs::path(output_dir) / "error_vs_m.svg").string();
      write_file(path, plots::line_chart_svg(
                           "Mean normalized error", "observations m",
                           "normalized error", series_from_aggregates(false), 0.0,
                           top > 0.0 ? 1.05 * top : 1.0));
      paths.push_back(path);
    } else {
      throw ConfigError("emit_outputs: unknown kind \"" + kind + "\"");
    }
  }
  return paths;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

class ConfigReader {
 public:
  ConfigReader(const std::string& origin, int lineno)
      : origin_(origin), lineno_(lineno) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(origin_ + ":" + std::to_string(lineno_) + ": " + message);
  }

  int to_int(const std::string& v) const {
    try {
      std::size_t pos = 0;
      const int x = std::stoi(v, &pos);
      if (pos != v.size()) fail("trailing characters in integer \"" + v + "\"");
      return x;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      fail("expected an integer, got \"" + v + "\"");
    }
  }

  std::uint64_t to_u64(const std::string& v) const {
    try {
      std::size_t pos = 0;
      const std::uint64_t x = std::stoull(v, &pos);
      if (pos != v.size()) fail("trailing characters in integer \"" + v + "\"");
      return x;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      fail("expected an unsigned integer, got \"" + v + "\"");
    }
  }

  // "auto" maps to 0, which every consumer treats as "pick a default".
  double to_double(const std::string& v) const {
    if (v == "auto") return 0.0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') fail("expected a number, got \"" + v + "\"");
    return x;
  }

  bool to_bool(const std::string& v) const {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail("expected a boolean, got \"" + v + "\"");
  }

 private:
  const std::string& origin_;
  int lineno_;
};

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in,
                                         const std::string& origin) {
  ExperimentConfig cfg;
  cfg.algorithms.clear();

  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const ConfigReader reader(origin, lineno);

    if (line.front() == '[') {
      if (line.back() != ']') reader.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "bases" && section != "design" &&
          section != "link" && section != "experiment" && section != "solver" &&
          section != "grid") {
        reader.fail("unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) reader.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) reader.fail("key \"" + key + "\" outside any section");

    if (section == "model") {
      if (key == "n") cfg.base.n = reader.to_int(value);
      else if (key == "s") cfg.base.s = reader.to_int(value);
      else if (key == "b") cfg.base.b = reader.to_int(value);
      else if (key == "q") cfg.base.q = reader.to_int(value);
      else if (key == "noise_sigma") cfg.base.noise_sigma = reader.to_double(value);
      else if (key == "k") reader.fail("k is derived from m/q per grid point");
      else reader.fail("unknown key \"" + key + "\" in [model]");
    } else if (section == "bases") {
      if (key == "phi") cfg.phi_kind = basis_kind_from_string(value);
      else if (key == "psi") cfg.psi_kind = basis_kind_from_string(value);
      else reader.fail("unknown key \"" + key + "\" in [bases]");
    } else if (section == "design") {
      if (key == "form") cfg.design_form = value;
      else if (key == "family") cfg.design_family = family_from_string(value);
      else if (key == "scale") cfg.design_scale = reader.to_double(value);
      else if (key == "T") cfg.design_T = reader.to_double(value);
      else if (key == "b_norm_exponent") cfg.b_norm_exponent = reader.to_double(value);
      else reader.fail("unknown key \"" + key + "\" in [design]");
    } else if (section == "link") {
      if (key == "name") cfg.link_name = value;
      else reader.fail("unknown key \"" + key + "\" in [link]");
    } else if (section == "experiment") {
      if (key == "algorithms") cfg.algorithms = split_list(value);
      else if (key == "m_grid") {
        cfg.m_grid.clear();
        for (const std::string& item : split_list(value)) {
          cfg.m_grid.push_back(reader.to_int(item));
        }
      } else if (key == "trials") cfg.trials = reader.to_int(value);
      else if (key == "success_threshold") {
        cfg.success_threshold = reader.to_double(value);
      } else if (key == "seed") cfg.seed = reader.to_u64(value);
      else if (key == "output_dir") cfg.output_dir = value;
      else if (key == "emit") cfg.emit = split_list(value);
      else if (key == "record_timings") cfg.record_timings = reader.to_bool(value);
      else if (key == "threads") cfg.threads = reader.to_int(value);
      else reader.fail("unknown key \"" + key + "\" in [experiment]");
    } else if (section == "solver") {
      if (key == "eta_prime") cfg.solver.eta_prime = reader.to_double(value);
      else if (key == "max_iters") cfg.solver.max_iters = reader.to_int(value);
      else if (key == "tol") cfg.solver.tol = reader.to_double(value);
      else if (key == "lambda") cfg.solver.lambda = reader.to_double(value);
      else if (key == "trace") cfg.solver.trace = reader.to_bool(value);
      else reader.fail("unknown key \"" + key + "\" in [solver]");
    } else if (section == "grid") {
      if (key == "omega_max") cfg.grid_omega_max = reader.to_double(value);
      else if (key == "resolution") cfg.grid_resolution = reader.to_double(value);
      else reader.fail("unknown key \"" + key + "\" in [grid]");
    }
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file \"" + path + "\"");
  return parse_experiment_config(in, path);
}

}  // namespace demix
