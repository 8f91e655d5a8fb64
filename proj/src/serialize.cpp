#include "demix/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "demix/errors.hpp"

namespace demix {

using nlohmann::json;

namespace {

constexpr Eigen::Index kMaxStoredEntries = 10'000'000;

double parse_double(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    throw IoError("malformed numeric literal: \"" + text + "\"");
  }
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(format_g17(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw IoError("expected a non-empty matrix array");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j.at(i);
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw IoError("ragged matrix array");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(i, c) = parse_double(row.at(c).get<std::string>());
    }
  }
  return m;
}

}  // namespace

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(format_g17(v[i]));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw IoError("expected an array of decimal strings");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = parse_double(j.at(i).get<std::string>());
  }
  return v;
}

json basis_to_json(const Orthobasis& basis) {
  json j;
  j["kind"] = to_string(basis.kind());
  j["n"] = basis.dim();
  if (basis.kind() == BasisKind::random_orthonormal) {
    j["seed"] = basis.seed();
  } else if (basis.kind() == BasisKind::explicit_dense) {
    j["values"] = matrix_to_json(basis.materialize());
  }
  return j;
}

Orthobasis basis_from_json(const json& j) {
  const BasisKind kind = basis_kind_from_string(j.at("kind").get<std::string>());
  const int n = j.at("n").get<int>();
  switch (kind) {
    case BasisKind::identity: return Orthobasis::identity(n);
    case BasisKind::dct: return Orthobasis::dct(n);
    case BasisKind::random_orthonormal:
      return Orthobasis::random_orthonormal(n, j.at("seed").get<std::uint64_t>());
    case BasisKind::explicit_dense:
      return Orthobasis::from_dense(matrix_from_json(j.at("values")));
  }
  throw IoError("bad basis descriptor");
}

json design_to_json(const DesignOperator& d) {
  json j;
  j["family"] = d.family_name();
  j["m"] = d.rows();
  j["n"] = d.cols();
  j["seed"] = d.seed();
  if (d.form() == DesignOperator::Form::dense) {
    j["form"] = "dense";
    j["scale"] = format_g17(d.scale());
    const Eigen::Index entries = static_cast<Eigen::Index>(d.rows()) * d.cols();
    if (entries <= kMaxStoredEntries) j["values"] = matrix_to_json(d.materialize());
  } else {
    j["form"] = "factored";
    j["k"] = d.blocks();
    j["q"] = d.inner_dim();
    j["T"] = format_g17(d.diag_bound());
    j["b_norm_exponent"] = format_g17(d.b_norm_exponent());
    const Eigen::Index entries =
        static_cast<Eigen::Index>(d.blocks()) * d.inner_dim() +
        static_cast<Eigen::Index>(d.inner_dim()) * d.cols();
    if (entries <= kMaxStoredEntries) {
      j["d_values"] = matrix_to_json(d.diagonals());
      j["b_values"] = matrix_to_json(d.b_matrix());
    }
  }
  return j;
}

DesignOperator design_from_json(const json& j) {
  const std::string form = j.at("form").get<std::string>();
  const std::string family = j.at("family").get<std::string>();
  const int m = j.at("m").get<int>();
  const int n = j.at("n").get<int>();
  if (form == "dense") {
    if (family == "explicit") {
      if (!j.contains("values")) {
        throw IoError("explicit dense design without stored values");
      }
      Eigen::MatrixXd x = matrix_from_json(j.at("values"));
      if (x.rows() != m || x.cols() != n) {
        throw IoError("stored design has inconsistent dimensions");
      }
      return DesignOperator::from_matrix(std::move(x));
    }
    return gen_subgaussian(m, n, family_from_string(family),
                           parse_double(j.at("scale").get<std::string>()),
                           j.at("seed").get<std::uint64_t>());
  }
  if (form == "factored") {
    if (family == "explicit") {
      throw IoError("explicit factored designs are not serializable");
    }
    return gen_factored(j.at("k").get<int>(), j.at("q").get<int>(), n,
                        parse_double(j.at("T").get<std::string>()),
                        family_from_string(family), j.at("seed").get<std::uint64_t>(),
                        parse_double(j.at("b_norm_exponent").get<std::string>()));
  }
  throw IoError("unknown design form: \"" + form + "\"");
}

json instance_to_json(const SuperpositionInstance& inst, const BasisPair& bases) {
  json j;
  j["schema"] = "demix-instance-v1";
  json cfg;
  cfg["n"] = inst.config.n;
  cfg["s"] = inst.config.s;
  cfg["b"] = inst.config.b;
  cfg["m"] = inst.config.m;
  cfg["q"] = inst.config.q;
  cfg["k"] = inst.config.k;
  cfg["noise_sigma"] = format_g17(inst.config.noise_sigma);
  j["config"] = std::move(cfg);
  j["seed"] = inst.seed;
  j["link_name"] = inst.link_name;
  if (inst.theta_true.has_value()) {
    j["theta1"] = vector_to_json(inst.theta_true->theta1());
    j["theta2"] = vector_to_json(inst.theta_true->theta2());
    j["beta"] = vector_to_json(inst.beta);
  }
  j["y"] = vector_to_json(inst.y);
  j["e"] = vector_to_json(inst.e);
  j["design_descriptor"] = design_to_json(inst.design);
  j["basis_descriptor"] = {{"phi", basis_to_json(bases.phi)},
                           {"psi", basis_to_json(bases.psi)}};
  return j;
}

LoadedInstance instance_from_json(const json& j) {
  if (j.value("schema", "") != "demix-instance-v1") {
    throw IoError("not a demix instance file (schema mismatch)");
  }
  LoadedInstance out;
  const json& cfg = j.at("config");
  out.instance.config.n = cfg.at("n").get<int>();
  out.instance.config.s = cfg.at("s").get<int>();
  out.instance.config.b = cfg.at("b").get<int>();
  out.instance.config.m = cfg.at("m").get<int>();
  out.instance.config.q = cfg.value("q", 0);
  out.instance.config.k = cfg.value("k", 0);
  out.instance.config.noise_sigma =
      parse_double(cfg.at("noise_sigma").get<std::string>());
  out.instance.seed = j.at("seed").get<std::uint64_t>();
  out.instance.link_name = j.at("link_name").get<std::string>();
  if (j.contains("theta1")) {
    out.instance.theta_true = StackedCoefficients::from_halves(
        vector_from_json(j.at("theta1")), vector_from_json(j.at("theta2")));
    out.instance.beta = vector_from_json(j.at("beta"));
  }
  out.instance.y = vector_from_json(j.at("y"));
  out.instance.e = vector_from_json(j.at("e"));
  out.instance.design = design_from_json(j.at("design_descriptor"));
  const json& basis = j.at("basis_descriptor");
  out.bases.phi = basis_from_json(basis.at("phi"));
  out.bases.psi = basis_from_json(basis.at("psi"));
  return out;
}

json solve_result_to_json(const SolveResult& r) {
  json j;
  j["schema"] = "demix-solve-result-v1";
  j["theta1_hat"] = vector_to_json(r.theta1_hat);
  j["theta2_hat"] = vector_to_json(r.theta2_hat);
  j["beta_hat"] = vector_to_json(r.beta_hat);
  j["iterations"] = r.iterations;
  j["eta_prime_used"] = format_g17(r.eta_prime_used);
  j["sparsity_enforced"] = r.sparsity_enforced;
  j["trace_is_error"] = r.trace_is_error;
  json trace = json::array();
  for (double e : r.error_trace) trace.push_back(format_g17(e));
  j["error_trace"] = std::move(trace);
  if (r.tone.has_value()) {
    j["tone"] = {{"z_hat", vector_to_json(r.tone->z_hat)},
                 {"peak_correlation", vector_to_json(r.tone->peak_correlation)},
                 {"range_violations", r.tone->range_violations}};
  }
  return j;
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open \"" + path + "\" for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed while writing \"" + path + "\"");
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open \"" + path + "\"");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw IoError("failed to parse \"" + path + "\": " + e.what());
  }
  return j;
}

}  // namespace demix
