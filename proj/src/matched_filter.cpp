#include "demix/matched_filter.hpp"

#include <cmath>

#include "demix/errors.hpp"

namespace demix {

ToneGrid ToneGrid::make(double omega_max, double resolution) {
  if (!(omega_max > 0.0) || !(resolution > 0.0)) {
    throw ConfigError("ToneGrid: omega_max and resolution must be positive");
  }
  ToneGrid g;
  g.omega_max = omega_max;
  g.resolution = resolution;
  g.half_points = static_cast<int>(std::ceil(omega_max / resolution));
  g.spacing = omega_max / static_cast<double>(g.half_points);
  return g;
}

Eigen::VectorXd premap_observations(const Eigen::VectorXd& y, const LinkSpec& link) {
  if (!link.periodic()) {
    throw UnsupportedLinkError("premap_observations: link \"" + link.name +
                               "\" is not periodic");
  }
  if (link.name == "sin") return y;
  return y.array().sin();
}

double estimate_tone(const Eigen::VectorXd& u, const Eigen::VectorXd& d,
                     const ToneGrid& grid, double* peak) {
  const int k = static_cast<int>(u.size());
  if (k < 2) throw ConfigError("estimate_tone: need at least two samples");
  if (d.size() != k) {
    throw ConfigError("estimate_tone: sample/location length mismatch");
  }
  if (grid.size() < 1) throw ConfigError("estimate_tone: empty grid");

  // Sweep the grid with per-sample phasor recurrences: advancing omega by the
  // grid spacing rotates (sin, cos) of omega*d_j by spacing*d_j. Phasors are
  // recomputed exactly every 256 steps to stop drift from accumulating.
  Eigen::VectorXd sin_v(k), cos_v(k), rot_s(k), rot_c(k);
  for (int j = 0; j < k; ++j) {
    const double a = grid.spacing * d[j];
    rot_s[j] = std::sin(a);
    rot_c[j] = std::cos(a);
  }
  const auto refresh = [&](int idx) {
    const double omega = grid.frequency(idx);
    for (int j = 0; j < k; ++j) {
      sin_v[j] = std::sin(omega * d[j]);
      cos_v[j] = std::cos(omega * d[j]);
    }
  };

  double best_score = 0.0;
  double best_omega = 0.0;
  bool have_best = false;
  for (int idx = 0; idx < grid.size(); ++idx) {
    if (idx % 256 == 0) {
      refresh(idx);
    } else {
      for (int j = 0; j < k; ++j) {
        const double s_next = sin_v[j] * rot_c[j] + cos_v[j] * rot_s[j];
        const double c_next = cos_v[j] * rot_c[j] - sin_v[j] * rot_s[j];
        sin_v[j] = s_next;
        cos_v[j] = c_next;
      }
    }
    const double norm2 = sin_v.squaredNorm();
    const double score = norm2 > 1e-300 ? u.dot(sin_v) / std::sqrt(norm2) : 0.0;
    const double omega = grid.frequency(idx);
    const bool better =
        !have_best || score > best_score ||
        (score == best_score &&
         (std::fabs(omega) < std::fabs(best_omega) ||
          (std::fabs(omega) == std::fabs(best_omega) && omega < best_omega)));
    if (better) {
      best_score = score;
      best_omega = omega;
      have_best = true;
    }
  }
  if (peak != nullptr) *peak = best_score;
  return best_omega;
}

Eigen::VectorXd estimate_z(const Eigen::VectorXd& y_mapped,
                           const DesignOperator& design, const ToneGrid& grid,
                           Eigen::VectorXd* peak_correlation,
                           int* range_violations) {
  if (design.form() != DesignOperator::Form::factored) {
    throw ConfigError("estimate_z: a factored design is required");
  }
  const int q = design.inner_dim();
  const int k = design.blocks();
  if (y_mapped.size() != static_cast<Eigen::Index>(q) * k) {
    throw ConfigError("estimate_z: observation length does not match k*q");
  }
  Eigen::VectorXd z(q);
  if (peak_correlation != nullptr) peak_correlation->resize(q);
  int boundary_hits = 0;
  Eigen::VectorXd u(k), d(k);
  for (int l = 0; l < q; ++l) {
    for (int j = 0; j < k; ++j) {
      u[j] = y_mapped[static_cast<Eigen::Index>(j) * q + l];
      d[j] = design.diagonals()(j, l);
    }
    double peak = 0.0;
    z[l] = estimate_tone(u, d, grid, &peak);
    if (peak_correlation != nullptr) (*peak_correlation)[l] = peak;
    if (std::fabs(z[l]) >= grid.omega_max - 0.25 * grid.spacing) ++boundary_hits;
  }
  if (range_violations != nullptr) *range_violations = boundary_hits;
  return z;
}

SolveResult mf_struct_dht(const Eigen::VectorXd& y, const DesignOperator& design,
                          const BasisPair& bases, const LinkSpec& link,
                          const ToneGrid& grid, const SolverParams& params,
                          const StackedCoefficients* truth) {
  if (design.form() != DesignOperator::Form::factored) {
    throw ConfigError("mf_struct_dht: a factored design is required");
  }
  if (!link.periodic()) {
    throw UnsupportedLinkError("mf_struct_dht: link \"" + link.name +
                               "\" is aperiodic; run struct_dht directly");
  }
  if (y.size() != design.rows()) {
    throw ConfigError("mf_struct_dht: observation length does not match the design");
  }

  const Eigen::VectorXd mapped = premap_observations(y, link);
  ToneDiagnostics tone;
  tone.z_hat = estimate_z(mapped, design, grid, &tone.peak_correlation,
                          &tone.range_violations);

  // Final stage: linear demixing of z_hat ~ B beta with the identity link.
  SuperpositionInstance surrogate;
  surrogate.config.n = design.cols();
  surrogate.config.s = params.sparsity.s;
  surrogate.config.b = params.sparsity.b;
  surrogate.config.m = design.inner_dim();
  surrogate.design = DesignOperator::from_matrix(design.b_matrix());
  surrogate.y = tone.z_hat;
  surrogate.e = Eigen::VectorXd::Zero(design.inner_dim());
  surrogate.link_name = "identity";
  if (truth != nullptr) {
    if (truth->t.size() != static_cast<Eigen::Index>(2) * design.cols()) {
      throw ConfigError("mf_struct_dht: ground truth has the wrong length");
    }
    surrogate.theta_true = *truth;
    surrogate.beta = bases.gamma_apply(truth->t);
  }

  SolveResult res = struct_dht(surrogate, bases, identity_link(), params);
  res.tone = std::move(tone);
  return res;
}

}  // namespace demix
