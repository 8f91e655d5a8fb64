#pragma once

#include <Eigen/Core>

#include "demix/model_core.hpp"
#include "demix/solvers.hpp"

namespace demix {

// Symmetric uniform frequency grid over [-omega_max, omega_max], including
// 0 and both endpoints, with spacing at most `resolution`.
struct ToneGrid {
  double omega_max = 0.0;
  double resolution = 0.0;  // requested upper bound on the spacing
  int half_points = 0;      // indices run over {-half_points, ..., +half_points}
  double spacing = 0.0;     // actual spacing, <= resolution

  static ToneGrid make(double omega_max, double resolution);

  int size() const { return 2 * half_points + 1; }
  double frequency(int idx) const {  // idx in [0, size())
    return static_cast<double>(idx - half_points) * spacing;
  }
};

// Stage-1 premap: observations of a non-sinusoidal periodic link are pushed
// through sin() so downstream stages see sinusoidal measurements; sinusoidal
// observations pass through unchanged. Aperiodic links are rejected.
Eigen::VectorXd premap_observations(const Eigen::VectorXd& y, const LinkSpec& link);

// Matched-filter estimate of a single tone frequency z from samples
// u_j ~ sin(z * d_j): returns the grid frequency whose unit-normalized
// template sin(omega * d) has the largest correlation with u. Templates with
// zero norm (omega = 0) score 0 by convention. Ties prefer the smaller |omega|,
// then the negative sign. If `peak` is non-null it receives the winning
// normalized correlation.
double estimate_tone(const Eigen::VectorXd& u, const Eigen::VectorXd& d,
                     const ToneGrid& grid, double* peak = nullptr);

// Per-coordinate tone estimation across the factored design: coordinate l
// collects the strided samples y[l], y[q+l], ..., y[(k-1)q+l] and the
// matching diagonal entries of D. Returns z_hat of length q; optionally the
// per-coordinate correlation peaks and the count of estimates that landed on
// the grid boundary (suspected range violations).
Eigen::VectorXd estimate_z(const Eigen::VectorXd& y_mapped,
                           const DesignOperator& design, const ToneGrid& grid,
                           Eigen::VectorXd* peak_correlation = nullptr,
                           int* range_violations = nullptr);

// The full periodic pipeline: premap, per-coordinate tone estimation, then
// hard-thresholded demixing of z_hat = B beta with the identity link.
// `truth`, when supplied, only feeds the error trace of the final stage.
SolveResult mf_struct_dht(const Eigen::VectorXd& y, const DesignOperator& design,
                          const BasisPair& bases, const LinkSpec& link,
                          const ToneGrid& grid, const SolverParams& params,
                          const StackedCoefficients* truth = nullptr);

}  // namespace demix
