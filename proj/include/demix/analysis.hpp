#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "demix/model_core.hpp"

namespace demix {

// Extremal restricted-Hessian eigenvalues observed while sampling supports
// and probe points at a given total sparsity level.
struct SpectralEstimate {
  int level = 0;
  double m_hat = 0.0;  // smallest observed restricted eigenvalue (clamped at 0)
  double M_hat = 0.0;  // largest observed restricted eigenvalue
  int trials = 0;
  std::string points;  // how the probe points were chosen
};

// (1/m) (X Gamma)_xi^T diag(g'(X Gamma t)) (X Gamma)_xi, symmetrized against
// round-off. xi indexes columns of Gamma, i.e. lives in [0, 2n).
Eigen::MatrixXd restricted_hessian(const StackedCoefficients& t,
                                   const std::vector<int>& xi,
                                   const SuperpositionInstance& inst,
                                   const BasisPair& bases, const LinkSpec& link);

// Samples supports (unions of two block-sparse draws at the requested total
// level) and feasible probe points, recording the extremal eigenvalues of
// the restricted Hessian. The returned bounds are inner estimates: the true
// smallest eigenvalue at this level is <= m_hat and the true largest is
// >= M_hat. The probe set always includes the origin and, when the instance
// carries it, the true stacked coefficients.
SpectralEstimate estimate_srsc_srss(const SuperpositionInstance& inst,
                                    const BasisPair& bases, const LinkSpec& link,
                                    int level, int trials, std::uint64_t seed);

// Fast inner estimate of the restricted curvature via Rayleigh quotients
// along random feasible stacked directions, evaluated at the origin. Returns
// (min, max) observed; used to auto-select solver step sizes.
std::pair<double, double> curvature_probe(const SuperpositionInstance& inst,
                                          const BasisPair& bases,
                                          const LinkSpec& link, int s, int b,
                                          int probes, std::uint64_t seed);

// Power-iteration estimate of the largest eigenvalue of the full
// (unrestricted) Hessian at the origin; the Lipschitz constant that
// shrinkage-based solvers need for a safe step.
double full_curvature(const SuperpositionInstance& inst, const BasisPair& bases,
                      const LinkSpec& link, int iters, std::uint64_t seed);

struct StepSizeWindow {
  double lower = 0.0;
  double upper = 0.0;
  bool condition_ok = false;  // M_hat / m_hat <= 2/sqrt(3)
};

// (0.5 / M_hat, 1.5 / m_hat); DomainError when m_hat <= 0.
StepSizeWindow step_size_window(double m_hat, double M_hat);

// rho = 2 * sqrt(1 + eta'^2 M^2 - 2 eta' m); DomainError on a negative
// radicand (only possible for m > M).
double theoretical_rate(double eta_prime, double m_hat, double M_hat);

// Per-iteration contraction ratio fitted to an error trace: least-squares
// slope of log(error) over the tail (first 20% of iterations discarded),
// exponentiated. A trace that reaches exactly zero is truncated there and
// fitted on the positive prefix.
double empirical_rate(const std::vector<double>& error_trace);

}  // namespace demix
