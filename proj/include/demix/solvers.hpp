#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include "demix/model_core.hpp"

namespace demix {

// Which constraint set the hard-thresholding step projects onto.
struct SparsityModel {
  enum class Kind { block, plain };
  Kind kind = Kind::block;
  int s = 0;
  int b = 1;

  static SparsityModel block(int s, int b) { return {Kind::block, s, b}; }
  static SparsityModel plain(int s) { return {Kind::plain, s, 1}; }
};

struct SolverParams {
  // Step size; any value <= 0 means "pick automatically" from a curvature
  // probe of the instance (1 / (2 * max observed restricted curvature)).
  double eta_prime = 0.0;
  int max_iters = 500;
  double tol = 1e-7;  // relative iterate change that stops the loop
  SparsityModel sparsity;
  double lambda = 0.0;  // soft-threshold level (dst only)
  bool trace = false;   // record the per-iteration error/loss trace
  enum class Init { random, zero };
  Init init = Init::random;
  std::uint64_t init_seed = 0;

  void validate() const;
};

// Tone-estimation diagnostics attached by the periodic pipeline.
struct ToneDiagnostics {
  Eigen::VectorXd z_hat;
  Eigen::VectorXd peak_correlation;
  int range_violations = 0;
};

struct SolveResult {
  Eigen::VectorXd theta1_hat;
  Eigen::VectorXd theta2_hat;
  Eigen::VectorXd beta_hat;
  int iterations = 0;
  // trace[k] is the state after k iterations: ||t^k - theta||_2 when the
  // instance carries ground truth (trace_is_error), else the loss value.
  std::vector<double> error_trace;
  bool trace_is_error = false;
  // dst returns unconstrained supports; hard-thresholding solvers always
  // satisfy their declared sparsity model.
  bool sparsity_enforced = true;
  double eta_prime_used = 0.0;
  std::optional<ToneDiagnostics> tone;
};

double soft_threshold(double x, double tau);

// Euclidean projection onto vectors with at most s/b active length-b blocks:
// keeps the s/b blocks of largest energy, zeroing the rest. Energy ties go
// to the lower block index.
BlockSparseVector project_block_sparse(const Eigen::VectorXd& v, int s, int b);

// Top-s magnitude selection (ties to the lower index); the b = 1 block model.
Eigen::VectorXd project_plain(const Eigen::VectorXd& v, int s);

// Applies project_block_sparse to each half of a stacked vector.
StackedCoefficients project_stacked(const Eigen::VectorXd& t, int s, int b);

// F(t) = (1/m) * sum_i Theta(x_i^T Gamma t) - y_i x_i^T Gamma t.
double loss_value(const StackedCoefficients& t, const SuperpositionInstance& inst,
                  const BasisPair& bases, const LinkSpec& link);

// grad F(t) = (1/m) * Gamma^T X^T (g(X Gamma t) - y), assembled as the two
// stacked half-gradients.
Eigen::VectorXd loss_gradient(const StackedCoefficients& t,
                              const SuperpositionInstance& inst,
                              const BasisPair& bases, const LinkSpec& link);

// Projected gradient descent on the loss with hard thresholding onto the
// declared sparsity model. Rejects periodic links; those go through the
// matched-filter pipeline.
SolveResult struct_dht(const SuperpositionInstance& inst, const BasisPair& bases,
                       const LinkSpec& link, const SolverParams& params);

// Iterative soft-thresholding baseline: t <- shrink(t - eta' grad, eta' * lambda).
// The result's support is not forced onto the block model.
SolveResult dst(const SuperpositionInstance& inst, const BasisPair& bases,
                const LinkSpec& link, const SolverParams& params);

}  // namespace demix
