#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "demix/links.hpp"
#include "demix/operators.hpp"
#include "demix/rng.hpp"

namespace demix {

// Problem dimensions shared by synthesis, solvers, and experiments.
struct SignalConfig {
  int n = 0;  // ambient dimension
  int s = 0;  // total sparsity per component
  int b = 0;  // block length
  int m = 0;  // number of observations
  int q = 0;  // factored designs: inner dimension (0 = dense design)
  int k = 0;  // factored designs: number of diagonal blocks
  double noise_sigma = 0.0;

  bool factored() const { return q > 0 || k > 0; }

  // Throws ConfigError unless b | s, b | n, s <= n, noise_sigma >= 0 and,
  // for factored designs, m == k * q.
  void validate() const;
};

// A length-n vector with at most s/b active contiguous blocks of length b.
struct BlockSparseVector {
  Eigen::VectorXd values;
  std::vector<int> block_support;  // ascending block indices
};

// Block indices in {0, ..., n/b - 1} holding at least one nonzero of v.
std::vector<int> active_blocks(const Eigen::VectorXd& v, int b);

// True iff v has at most s/b active blocks of length b (and b | s, b | n).
bool satisfies_block_model(const Eigen::VectorXd& v, int s, int b);

// The stacked vector t = [theta1; theta2] in R^{2n}.
struct StackedCoefficients {
  Eigen::VectorXd t;

  StackedCoefficients() = default;
  explicit StackedCoefficients(Eigen::VectorXd stacked) : t(std::move(stacked)) {}
  static StackedCoefficients from_halves(const Eigen::VectorXd& theta1,
                                         const Eigen::VectorXd& theta2);

  int half_dim() const { return static_cast<int>(t.size()) / 2; }
  Eigen::VectorXd theta1() const { return t.head(half_dim()); }
  Eigen::VectorXd theta2() const { return t.tail(half_dim()); }
};

// One synthetic problem: y = g(X beta) + e with beta = Phi theta1 + Psi theta2.
struct SuperpositionInstance {
  SignalConfig config;
  std::optional<StackedCoefficients> theta_true;
  Eigen::VectorXd beta;  // n (empty when no ground truth is attached)
  Eigen::VectorXd y;     // m
  Eigen::VectorXd e;     // m
  DesignOperator design;
  std::string link_name;
  std::uint64_t seed = 0;
};

// Exactly s/b distinct blocks chosen uniformly at random, nonzeros drawn
// standard normal, then the whole vector scaled to unit Euclidean norm.
BlockSparseVector make_block_sparse(int n, int s, int b, rng::Engine& eng);
BlockSparseVector make_block_sparse(int n, int s, int b, std::uint64_t seed);

// Draws theta1, theta2, forms beta, and applies the observation model.
// All randomness comes from named substreams of `seed` ("theta1", "theta2",
// "noise"), so identical seeds give bitwise-identical instances.
SuperpositionInstance synthesize_instance(const SignalConfig& config,
                                          const BasisPair& bases,
                                          DesignOperator design,
                                          const LinkSpec& link,
                                          std::uint64_t seed);

// ||estimate - truth||_2 / ||truth||_2; DomainError when ||truth|| = 0.
double normalized_error(const Eigen::VectorXd& estimate,
                        const Eigen::VectorXd& truth);

}  // namespace demix
