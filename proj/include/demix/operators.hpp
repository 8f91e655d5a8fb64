#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>

namespace demix {

enum class BasisKind { identity, dct, random_orthonormal, explicit_dense };
enum class SubgaussianFamily { gaussian, rademacher };

std::string to_string(BasisKind kind);
BasisKind basis_kind_from_string(std::string_view name);
std::string to_string(SubgaussianFamily family);
SubgaussianFamily family_from_string(std::string_view name);

// An n x n orthonormal matrix, stored implicitly when a fast apply exists.
// identity and dct never materialize; dct applies run through FFTW in
// O(n log n). Construction is cheap; applies are pure and thread-safe.
class Orthobasis {
 public:
  Orthobasis() = default;

  static Orthobasis identity(int n);
  static Orthobasis dct(int n);
  static Orthobasis random_orthonormal(int n, std::uint64_t seed);
  // Wraps an explicit matrix; the caller vouches for orthonormality.
  static Orthobasis from_dense(Eigen::MatrixXd q);

  int dim() const { return n_; }
  BasisKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;          // Q x
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& x) const;  // Q^T x

  // Column j = Q e_j, without materializing the full matrix.
  Eigen::VectorXd column(int j) const;

  // Explicit matrix; intended for small n (tests, diagnostics).
  Eigen::MatrixXd materialize() const;

 private:
  BasisKind kind_ = BasisKind::identity;
  int n_ = 0;
  std::uint64_t seed_ = 0;
  Eigen::MatrixXd q_;  // explicit forms only
};

Orthobasis gen_orthobasis(int n, BasisKind kind, std::uint64_t seed);

// The pair (Phi, Psi) and the implied concatenation Gamma = [Phi Psi].
struct BasisPair {
  Orthobasis phi;
  Orthobasis psi;

  int dim() const { return phi.dim(); }

  // Gamma t = Phi t1 + Psi t2 for a stacked t in R^{2n}.
  Eigen::VectorXd gamma_apply(const Eigen::VectorXd& t) const;
  // Gamma^T a = [Phi^T a; Psi^T a] in R^{2n}.
  Eigen::VectorXd gamma_adjoint(const Eigen::VectorXd& a) const;
  // Column j of Gamma, j in [0, 2n).
  Eigen::VectorXd gamma_column(int j) const;
};

// The measurement operator: either a dense m x n matrix X, or the factored
// form X = D B where D stacks k diagonal q x q blocks and B is q x n.
class DesignOperator {
 public:
  enum class Form { dense, factored };

  DesignOperator() = default;

  static DesignOperator from_matrix(Eigen::MatrixXd x);

  Form form() const { return form_; }
  int rows() const { return m_; }
  int cols() const { return n_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;          // X v
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& r) const;  // X^T r

  Eigen::MatrixXd materialize() const;

  // Factored accessors; throw ConfigError when the form is dense.
  const Eigen::MatrixXd& b_matrix() const;
  // Row r holds the diagonal of block r (k rows of length q).
  const Eigen::MatrixXd& diagonals() const;
  int blocks() const { return k_; }
  int inner_dim() const { return q_; }
  double diag_bound() const { return diag_bound_; }

  // Generation metadata, echoed into serialized descriptors.
  const std::string& family_name() const { return family_name_; }
  double scale() const { return scale_; }
  std::uint64_t seed() const { return seed_; }
  double b_norm_exponent() const { return b_norm_exponent_; }

  friend DesignOperator gen_subgaussian(int m, int n, SubgaussianFamily family,
                                        double scale, std::uint64_t seed);
  friend DesignOperator gen_factored(int k, int q, int n, double T,
                                     SubgaussianFamily family, std::uint64_t seed,
                                     double b_norm_exponent);

 private:
  Form form_ = Form::dense;
  int m_ = 0, n_ = 0, k_ = 0, q_ = 0;
  Eigen::MatrixXd x_;      // dense form
  Eigen::MatrixXd diag_;   // factored: k x q
  Eigen::MatrixXd b_;      // factored: q x n
  double diag_bound_ = 0.0;
  std::string family_name_ = "explicit";
  double scale_ = 1.0;
  std::uint64_t seed_ = 0;
  double b_norm_exponent_ = 0.5;
};

// Dense design with i.i.d. entries from the family, multiplied by scale.
// scale = 1/sqrt(m) keeps the restricted isometry constants near 1.
DesignOperator gen_subgaussian(int m, int n, SubgaussianFamily family,
                               double scale, std::uint64_t seed);

// Factored design: the k*q diagonal entries of D are i.i.d. Uniform[-T, T];
// B is q x n subgaussian with entries scaled by q^-b_norm_exponent, so the
// default 0.5 preserves ||B beta|| ~ ||beta||.
DesignOperator gen_factored(int k, int q, int n, double T,
                            SubgaussianFamily family, std::uint64_t seed,
                            double b_norm_exponent = 0.5);

// min(1, s * mu) with mu the largest |<phi_i, psi_j>|; upper-bounds the
// s-sparse incoherence between the pair.
double incoherence_upper_bound(const BasisPair& bases, int s);

// Monte-Carlo lower bound on the s-sparse incoherence: samples support
// pairs, measures the top singular value of the corresponding cross-Gram
// submatrix by power iteration, and keeps the max. The first trial probes
// a shared support and every trial is scored in both (S,T) orders, so the
// estimate is symmetric in the two bases under a matched seed.
double incoherence_estimate(const BasisPair& bases, int s, int trials,
                            std::uint64_t seed);

}  // namespace demix
