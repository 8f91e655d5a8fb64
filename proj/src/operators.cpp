#include "demix/operators.hpp"

#include <fftw3.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "demix/errors.hpp"
#include "demix/rng.hpp"

namespace demix {

namespace {

// FFTW plan creation is not thread-safe; executions on fresh buffers are.
// Plans are cached per (n, kind) for the lifetime of the process. Planning
// buffers are fftw-allocated, as are the per-call buffers, so the alignment
// class of the new-array execute always matches the plan.
fftw_plan dct_plan(int n, fftw_r2r_kind kind) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_pair(n, static_cast<int>(kind));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  double* in = fftw_alloc_real(n);
  double* out = fftw_alloc_real(n);
  fftw_plan plan = fftw_plan_r2r_1d(n, in, out, kind, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  if (plan == nullptr) throw NumericalError("FFTW failed to create a DCT plan");
  cache.emplace(key, plan);
  return plan;
}

Eigen::VectorXd run_r2r(int n, fftw_r2r_kind kind, const Eigen::VectorXd& x) {
  fftw_plan plan = dct_plan(n, kind);
  double* in = fftw_alloc_real(n);
  double* out = fftw_alloc_real(n);
  Eigen::Map<Eigen::VectorXd>(in, n) = x;
  fftw_execute_r2r(plan, in, out);
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(out, n);
  fftw_free(in);
  fftw_free(out);
  return y;
}

// Orthonormal DCT-II: C_kj = a_k cos(pi (j + 1/2) k / n), a_0 = sqrt(1/n),
// a_k = sqrt(2/n) otherwise. FFTW's REDFT10 returns 2x the unscaled sums,
// and REDFT01 inverts it given halved inputs past index 0.
Eigen::VectorXd dct_apply(int n, const Eigen::VectorXd& x) {
  Eigen::VectorXd y = run_r2r(n, FFTW_REDFT10, x);
  y *= 0.5 * std::sqrt(2.0 / n);
  y[0] /= std::numbers::sqrt2_v<double>;
  return y;
}

Eigen::VectorXd dct_adjoint(int n, const Eigen::VectorXd& z) {
  Eigen::VectorXd w = z;
  const double a = std::sqrt(2.0 / n);
  w *= 0.5 * a;
  w[0] = z[0] * std::sqrt(1.0 / n);
  return run_r2r(n, FFTW_REDFT01, w);
}

}  // namespace

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::identity: return "identity";
    case BasisKind::dct: return "dct";
    case BasisKind::random_orthonormal: return "random-orthonormal";
    case BasisKind::explicit_dense: return "explicit";
  }
  return "?";
}

BasisKind basis_kind_from_string(std::string_view name) {
  if (name == "identity") return BasisKind::identity;
  if (name == "dct" || name == "dct-like") return BasisKind::dct;
  if (name == "random-orthonormal" || name == "random") {
    return BasisKind::random_orthonormal;
  }
  if (name == "explicit") return BasisKind::explicit_dense;
  throw ConfigError("unknown basis kind: \"" + std::string(name) + "\"");
}

std::string to_string(SubgaussianFamily family) {
  return family == SubgaussianFamily::gaussian ? "gaussian" : "rademacher";
}

SubgaussianFamily family_from_string(std::string_view name) {
  if (name == "gaussian") return SubgaussianFamily::gaussian;
  if (name == "rademacher") return SubgaussianFamily::rademacher;
  throw ConfigError("unknown subgaussian family: \"" + std::string(name) + "\"");
}

Orthobasis Orthobasis::identity(int n) {
  if (n < 1) throw ConfigError("Orthobasis: n must be positive");
  Orthobasis b;
  b.kind_ = BasisKind::identity;
  b.n_ = n;
  return b;
}

Orthobasis Orthobasis::dct(int n) {
  if (n < 1) throw ConfigError("Orthobasis: n must be positive");
  Orthobasis b;
  b.kind_ = BasisKind::dct;
  b.n_ = n;
  return b;
}

Orthobasis Orthobasis::random_orthonormal(int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("Orthobasis: n must be positive");
  rng::Engine eng = rng::make_engine(rng::derive(seed, "orthobasis"));
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) g(i, j) = rng::normal(eng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  // Fix the column signs so the factorization is unique.
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  Orthobasis b;
  b.kind_ = BasisKind::random_orthonormal;
  b.n_ = n;
  b.seed_ = seed;
  b.q_ = std::move(q);
  return b;
}

Orthobasis Orthobasis::from_dense(Eigen::MatrixXd q) {
  if (q.rows() != q.cols() || q.rows() < 1) {
    throw ConfigError("Orthobasis::from_dense: matrix must be square");
  }
  Orthobasis b;
  b.kind_ = BasisKind::explicit_dense;
  b.n_ = static_cast<int>(q.rows());
  b.q_ = std::move(q);
  return b;
}

Eigen::VectorXd Orthobasis::apply(const Eigen::VectorXd& x) const {
  if (x.size() != n_) throw ConfigError("Orthobasis::apply: dimension mismatch");
  switch (kind_) {
    case BasisKind::identity: return x;
    case BasisKind::dct: return dct_apply(n_, x);
    default: return q_ * x;
  }
}

Eigen::VectorXd Orthobasis::apply_adjoint(const Eigen::VectorXd& x) const {
  if (x.size() != n_) {
    throw ConfigError("Orthobasis::apply_adjoint: dimension mismatch");
  }
  switch (kind_) {
    case BasisKind::identity: return x;
    case BasisKind::dct: return dct_adjoint(n_, x);
    default: return q_.transpose() * x;
  }
}

Eigen::VectorXd Orthobasis::column(int j) const {
  if (j < 0 || j >= n_) throw ConfigError("Orthobasis::column: index out of range");
  switch (kind_) {
    case BasisKind::identity: {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
      e[j] = 1.0;
      return e;
    }
    case BasisKind::dct: {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
      e[j] = 1.0;
      return dct_apply(n_, e);
    }
    default: return q_.col(j);
  }
}

Eigen::MatrixXd Orthobasis::materialize() const {
  switch (kind_) {
    case BasisKind::identity: return Eigen::MatrixXd::Identity(n_, n_);
    case BasisKind::dct: {
      Eigen::MatrixXd q(n_, n_);
      for (int j = 0; j < n_; ++j) q.col(j) = column(j);
      return q;
    }
    default: return q_;
  }
}

Orthobasis gen_orthobasis(int n, BasisKind kind, std::uint64_t seed) {
  switch (kind) {
    case BasisKind::identity: return Orthobasis::identity(n);
    case BasisKind::dct: return Orthobasis::dct(n);
    case BasisKind::random_orthonormal: return Orthobasis::random_orthonormal(n, seed);
    case BasisKind::explicit_dense:
      throw ConfigError("gen_orthobasis: explicit bases come from from_dense()");
  }
  throw ConfigError("gen_orthobasis: bad kind");
}

Eigen::VectorXd BasisPair::gamma_apply(const Eigen::VectorXd& t) const {
  const int n = dim();
  if (t.size() != 2 * n) throw ConfigError("gamma_apply: expected a stacked 2n vector");
  return phi.apply(t.head(n)) + psi.apply(t.tail(n));
}

Eigen::VectorXd BasisPair::gamma_adjoint(const Eigen::VectorXd& a) const {
  const int n = dim();
  if (a.size() != n) throw ConfigError("gamma_adjoint: dimension mismatch");
  Eigen::VectorXd out(2 * n);
  out.head(n) = phi.apply_adjoint(a);
  out.tail(n) = psi.apply_adjoint(a);
  return out;
}

Eigen::VectorXd BasisPair::gamma_column(int j) const {
  const int n = dim();
  if (j < 0 || j >= 2 * n) throw ConfigError("gamma_column: index out of range");
  return j < n ? phi.column(j) : psi.column(j - n);
}

DesignOperator DesignOperator::from_matrix(Eigen::MatrixXd x) {
  DesignOperator d;
  d.form_ = Form::dense;
  d.m_ = static_cast<int>(x.rows());
  d.n_ = static_cast<int>(x.cols());
  d.x_ = std::move(x);
  d.family_name_ = "explicit";
  return d;
}

Eigen::VectorXd DesignOperator::apply(const Eigen::VectorXd& v) const {
  if (v.size() != n_) throw ConfigError("DesignOperator::apply: dimension mismatch");
  if (form_ == Form::dense) return x_ * v;
  const Eigen::VectorXd z = b_ * v;
  Eigen::VectorXd y(m_);
  for (int r = 0; r < k_; ++r) {
    y.segment(static_cast<Eigen::Index>(r) * q_, q_) =
        diag_.row(r).transpose().cwiseProduct(z);
  }
  return y;
}

Eigen::VectorXd DesignOperator::apply_adjoint(const Eigen::VectorXd& r) const {
  if (r.size() != m_) {
    throw ConfigError("DesignOperator::apply_adjoint: dimension mismatch");
  }
  if (form_ == Form::dense) return x_.transpose() * r;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(q_);
  for (int blk = 0; blk < k_; ++blk) {
    acc += diag_.row(blk).transpose().cwiseProduct(
        r.segment(static_cast<Eigen::Index>(blk) * q_, q_));
  }
  return b_.transpose() * acc;
}

Eigen::MatrixXd DesignOperator::materialize() const {
  if (form_ == Form::dense) return x_;
  Eigen::MatrixXd x(m_, n_);
  for (int r = 0; r < k_; ++r) {
    x.block(static_cast<Eigen::Index>(r) * q_, 0, q_, n_) =
        diag_.row(r).asDiagonal() * b_;
  }
  return x;
}

const Eigen::MatrixXd& DesignOperator::b_matrix() const {
  if (form_ != Form::factored) {
    throw ConfigError("DesignOperator::b_matrix: operator is not factored");
  }
  return b_;
}

const Eigen::MatrixXd& DesignOperator::diagonals() const {
  if (form_ != Form::factored) {
    throw ConfigError("DesignOperator::diagonals: operator is not factored");
  }
  return diag_;
}

namespace {

void fill_subgaussian(Eigen::MatrixXd& a, SubgaussianFamily family, double scale,
                      rng::Engine& eng) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (family == SubgaussianFamily::gaussian) {
        a(i, j) = scale * rng::normal(eng);
      } else {
        a(i, j) = rng::uniform_int(eng, 0, 1) == 0 ? -scale : scale;
      }
    }
  }
}

}  // namespace

DesignOperator gen_subgaussian(int m, int n, SubgaussianFamily family, double scale,
                               std::uint64_t seed) {
  if (m < 1 || n < 1) throw ConfigError("gen_subgaussian: m, n must be positive");
  DesignOperator d;
  d.form_ = DesignOperator::Form::dense;
  d.m_ = m;
  d.n_ = n;
  d.x_.resize(m, n);
  rng::Engine eng = rng::make_engine(rng::derive(seed, "design-dense"));
  fill_subgaussian(d.x_, family, scale, eng);
  d.family_name_ = to_string(family);
  d.scale_ = scale;
  d.seed_ = seed;
  return d;
}

DesignOperator gen_factored(int k, int q, int n, double T, SubgaussianFamily family,
                            std::uint64_t seed, double b_norm_exponent) {
  if (k < 1 || q < 1 || n < 1) {
    throw ConfigError("gen_factored: k, q, n must be positive");
  }
  if (T <= 0.0) throw ConfigError("gen_factored: T must be positive");
  DesignOperator d;
  d.form_ = DesignOperator::Form::factored;
  d.k_ = k;
  d.q_ = q;
  d.m_ = k * q;
  d.n_ = n;
  d.diag_bound_ = T;
  d.diag_.resize(k, q);
  rng::Engine deng = rng::make_engine(rng::derive(seed, "design-diag"));
  for (int r = 0; r < k; ++r) {
    for (int l = 0; l < q; ++l) d.diag_(r, l) = rng::uniform(deng, -T, T);
  }
  d.b_.resize(q, n);
  rng::Engine beng = rng::make_engine(rng::derive(seed, "design-b"));
  fill_subgaussian(d.b_, family, std::pow(static_cast<double>(q), -b_norm_exponent),
                   beng);
  d.family_name_ = to_string(family);
  d.scale_ = std::pow(static_cast<double>(q), -b_norm_exponent);
  d.seed_ = seed;
  d.b_norm_exponent_ = b_norm_exponent;
  return d;
}

double incoherence_upper_bound(const BasisPair& bases, int s) {
  const int n = bases.dim();
  if (s < 1 || s > n) throw ConfigError("incoherence_upper_bound: need 1 <= s <= n");
  double mu = 0.0;
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXd col = bases.phi.apply_adjoint(bases.psi.column(j));
    mu = std::max(mu, col.cwiseAbs().maxCoeff());
  }
  return std::min(1.0, static_cast<double>(s) * mu);
}

namespace {

// Largest singular value of M by power iteration on M^T M: tolerance 1e-8,
// at most 200 iterations, start vector drawn from the given engine.
double top_singular_value(const Eigen::MatrixXd& m, rng::Engine& eng) {
  const Eigen::Index d = m.cols();
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = rng::normal(eng);
  const double vnorm = v.norm();
  if (vnorm == 0.0) return 0.0;
  v /= vnorm;
  double lambda = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::VectorXd w = m.transpose() * (m * v);
    const double wnorm = w.norm();
    if (wnorm < 1e-300) return 0.0;
    const double next = v.dot(w);
    v = w / wnorm;
    if (std::abs(next - lambda) <= 1e-8 * std::max(1.0, std::abs(next))) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(0.0, lambda));
}

// Cross-Gram submatrix (Phi_S)^T (Psi_T), built one Psi column at a time.
Eigen::MatrixXd cross_gram(const Orthobasis& phi, const Orthobasis& psi,
                           const std::vector<int>& s_set,
                           const std::vector<int>& t_set) {
  Eigen::MatrixXd m(s_set.size(), t_set.size());
  for (std::size_t j = 0; j < t_set.size(); ++j) {
    const Eigen::VectorXd col = phi.apply_adjoint(psi.column(t_set[j]));
    for (std::size_t i = 0; i < s_set.size(); ++i) m(i, j) = col[s_set[i]];
  }
  return m;
}

}  // namespace

double incoherence_estimate(const BasisPair& bases, int s, int trials,
                            std::uint64_t seed) {
  const int n = bases.dim();
  if (s < 1 || s > n) throw ConfigError("incoherence_estimate: need 1 <= s <= n");
  if (trials < 1) throw ConfigError("incoherence_estimate: trials must be >= 1");
  rng::Engine sample_eng = rng::make_engine(rng::derive(seed, "incoherence-sets"));
  double best = 0.0;
  for (int t = 0; t < trials; ++t) {
    const std::vector<int> s_set = rng::sample_indices(sample_eng, n, s);
    const std::vector<int> t_set =
        t == 0 ? s_set : rng::sample_indices(sample_eng, n, s);
    rng::Engine pow_eng = rng::make_engine(rng::derive(seed, "incoherence-power",
                                                       static_cast<std::uint64_t>(t)));
    const double a = top_singular_value(cross_gram(bases.phi, bases.psi, s_set, t_set),
                                        pow_eng);
    const double b = top_singular_value(cross_gram(bases.phi, bases.psi, t_set, s_set),
                                        pow_eng);
    best = std::max(best, std::max(a, b));
  }
  return best;
}

}  // namespace demix
