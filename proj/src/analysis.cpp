#include "demix/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "demix/errors.hpp"

namespace demix {

Eigen::MatrixXd restricted_hessian(const StackedCoefficients& t,
                                   const std::vector<int>& xi,
                                   const SuperpositionInstance& inst,
                                   const BasisPair& bases, const LinkSpec& link) {
  const int n = inst.config.n;
  const int m = inst.config.m;
  for (int j : xi) {
    if (j < 0 || j >= 2 * n) {
      throw ConfigError("restricted_hessian: support index out of [0, 2n)");
    }
  }
  const Eigen::VectorXd w = inst.design.apply(bases.gamma_apply(t.t));
  const Eigen::VectorXd weights = eval_link(link, LinkMode::derivative, w);

  Eigen::MatrixXd cols(m, xi.size());
  for (std::size_t j = 0; j < xi.size(); ++j) {
    cols.col(j) = inst.design.apply(bases.gamma_column(xi[j]));
  }
  Eigen::MatrixXd h = cols.transpose() * weights.asDiagonal() * cols /
                      static_cast<double>(m);
  return 0.5 * (h + h.transpose());
}

namespace {

// Support of a block-sparse draw over R^{2n}: `half_level` coordinates
// arranged in half_level/b blocks, chosen uniformly among all 2n/b blocks.
std::vector<int> random_stacked_support(rng::Engine& eng, int two_n, int half_level,
                                        int b) {
  const std::vector<int> blocks =
      rng::sample_indices(eng, two_n / b, half_level / b);
  std::vector<int> support;
  support.reserve(half_level);
  for (int blk : blocks) {
    for (int i = 0; i < b; ++i) support.push_back(blk * b + i);
  }
  return support;
}

std::vector<int> union_sorted(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

// Extremal eigenvalues: full symmetric eigendecomposition up to 512x512,
// power iteration (and a spectral-shift pass for the low end) above.
std::pair<double, double> extremal_eigs(const Eigen::MatrixXd& h,
                                        rng::Engine& eng) {
  const Eigen::Index d = h.rows();
  if (d <= 512) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h,
                                                      Eigen::EigenvaluesOnly);
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
  }
  const auto power = [&](const Eigen::MatrixXd& a) {
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = rng::normal(eng);
    v.normalize();
    double lambda = 0.0;
    for (int iter = 0; iter < 300; ++iter) {
      Eigen::VectorXd w = a * v;
      const double next = v.dot(w);
      const double norm = w.norm();
      if (norm < 1e-300) return 0.0;
      v = w / norm;
      if (std::abs(next - lambda) <= 1e-10 * std::max(1.0, std::abs(next))) {
        return next;
      }
      lambda = next;
    }
    return lambda;
  };
  // ||h|| first, then the smallest eigenvalue via the shifted complement.
  const double top = power(h);
  const double shift = std::max(top, 0.0);
  const Eigen::MatrixXd shifted =
      Eigen::MatrixXd::Identity(d, d) * shift - h;
  const double low = shift - power(shifted);
  return {low, std::max(top, low)};
}

}  // namespace

SpectralEstimate estimate_srsc_srss(const SuperpositionInstance& inst,
                                    const BasisPair& bases, const LinkSpec& link,
                                    int level, int trials, std::uint64_t seed) {
  const int n = inst.config.n;
  const int b = inst.config.b;
  if (trials < 1) throw ConfigError("estimate_srsc_srss: trials must be >= 1");
  if (level < 2 || level > 2 * n) {
    throw ConfigError("estimate_srsc_srss: level must lie in [2, 2n]");
  }
  const int half = level / 2;
  if (half % b != 0) {
    throw ConfigError("estimate_srsc_srss: level/2 must be a multiple of b");
  }

  rng::Engine eng = rng::make_engine(rng::derive(seed, "srsc"));
  SpectralEstimate est;
  est.level = level;
  est.trials = trials;
  est.points = "origin + ground truth + unit-norm feasible draws";
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  for (int trial = 0; trial < trials; ++trial) {
    const std::vector<int> xi =
        union_sorted(random_stacked_support(eng, 2 * n, half, b),
                     random_stacked_support(eng, 2 * n, half, b));

    StackedCoefficients t;
    if (trial == 0) {
      t = StackedCoefficients(Eigen::VectorXd::Zero(2 * n));
    } else if (trial == 1 && inst.theta_true.has_value()) {
      t = *inst.theta_true;
    } else {
      const BlockSparseVector t1 =
          make_block_sparse(n, inst.config.s, inst.config.b, eng);
      const BlockSparseVector t2 =
          make_block_sparse(n, inst.config.s, inst.config.b, eng);
      t = StackedCoefficients::from_halves(t1.values, t2.values);
      t.t /= t.t.norm();
    }

    const auto [emin, emax] = extremal_eigs(
        restricted_hessian(t, xi, inst, bases, link), eng);
    lo = std::min(lo, emin);
    hi = std::max(hi, emax);
  }
  est.m_hat = std::max(0.0, lo);
  est.M_hat = std::max(est.m_hat, hi);
  return est;
}

std::pair<double, double> curvature_probe(const SuperpositionInstance& inst,
                                          const BasisPair& bases,
                                          const LinkSpec& link, int s, int b,
                                          int probes, std::uint64_t seed) {
  const int n = inst.config.n;
  const double m = static_cast<double>(inst.config.m);
  if (probes < 1) throw ConfigError("curvature_probe: probes must be >= 1");
  // Directions live at the iterate-difference level: halves that are
  // (2s, b) block sparse, capped at the ambient dimension.
  int level = std::min(2 * s, n);
  level -= level % b;
  if (level <= 0) level = std::min(s, n);

  const double w0 = link.g_prime(0.0);
  rng::Engine eng = rng::make_engine(rng::derive(seed, "curvature-probe"));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int p = 0; p < probes; ++p) {
    const BlockSparseVector v1 = make_block_sparse(n, level, b, eng);
    const BlockSparseVector v2 = make_block_sparse(n, level, b, eng);
    Eigen::VectorXd v = StackedCoefficients::from_halves(v1.values, v2.values).t;
    v /= v.norm();
    const Eigen::VectorXd xv = inst.design.apply(bases.gamma_apply(v));
    const double quotient = w0 * xv.squaredNorm() / m;
    lo = std::min(lo, quotient);
    hi = std::max(hi, quotient);
  }
  return {lo, hi};
}

double full_curvature(const SuperpositionInstance& inst, const BasisPair& bases,
                      const LinkSpec& link, int iters, std::uint64_t seed) {
  const int n = inst.config.n;
  const double m = static_cast<double>(inst.config.m);
  const double w0 = link.g_prime(0.0);
  rng::Engine eng = rng::make_engine(rng::derive(seed, "full-curvature"));
  Eigen::VectorXd v(2 * n);
  for (int i = 0; i < 2 * n; ++i) v[i] = rng::normal(eng);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    const Eigen::VectorXd xv = inst.design.apply(bases.gamma_apply(v));
    const Eigen::VectorXd w =
        bases.gamma_adjoint(inst.design.apply_adjoint(xv)) * (w0 / m);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm < 1e-300) return 0.0;
    v = w / norm;
    if (std::abs(next - lambda) <= 1e-6 * std::max(1.0, std::abs(next))) {
      return next;
    }
    lambda = next;
  }
  return lambda;
}

StepSizeWindow step_size_window(double m_hat, double M_hat) {
  if (!(m_hat > 0.0)) {
    throw DomainError("step_size_window: degenerate curvature (m_hat <= 0)");
  }
  if (M_hat < m_hat) throw DomainError("step_size_window: M_hat < m_hat");
  StepSizeWindow w;
  w.lower = 0.5 / M_hat;
  w.upper = 1.5 / m_hat;
  w.condition_ok = (M_hat / m_hat) <= 2.0 / std::sqrt(3.0);
  return w;
}

double theoretical_rate(double eta_prime, double m_hat, double M_hat) {
  const double radicand =
      1.0 + eta_prime * eta_prime * M_hat * M_hat - 2.0 * eta_prime * m_hat;
  if (radicand < 0.0) {
    throw DomainError("theoretical_rate: negative radicand for (eta'=" +
                      std::to_string(eta_prime) + ", m=" + std::to_string(m_hat) +
                      ", M=" + std::to_string(M_hat) + ")");
  }
  return 2.0 * std::sqrt(radicand);
}

double empirical_rate(const std::vector<double>& error_trace) {
  if (error_trace.size() < 5) {
    throw ConfigError("empirical_rate: need a trace of length >= 5");
  }
  // Truncate at the first exact zero: converged exactly there.
  std::size_t len = error_trace.size();
  for (std::size_t i = 0; i < error_trace.size(); ++i) {
    const double e = error_trace[i];
    if (e < 0.0 || !std::isfinite(e)) {
      throw DomainError("empirical_rate: trace entries must be finite and >= 0");
    }
    if (e == 0.0) {
      len = i;
      break;
    }
  }
  if (len < 2) return 0.0;  // immediate exact convergence

  std::size_t start = static_cast<std::size_t>(0.2 * static_cast<double>(len));
  if (len - start < 2) start = len - 2;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double count = static_cast<double>(len - start);
  for (std::size_t i = start; i < len; ++i) {
    const double x = static_cast<double>(i);
    const double y = std::log(error_trace[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) return 1.0;
  const double slope = (count * sxy - sx * sy) / denom;
  return std::exp(slope);
}

}  // namespace demix
