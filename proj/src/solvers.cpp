#include "demix/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "demix/analysis.hpp"
#include "demix/errors.hpp"

namespace demix {

void SolverParams::validate() const {
  if (max_iters < 1) throw ConfigError("SolverParams: max_iters must be >= 1");
  if (tol < 0.0) throw ConfigError("SolverParams: tol must be >= 0");
  if (lambda < 0.0) throw ConfigError("SolverParams: lambda must be >= 0");
  if (sparsity.s < 1) throw ConfigError("SolverParams: sparsity level must be >= 1");
  if (sparsity.kind == SparsityModel::Kind::block && sparsity.b < 1) {
    throw ConfigError("SolverParams: block size must be >= 1");
  }
}

double soft_threshold(double x, double tau) {
  const double mag = std::fabs(x) - tau;
  if (mag <= 0.0) return 0.0;
  return x < 0.0 ? -mag : mag;
}

BlockSparseVector project_block_sparse(const Eigen::VectorXd& v, int s, int b) {
  const int n = static_cast<int>(v.size());
  if (b < 1 || s < 1) throw ConfigError("project_block_sparse: s, b must be positive");
  if (n % b != 0) throw ConfigError("project_block_sparse: b must divide n");
  if (s % b != 0) throw ConfigError("project_block_sparse: b must divide s");
  if (s > n) throw ConfigError("project_block_sparse: s must not exceed n");

  const int total_blocks = n / b;
  const int keep = s / b;
  std::vector<std::pair<double, int>> energy(total_blocks);
  for (int blk = 0; blk < total_blocks; ++blk) {
    energy[blk] = {v.segment(static_cast<Eigen::Index>(blk) * b, b).squaredNorm(), blk};
  }
  // Largest energy first; equal energies keep the lower block index.
  const auto better = [](const std::pair<double, int>& a,
                         const std::pair<double, int>& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  std::nth_element(energy.begin(), energy.begin() + (keep - 1), energy.end(), better);

  BlockSparseVector out;
  out.values = Eigen::VectorXd::Zero(n);
  out.block_support.reserve(keep);
  for (int i = 0; i < keep; ++i) out.block_support.push_back(energy[i].second);
  std::sort(out.block_support.begin(), out.block_support.end());
  for (int blk : out.block_support) {
    out.values.segment(static_cast<Eigen::Index>(blk) * b, b) =
        v.segment(static_cast<Eigen::Index>(blk) * b, b);
  }
  return out;
}

Eigen::VectorXd project_plain(const Eigen::VectorXd& v, int s) {
  const int n = static_cast<int>(v.size());
  if (s < 1) throw ConfigError("project_plain: s must be positive");
  if (s > n) throw ConfigError("project_plain: s must not exceed n");
  std::vector<std::pair<double, int>> mag(n);
  for (int i = 0; i < n; ++i) mag[i] = {std::fabs(v[i]), i};
  const auto better = [](const std::pair<double, int>& a,
                         const std::pair<double, int>& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  std::nth_element(mag.begin(), mag.begin() + (s - 1), mag.end(), better);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < s; ++i) out[mag[i].second] = v[mag[i].second];
  return out;
}

StackedCoefficients project_stacked(const Eigen::VectorXd& t, int s, int b) {
  if (t.size() % 2 != 0) throw ConfigError("project_stacked: expected a 2n vector");
  const int n = static_cast<int>(t.size()) / 2;
  return StackedCoefficients::from_halves(project_block_sparse(t.head(n), s, b).values,
                                          project_block_sparse(t.tail(n), s, b).values);
}

double loss_value(const StackedCoefficients& t, const SuperpositionInstance& inst,
                  const BasisPair& bases, const LinkSpec& link) {
  if (!link.antiderivative) {
    throw UnsupportedLinkError("loss_value: link \"" + link.name +
                               "\" has no antiderivative");
  }
  const Eigen::VectorXd w = inst.design.apply(bases.gamma_apply(t.t));
  const Eigen::VectorXd theta = eval_link(link, LinkMode::antiderivative, w);
  const double m = static_cast<double>(inst.config.m);
  return (theta.sum() - inst.y.dot(w)) / m;
}

Eigen::VectorXd loss_gradient(const StackedCoefficients& t,
                              const SuperpositionInstance& inst,
                              const BasisPair& bases, const LinkSpec& link) {
  const Eigen::VectorXd w = inst.design.apply(bases.gamma_apply(t.t));
  const Eigen::VectorXd residual = eval_link(link, LinkMode::value, w) - inst.y;
  const double m = static_cast<double>(inst.config.m);
  return bases.gamma_adjoint(inst.design.apply_adjoint(residual) / m);
}

namespace {

using UpdateRule = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;

// How the descent loop picks its step when the caller left eta_prime at the
// auto sentinel. Hard-thresholding solvers use the steepest-descent step of
// the local quadratic model restricted to the active support; shrinkage
// needs a global Lipschitz bound instead.
enum class StepPolicy { fixed, restricted_steepest };

// Shared descent loop. `update(v, eta)` maps the gradient step to the next
// iterate (hard projection or soft shrinkage).
SolveResult descend(const SuperpositionInstance& inst, const BasisPair& bases,
                    const LinkSpec& link, const SolverParams& params,
                    const UpdateRule& update, bool sparsity_enforced,
                    StepPolicy policy) {
  const int n = inst.config.n;
  const double m = static_cast<double>(inst.config.m);
  if (static_cast<int>(inst.y.size()) != inst.config.m) {
    throw ConfigError("solver: observation length does not match config.m");
  }

  const bool adaptive = params.eta_prime <= 0.0 &&
                        policy == StepPolicy::restricted_steepest;
  double eta = params.eta_prime;
  if (params.eta_prime <= 0.0 && !adaptive) {
    const double lip = full_curvature(inst, bases, link, /*iters=*/60,
                                      rng::derive(params.init_seed, "step-probe"));
    eta = lip > 0.0 ? 1.0 / lip : 0.5;
  }

  SolveResult res;
  res.sparsity_enforced = sparsity_enforced;
  res.trace_is_error = inst.theta_true.has_value();

  Eigen::VectorXd t;
  if (params.init == SolverParams::Init::zero) {
    t = Eigen::VectorXd::Zero(2 * n);
  } else {
    rng::Engine eng = rng::make_engine(rng::derive(params.init_seed, "solver-init"));
    t.resize(2 * n);
    for (int i = 0; i < 2 * n; ++i) t[i] = rng::normal(eng);
    t = update(t, adaptive ? 1.0 : eta);
    const double norm = t.norm();
    if (norm > 0.0) t /= norm;
  }

  const auto record = [&](const Eigen::VectorXd& iterate) {
    if (!params.trace) return;
    if (res.trace_is_error) {
      res.error_trace.push_back((iterate - inst.theta_true->t).norm());
    } else {
      res.error_trace.push_back(
          loss_value(StackedCoefficients(iterate), inst, bases, link));
    }
  };
  record(t);

  for (int iter = 0; iter < params.max_iters; ++iter) {
    const Eigen::VectorXd w = inst.design.apply(bases.gamma_apply(t));
    const Eigen::VectorXd residual = eval_link(link, LinkMode::value, w) - inst.y;
    const Eigen::VectorXd grad =
        bases.gamma_adjoint(inst.design.apply_adjoint(residual) / m);

    Eigen::VectorXd next;
    if (adaptive) {
      // eta = ||g_S||^2 / (g_S^T H g_S) with H the local quadratic model and
      // S the active support (taken from the thresholded gradient while the
      // iterate is still zero).
      const Eigen::VectorXd weights = eval_link(link, LinkMode::derivative, w);
      Eigen::VectorXd masked;
      if (t.cwiseAbs().maxCoeff() == 0.0) {
        const Eigen::VectorXd landing = update(grad, 1.0);
        masked = (landing.array() != 0.0).select(grad, 0.0);
      } else {
        masked = (t.array() != 0.0).select(grad, 0.0);
      }
      const double num = masked.squaredNorm();
      if (num > 0.0) {
        const Eigen::VectorXd xg = inst.design.apply(bases.gamma_apply(masked));
        const double denom = xg.cwiseProduct(weights).dot(xg) / m;
        eta = denom > 0.0 ? num / denom : 0.5;
      } else if (eta <= 0.0) {
        eta = 0.5;
      }
      // Stability safeguard: a step that moves the support must stay below
      // the curvature along the actual displacement, else shrink it.
      for (int guard = 0; guard < 30; ++guard) {
        next = update(t - eta * grad, eta);
        const Eigen::VectorXd diff = next - t;
        const bool same_support =
            ((t.array() != 0.0) == (next.array() != 0.0)).all();
        if (same_support) break;
        const double dn = diff.squaredNorm();
        if (dn == 0.0) break;
        const Eigen::VectorXd xd = inst.design.apply(bases.gamma_apply(diff));
        const double along = xd.cwiseProduct(weights).dot(xd) / m;
        if (along <= 0.0 || eta <= 0.99 * dn / along) break;
        eta *= 0.5;
      }
    } else {
      next = update(t - eta * grad, eta);
    }
    res.iterations = iter + 1;
    record(next);

    const double step_norm = (next - t).norm();
    const double base_norm = t.norm();
    t = next;
    if (base_norm == 0.0) {
      if (step_norm == 0.0) break;
    } else if (step_norm / base_norm < params.tol) {
      break;
    }
  }

  res.eta_prime_used = eta;  // the last step taken when adaptive
  res.theta1_hat = t.head(n);
  res.theta2_hat = t.tail(n);
  res.beta_hat = bases.gamma_apply(t);
  return res;
}

}  // namespace

SolveResult struct_dht(const SuperpositionInstance& inst, const BasisPair& bases,
                       const LinkSpec& link, const SolverParams& params) {
  params.validate();
  if (link.periodic()) {
    throw UnsupportedLinkError(
        "struct_dht: periodic link \"" + link.name +
        "\" is not supported directly; use the matched-filter pipeline");
  }
  const SparsityModel sp = params.sparsity;
  UpdateRule project;
  if (sp.kind == SparsityModel::Kind::block) {
    if (inst.config.n % sp.b != 0 || sp.s % sp.b != 0) {
      throw ConfigError("struct_dht: block size must divide both s and n");
    }
    project = [sp](const Eigen::VectorXd& v, double) {
      return project_stacked(v, sp.s, sp.b).t;
    };
  } else {
    const int n = inst.config.n;
    project = [sp, n](const Eigen::VectorXd& v, double) {
      Eigen::VectorXd out(v.size());
      out.head(n) = project_plain(v.head(n), sp.s);
      out.tail(n) = project_plain(v.tail(n), sp.s);
      return out;
    };
  }
  return descend(inst, bases, link, params, project, /*sparsity_enforced=*/true,
                 StepPolicy::restricted_steepest);
}

SolveResult dst(const SuperpositionInstance& inst, const BasisPair& bases,
                const LinkSpec& link, const SolverParams& params) {
  params.validate();
  if (link.periodic()) {
    throw UnsupportedLinkError("dst: periodic link \"" + link.name +
                               "\" is not supported");
  }
  const double lambda = params.lambda;
  const UpdateRule shrink = [lambda](const Eigen::VectorXd& v, double eta) {
    Eigen::VectorXd out(v.size());
    const double tau = eta * lambda;
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = soft_threshold(v[i], tau);
    return out;
  };
  return descend(inst, bases, link, params, shrink, /*sparsity_enforced=*/false,
                 StepPolicy::fixed);
}

}  // namespace demix
