#include "demix/model_core.hpp"

#include <cmath>

#include "demix/errors.hpp"

namespace demix {

void SignalConfig::validate() const {
  if (n < 1 || s < 1 || b < 1 || m < 1) {
    throw ConfigError("SignalConfig: n, s, b, m must be positive");
  }
  if (s > n) throw ConfigError("SignalConfig: s must not exceed n");
  if (s % b != 0) throw ConfigError("SignalConfig: b must divide s");
  if (n % b != 0) throw ConfigError("SignalConfig: b must divide n");
  if (noise_sigma < 0.0) throw ConfigError("SignalConfig: noise_sigma must be >= 0");
  if (factored()) {
    if (q < 1 || k < 1) {
      throw ConfigError("SignalConfig: factored designs need q >= 1 and k >= 1");
    }
    if (m != k * q) throw ConfigError("SignalConfig: factored designs need m = k*q");
  }
}

std::vector<int> active_blocks(const Eigen::VectorXd& v, int b) {
  if (b < 1 || v.size() % b != 0) {
    throw ConfigError("active_blocks: b must divide the vector length");
  }
  std::vector<int> blocks;
  const int nb = static_cast<int>(v.size()) / b;
  for (int blk = 0; blk < nb; ++blk) {
    if (v.segment(static_cast<Eigen::Index>(blk) * b, b).cwiseAbs().maxCoeff() > 0.0) {
      blocks.push_back(blk);
    }
  }
  return blocks;
}

bool satisfies_block_model(const Eigen::VectorXd& v, int s, int b) {
  if (b < 1 || s < 1 || s % b != 0 || v.size() % b != 0) return false;
  return static_cast<int>(active_blocks(v, b).size()) <= s / b;
}

StackedCoefficients StackedCoefficients::from_halves(const Eigen::VectorXd& theta1,
                                                     const Eigen::VectorXd& theta2) {
  if (theta1.size() != theta2.size()) {
    throw ConfigError("StackedCoefficients: halves must have equal length");
  }
  Eigen::VectorXd t(2 * theta1.size());
  t.head(theta1.size()) = theta1;
  t.tail(theta2.size()) = theta2;
  return StackedCoefficients(std::move(t));
}

BlockSparseVector make_block_sparse(int n, int s, int b, rng::Engine& eng) {
  if (n < 1 || s < 1 || b < 1) {
    throw ConfigError("make_block_sparse: n, s, b must be positive");
  }
  if (s > n) throw ConfigError("make_block_sparse: s must not exceed n");
  if (s % b != 0 || n % b != 0) {
    throw ConfigError("make_block_sparse: b must divide both s and n");
  }
  const int total_blocks = n / b;
  const int active = s / b;
  BlockSparseVector out;
  out.block_support = rng::sample_indices(eng, total_blocks, active);
  out.values = Eigen::VectorXd::Zero(n);
  for (int blk : out.block_support) {
    for (int i = 0; i < b; ++i) {
      out.values[static_cast<Eigen::Index>(blk) * b + i] = rng::normal(eng);
    }
  }
  const double norm = out.values.norm();
  if (norm == 0.0) throw NumericalError("make_block_sparse: drew an all-zero vector");
  out.values /= norm;
  return out;
}

BlockSparseVector make_block_sparse(int n, int s, int b, std::uint64_t seed) {
  rng::Engine eng = rng::make_engine(seed);
  return make_block_sparse(n, s, b, eng);
}

SuperpositionInstance synthesize_instance(const SignalConfig& config,
                                          const BasisPair& bases,
                                          DesignOperator design,
                                          const LinkSpec& link,
                                          std::uint64_t seed) {
  config.validate();
  if (bases.dim() != config.n) {
    throw ConfigError("synthesize_instance: basis dimension does not match n");
  }
  if (design.rows() != config.m || design.cols() != config.n) {
    throw ConfigError("synthesize_instance: design is " +
                      std::to_string(design.rows()) + "x" +
                      std::to_string(design.cols()) + ", expected " +
                      std::to_string(config.m) + "x" + std::to_string(config.n));
  }
  if (config.factored()) {
    if (design.form() != DesignOperator::Form::factored ||
        design.blocks() != config.k || design.inner_dim() != config.q) {
      throw ConfigError("synthesize_instance: factored config requires a matching "
                        "factored design");
    }
  }

  rng::Engine eng1 = rng::make_engine(rng::derive(seed, "theta1"));
  rng::Engine eng2 = rng::make_engine(rng::derive(seed, "theta2"));
  const BlockSparseVector theta1 = make_block_sparse(config.n, config.s, config.b, eng1);
  const BlockSparseVector theta2 = make_block_sparse(config.n, config.s, config.b, eng2);

  SuperpositionInstance inst;
  inst.config = config;
  inst.theta_true = StackedCoefficients::from_halves(theta1.values, theta2.values);
  inst.beta = bases.phi.apply(theta1.values) + bases.psi.apply(theta2.values);

  const Eigen::VectorXd w = design.apply(inst.beta);
  inst.e = Eigen::VectorXd::Zero(config.m);
  if (config.noise_sigma > 0.0) {
    rng::Engine neng = rng::make_engine(rng::derive(seed, "noise"));
    for (int i = 0; i < config.m; ++i) {
      inst.e[i] = config.noise_sigma * rng::normal(neng);
    }
  }
  inst.y = eval_link(link, LinkMode::value, w) + inst.e;
  inst.design = std::move(design);
  inst.link_name = link.name;
  inst.seed = seed;
  return inst;
}

double normalized_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  if (estimate.size() != truth.size()) {
    throw ConfigError("normalized_error: length mismatch");
  }
  const double denom = truth.norm();
  if (denom == 0.0) throw DomainError("normalized_error: reference has zero norm");
  return (estimate - truth).norm() / denom;
}

}  // namespace demix
