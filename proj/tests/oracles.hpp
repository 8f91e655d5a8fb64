// Test-only reference implementations, kept independent of the library's
// computation paths so they can serve as oracles.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "demix/model_core.hpp"
#include "demix/solvers.hpp"

namespace oracles {

// Next k-subset of {0,...,n-1} in lexicographic order; `sel` starts as
// {0,...,k-1}. Returns false when exhausted.
inline bool next_subset(std::vector<int>& sel, int n) {
  const int k = static_cast<int>(sel.size());
  int i = k - 1;
  while (i >= 0 && sel[i] == n - k + i) --i;
  if (i < 0) return false;
  ++sel[i];
  for (int j = i + 1; j < k; ++j) sel[j] = sel[j - 1] + 1;
  return true;
}

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) {
    r = r * (n - i) / (i + 1);
    if (r > (std::int64_t{1} << 62) / n) return std::numeric_limits<std::int64_t>::max();
  }
  return r;
}

struct BruteForceProjection {
  std::vector<int> support;  // lexicographically smallest optimal block set
  Eigen::VectorXd values;
};

// Exhaustive minimizer of ||v - w||_2 over vectors with exactly s/b active
// blocks: enumerates every support set in lexicographic order and keeps the
// first one attaining the maximum captured energy.
inline BruteForceProjection brute_force_block_projection(const Eigen::VectorXd& v,
                                                         int s, int b) {
  const int n = static_cast<int>(v.size());
  const int total = n / b;
  const int keep = s / b;
  Eigen::VectorXd block_energy(total);
  for (int blk = 0; blk < total; ++blk) {
    block_energy[blk] = v.segment(static_cast<Eigen::Index>(blk) * b, b).squaredNorm();
  }
  std::vector<int> sel(keep);
  for (int i = 0; i < keep; ++i) sel[i] = i;
  std::vector<int> best = sel;
  double best_energy = -1.0;
  do {
    double captured = 0.0;
    for (int blk : sel) captured += block_energy[blk];
    if (captured > best_energy) {
      best_energy = captured;
      best = sel;
    }
  } while (next_subset(sel, total));

  BruteForceProjection out;
  out.support = best;
  out.values = Eigen::VectorXd::Zero(n);
  for (int blk : best) {
    out.values.segment(static_cast<Eigen::Index>(blk) * b, b) =
        v.segment(static_cast<Eigen::Index>(blk) * b, b);
  }
  return out;
}

// Complete optimality certificate for a block projection, independent of any
// sorting: the result must copy v on its support, vanish elsewhere, use
// exactly s/b blocks, and admit no improving (or tie-with-lower-index) swap
// between a kept and a dropped block.
inline bool certify_block_projection(const Eigen::VectorXd& v,
                                     const demix::BlockSparseVector& p, int s,
                                     int b) {
  const int n = static_cast<int>(v.size());
  const int total = n / b;
  if (static_cast<int>(p.block_support.size()) != s / b) return false;
  std::vector<bool> kept(total, false);
  for (int blk : p.block_support) {
    if (blk < 0 || blk >= total) return false;
    kept[blk] = true;
  }
  for (int blk = 0; blk < total; ++blk) {
    const auto seg = v.segment(static_cast<Eigen::Index>(blk) * b, b);
    const auto out = p.values.segment(static_cast<Eigen::Index>(blk) * b, b);
    if (kept[blk]) {
      if ((out - seg).cwiseAbs().maxCoeff() != 0.0) return false;
    } else {
      if (out.cwiseAbs().maxCoeff() != 0.0) return false;
    }
  }
  double min_kept = std::numeric_limits<double>::infinity();
  int min_kept_idx = -1;
  double max_dropped = -std::numeric_limits<double>::infinity();
  int max_dropped_idx = -1;
  for (int blk = 0; blk < total; ++blk) {
    const double e = v.segment(static_cast<Eigen::Index>(blk) * b, b).squaredNorm();
    if (kept[blk]) {
      if (e < min_kept || (e == min_kept && blk > min_kept_idx)) {
        min_kept = e;
        min_kept_idx = blk;
      }
    } else {
      if (e > max_dropped || (e == max_dropped && blk < max_dropped_idx)) {
        max_dropped = e;
        max_dropped_idx = blk;
      }
    }
  }
  if (max_dropped_idx < 0) return true;  // everything kept
  if (max_dropped > min_kept) return false;
  // Equal energies must resolve toward the lower block index.
  if (max_dropped == min_kept && max_dropped_idx < min_kept_idx) return false;
  return true;
}

// Central finite differences of the loss; step h on each coordinate.
inline Eigen::VectorXd fd_loss_gradient(const demix::StackedCoefficients& t,
                                        const demix::SuperpositionInstance& inst,
                                        const demix::BasisPair& bases,
                                        const demix::LinkSpec& link,
                                        double h = 1e-6) {
  Eigen::VectorXd grad(t.t.size());
  for (Eigen::Index i = 0; i < t.t.size(); ++i) {
    demix::StackedCoefficients plus = t;
    demix::StackedCoefficients minus = t;
    plus.t[i] += h;
    minus.t[i] -= h;
    grad[i] = (demix::loss_value(plus, inst, bases, link) -
               demix::loss_value(minus, inst, bases, link)) /
              (2.0 * h);
  }
  return grad;
}

}  // namespace oracles
