#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace demix {

enum class LinkKind { aperiodic_monotone, periodic };
enum class LinkMode { value, derivative, antiderivative };

// A known scalar nonlinearity g applied entrywise to linear measurements,
// together with everything the solvers need: the derivative g', an
// antiderivative Theta (Theta' = g, Theta(0) = 0), and the metadata that
// drives pipeline selection.
struct LinkSpec {
  std::string name;
  std::function<double(double)> g;
  std::function<double(double)> g_prime;
  std::function<double(double)> antiderivative;
  LinkKind kind = LinkKind::aperiodic_monotone;
  // Aperiodic links: 0 < deriv_lower <= g'(x) <= deriv_upper holds on
  // [-operating_range, operating_range].
  double deriv_lower = 0.0;
  double deriv_upper = 0.0;
  double operating_range = 0.0;
  // Periodic links only.
  double period = 0.0;

  bool periodic() const { return kind == LinkKind::periodic; }
};

LinkSpec identity_link();

// g(x) = (1 - e^-x) / (1 + e^-x) = tanh(x/2). Its derivative tends to zero
// at infinity, so the bounds are quoted on [-operating_range, operating_range]
// with deriv_lower = g'(operating_range) and deriv_upper = g'(0) = 1/2.
LinkSpec sigmoid_link(double operating_range = 10.0);

LinkSpec sin_link();

// Raw-phase sawtooth g(x) = x mod 2*pi. Kept in raw phase so that
// sin(g(x)) == sin(x) holds exactly, which the periodic recovery pipeline
// relies on. Any display rescaling to unit amplitude is a plotting concern.
LinkSpec sawtooth_link();

const std::vector<LinkSpec>& builtin_links();

// Lookup by CLI/config name: "identity", "sigmoid", "sin", "sawtooth".
// Throws ConfigError for unknown names.
const LinkSpec& link_by_name(std::string_view name);

// Entrywise evaluation of g, g', or Theta. Throws DomainError if any input
// entry is non-finite. Stable for |x| up to at least 1e3 for every builtin.
Eigen::VectorXd eval_link(const LinkSpec& link, LinkMode mode,
                          const Eigen::VectorXd& x);

}  // namespace demix
