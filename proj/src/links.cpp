#include "demix/links.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "demix/errors.hpp"

namespace demix {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

double sigmoid_value(double x) { return std::tanh(0.5 * x); }

double sigmoid_deriv(double x) {
  const double t = std::tanh(0.5 * x);
  return 0.5 * (1.0 - t * t);
}

// 2*ln cosh(x/2), computed as |x| + 2*log1p(e^-|x|) - 2*ln 2 so it neither
// overflows nor loses digits for large |x|.
double sigmoid_antideriv(double x) {
  const double a = std::fabs(x);
  return a + 2.0 * std::log1p(std::exp(-a)) - 2.0 * std::numbers::ln2;
}

double sawtooth_value(double x) {
  double r = std::fmod(x, kTau);
  if (r < 0.0) r += kTau;
  return r;
}

// Antiderivative of x mod 2*pi with value 0 at 0: piecewise quadratic,
// accumulating a full-period area of (2*pi)^2/2 per period.
double sawtooth_antideriv(double x) {
  const double p = std::floor(x / kTau);
  const double r = x - p * kTau;
  return p * (0.5 * kTau * kTau) + 0.5 * r * r;
}

}  // namespace

LinkSpec identity_link() {
  LinkSpec s;
  s.name = "identity";
  s.g = [](double x) { return x; };
  s.g_prime = [](double) { return 1.0; };
  s.antiderivative = [](double x) { return 0.5 * x * x; };
  s.kind = LinkKind::aperiodic_monotone;
  s.deriv_lower = 1.0;
  s.deriv_upper = 1.0;
  s.operating_range = std::numeric_limits<double>::infinity();
  return s;
}

LinkSpec sigmoid_link(double operating_range) {
  LinkSpec s;
  s.name = "sigmoid";
  s.g = sigmoid_value;
  s.g_prime = sigmoid_deriv;
  s.antiderivative = sigmoid_antideriv;
  s.kind = LinkKind::aperiodic_monotone;
  s.operating_range = operating_range;
  s.deriv_lower = sigmoid_deriv(operating_range);
  s.deriv_upper = 0.5;
  return s;
}

LinkSpec sin_link() {
  LinkSpec s;
  s.name = "sin";
  s.g = [](double x) { return std::sin(x); };
  s.g_prime = [](double x) { return std::cos(x); };
  s.antiderivative = [](double x) { return 1.0 - std::cos(x); };
  s.kind = LinkKind::periodic;
  s.period = kTau;
  return s;
}

LinkSpec sawtooth_link() {
  LinkSpec s;
  s.name = "sawtooth";
  s.g = sawtooth_value;
  s.g_prime = [](double) { return 1.0; };  // a.e.; jumps at multiples of 2*pi
  s.antiderivative = sawtooth_antideriv;
  s.kind = LinkKind::periodic;
  s.period = kTau;
  return s;
}

const std::vector<LinkSpec>& builtin_links() {
  static const std::vector<LinkSpec> links = {
      identity_link(), sigmoid_link(), sin_link(), sawtooth_link()};
  return links;
}

const LinkSpec& link_by_name(std::string_view name) {
  for (const LinkSpec& l : builtin_links()) {
    if (l.name == name) return l;
  }
  throw ConfigError("unknown link function: \"" + std::string(name) +
                    "\" (expected identity, sigmoid, sin, or sawtooth)");
}

Eigen::VectorXd eval_link(const LinkSpec& link, LinkMode mode,
                          const Eigen::VectorXd& x) {
  const std::function<double(double)>* f = nullptr;
  switch (mode) {
    case LinkMode::value: f = &link.g; break;
    case LinkMode::derivative: f = &link.g_prime; break;
    case LinkMode::antiderivative: f = &link.antiderivative; break;
  }
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw DomainError("eval_link(" + link.name + "): non-finite input at entry " +
                        std::to_string(i));
    }
    out[i] = (*f)(x[i]);
  }
  return out;
}

}  // namespace demix
