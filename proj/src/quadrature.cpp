#include "harvest/quadrature.hpp"

#include <stdexcept>
#include <string>

namespace harvest {

void validate(const RegulatorPolicy& policy) {
  if (!(policy.initial > 0.0) || !std::isfinite(policy.initial))
    throw std::invalid_argument("regulator: initial epsilon must be positive");
  if (policy.levels < 2) throw std::invalid_argument("regulator: at least two levels are required");
  if (policy.order < 1 || policy.order > policy.levels - 1)
    throw std::invalid_argument("regulator: order must lie in [1, levels - 1]");
}

void validate(const QuadratureSpec& spec) {
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0)) throw std::invalid_argument("quadrature: tolerances must be positive");
  if (!(spec.half_width >= 5.0)) throw std::invalid_argument("quadrature: truncation half-width must be at least 5");
  if (spec.max_subdivisions < 1 || spec.max_evaluations < 21)
    throw std::invalid_argument("quadrature: subdivision/evaluation budget too small");
  validate(spec.regulator);
}

namespace {

// Lagrange weights for evaluating the interpolant through xs at x = 0.
std::vector<double> weights_at_zero(std::span<const double> xs) {
  std::vector<double> w(xs.size(), 1.0);
  for (std::size_t k = 0; k < xs.size(); ++k)
    for (std::size_t j = 0; j < xs.size(); ++j)
      if (j != k) w[k] *= xs[j] / (xs[j] - xs[k]);
  return w;
}

cplx evaluate(std::span<const RegulatedValue> samples, std::span<const double> w) {
  cplx v(0.0, 0.0);
  for (std::size_t k = 0; k < w.size(); ++k) v += w[k] * samples[k].value;
  return v;
}

}  // namespace

Extrapolation extrapolate_epsilon(std::span<const RegulatedValue> samples, int order, double abs_tol, double rel_tol) {
  const auto n = static_cast<int>(samples.size());
  if (n < 2) throw std::invalid_argument("extrapolate_epsilon: need at least two levels");
  for (int k = 0; k < n; ++k) {
    if (!(samples[k].eps > 0.0)) throw std::invalid_argument("extrapolate_epsilon: eps must be positive");
    if (k > 0 && !(samples[k].eps < samples[k - 1].eps))
      throw std::invalid_argument("extrapolate_epsilon: eps must be strictly decreasing");
  }
  if (order < 1 || order > n - 1)
    throw std::invalid_argument("extrapolate_epsilon: order must lie in [1, " + std::to_string(n - 1) + "]");

  auto tail = samples.subspan(n - order - 1);
  std::vector<double> xs;
  for (const auto& s : tail) xs.push_back(s.eps);
  const auto w = weights_at_zero(xs);

  Extrapolation out;
  out.value = evaluate(tail, w);
  for (std::size_t k = 0; k < w.size(); ++k) out.propagated_error += std::abs(w[k]) * tail[k].error;

  auto lower = samples.subspan(n - order);
  const auto w_lower = weights_at_zero(std::span<const double>(xs).subspan(1));
  out.stability = std::abs(out.value - evaluate(lower, w_lower));
  out.stable = out.stability <= std::max(abs_tol, rel_tol * std::abs(out.value));
  return out;
}

}  // namespace harvest
