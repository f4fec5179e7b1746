#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace harvest {

using cplx = std::complex<double>;

/// A numerical procedure could not reach its requested accuracy.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite-regulator ladder eps_k = initial / 2^k, k < levels, extrapolated to
/// eps = 0 with a polynomial of degree `order` (at most levels - 1).
struct RegulatorPolicy {
  double initial = 0.1;
  int levels = 5;
  int order = 4;

  double epsilon(int level) const { return std::ldexp(initial, -level); }
};

void validate(const RegulatorPolicy& policy);

struct QuadratureSpec {
  double abs_tol = 1e-9;
  double rel_tol = 1e-6;
  double half_width = 7.0;  // integrate the Gaussian-switched plane over [-T, T]^2
  int max_subdivisions = 4000;
  std::size_t max_evaluations = 400'000'000;
  RegulatorPolicy regulator;

  /// Defaults for one-dimensional work: tighter tolerances.
  static QuadratureSpec one_dimensional() {
    QuadratureSpec s;
    s.abs_tol = 1e-10;
    s.rel_tol = 1e-8;
    return s;
  }
};

void validate(const QuadratureSpec& spec);

struct IntegralResult {
  cplx value{0.0, 0.0};
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

/// Appends the inner-coordinate locations of near-singular ridges crossing the
/// line outer = const within [lo, hi]. Used as breakpoints for the inner pass.
using RidgeLocator = std::function<void(double outer, double lo, double hi, std::vector<double>& out)>;

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452, 0.930157491355708226001207180059508,
    0.865063366688984510732096688423493, 0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784, 0.294392862701460198131126603103866,
    0.148874338981631210884826001129720, 0.0};
inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390, 0.054755896574351996031381300244580,
    0.075039674810919952767043140916190, 0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478125, 0.134709217311473325928054001771707, 0.142775938577060080797094273138717,
    0.147739104901338491374841515972068, 0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697, 0.219086362515982043995534934228163,
    0.269266719309996355091226921569469, 0.295524224714752870173892994651338};

inline cplx lead(const cplx& v) { return v; }
inline cplx lead(const Eigen::Vector2cd& v) { return v(0); }
template <typename V>
V zero_value() {
  if constexpr (std::is_same_v<V, cplx>)
    return cplx(0.0, 0.0);
  else
    return V::Zero();
}

template <typename V>
struct Panel {
  double lo;
  double hi;
  V value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

// One GK21 pass. The error heuristic is QUADPACK's, applied to the leading
// (complex) component; it is deliberately pessimistic for smooth integrands.
template <typename V, typename F>
Panel<V> gauss_kronrod(F& f, double lo, double hi) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  std::array<V, 21> fv;
  fv[20] = f(center);
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kKronrodNodes[j];
    fv[2 * j] = f(center - dx);
    fv[2 * j + 1] = f(center + dx);
  }
  V kronrod = kKronrodWeights[10] * fv[20];
  cplx gauss(0.0, 0.0);
  double abs_sum = kKronrodWeights[10] * std::abs(lead(fv[20]));
  for (int j = 0; j < 10; ++j) {
    const V pair = fv[2 * j] + fv[2 * j + 1];
    kronrod += kKronrodWeights[j] * pair;
    abs_sum += kKronrodWeights[j] * (std::abs(lead(fv[2 * j])) + std::abs(lead(fv[2 * j + 1])));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * lead(pair);
  }
  const cplx mean = 0.5 * lead(kronrod);
  double asc = kKronrodWeights[10] * std::abs(lead(fv[20]) - mean);
  for (int j = 0; j < 10; ++j)
    asc += kKronrodWeights[j] * (std::abs(lead(fv[2 * j]) - mean) + std::abs(lead(fv[2 * j + 1]) - mean));

  const double h = std::abs(half);
  double err = std::abs((lead(kronrod) - gauss) * half);
  asc *= h;
  abs_sum *= h;
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * abs_sum, err);
  return {lo, hi, V(kronrod * half), err};
}

template <typename V>
struct Adaptive {
  V value;
  double error = 0.0;
  bool converged = true;
};

// Globally adaptive bisection over the panels delimited by `cuts` (sorted,
// endpoints included). Each call of f costs `cost` integrand evaluations,
// accumulated into `evaluations`; an outer pass whose f runs its own inner
// integrations passes 0 and lets those count.
template <typename V, typename F>
Adaptive<V> adaptive(F& f, const std::vector<double>& cuts, double abs_tol, double rel_tol, int max_subdivisions,
                     std::size_t max_evaluations, std::size_t& evaluations, std::size_t cost = 1) {
  std::priority_queue<Panel<V>> queue;
  std::vector<Panel<V>> frozen;
  V total = zero_value<V>();
  double error = 0.0;
  bool converged = true;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (!(cuts[k + 1] > cuts[k])) continue;
    if (evaluations + 21 * cost > max_evaluations) {
      converged = false;
      break;
    }
    Panel<V> p = gauss_kronrod<V>(f, cuts[k], cuts[k + 1]);
    evaluations += 21 * cost;
    total += p.value;
    error += p.error;
    queue.push(p);
  }
  int subdivisions = 0;
  while (converged && !queue.empty() && error > std::max(abs_tol, rel_tol * std::abs(lead(total)))) {
    if (subdivisions >= max_subdivisions || evaluations + 42 * cost > max_evaluations) {
      converged = false;
      break;
    }
    Panel<V> worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi) ||
        (worst.hi - worst.lo) < 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) {
      frozen.push_back(worst);  // cannot be refined further
      if (queue.empty()) converged = false;
      continue;
    }
    Panel<V> left = gauss_kronrod<V>(f, worst.lo, mid);
    Panel<V> right = gauss_kronrod<V>(f, mid, worst.hi);
    evaluations += 42 * cost;
    ++subdivisions;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }
  if (!frozen.empty() && error > std::max(abs_tol, rel_tol * std::abs(lead(total)))) converged = false;

  // Re-sum from the final panels to shed incremental round-off.
  Adaptive<V> out{zero_value<V>(), 0.0, converged};
  for (; !queue.empty(); queue.pop()) {
    out.value += queue.top().value;
    out.error += queue.top().error;
  }
  for (const auto& p : frozen) {
    out.value += p.value;
    out.error += p.error;
  }
  return out;
}

inline std::vector<double> make_cuts(double lo, double hi, std::span<const double> breakpoints) {
  std::vector<double> cuts{lo, hi};
  for (double b : breakpoints)
    if (b > lo && b < hi) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of a complex integrand over [lo, hi].
/// `breakpoints` inside the interval start the subdivision there.
template <typename F>
IntegralResult integrate_1d(F&& f, double lo, double hi, double abs_tol, double rel_tol, int max_subdivisions = 4000,
                            std::size_t max_evaluations = 100'000'000, std::span<const double> breakpoints = {}) {
  IntegralResult r;
  auto g = [&](double x) -> cplx { return cplx(f(x)); };
  const auto cuts = detail::make_cuts(lo, hi, breakpoints);
  const auto a = detail::adaptive<cplx>(g, cuts, abs_tol, rel_tol, max_subdivisions, max_evaluations, r.evaluations);
  r.value = a.value;
  r.error = a.error;
  r.converged = a.converged;
  return r;
}

/// Iterated integral  int_{outer_lo}^{outer_hi} d(outer) int_{inner(outer)} d(inner) f(outer, inner).
/// `inner_limits(outer)` returns the inner interval; `ridges` supplies inner
/// breakpoints. The reported error is the outer estimate plus the integral of
/// the inner estimates.
template <typename F, typename Limits>
IntegralResult integrate_region(F&& f, double outer_lo, double outer_hi, Limits&& inner_limits,
                                const QuadratureSpec& spec, const RidgeLocator& ridges = {}) {
  IntegralResult r;
  const double length = std::max(outer_hi - outer_lo, 1e-300);
  const double inner_abs = 0.1 * spec.abs_tol / length;
  const double inner_rel = 0.1 * spec.rel_tol;
  bool inner_ok = true;
  std::vector<double> hints;
  auto outer = [&](double x) -> Eigen::Vector2cd {
    const auto [lo, hi] = inner_limits(x);
    Eigen::Vector2cd out(cplx(0.0, 0.0), cplx(0.0, 0.0));
    if (!(hi > lo)) return out;
    hints.clear();
    if (ridges) ridges(x, lo, hi, hints);
    const auto cuts = detail::make_cuts(lo, hi, hints);
    auto g = [&](double y) -> cplx { return f(x, y); };
    const auto a =
        detail::adaptive<cplx>(g, cuts, inner_abs, inner_rel, spec.max_subdivisions, spec.max_evaluations, r.evaluations);
    inner_ok = inner_ok && a.converged;
    out << a.value, cplx(a.error, 0.0);
    return out;
  };
  const std::vector<double> cuts{outer_lo, 0.5 * (outer_lo + outer_hi), outer_hi};
  const auto a = detail::adaptive<Eigen::Vector2cd>(outer, cuts, spec.abs_tol, spec.rel_tol, spec.max_subdivisions,
                                                    spec.max_evaluations, r.evaluations, 0);
  r.value = a.value(0);
  r.error = a.error + std::abs(a.value(1).real());
  r.converged = a.converged && inner_ok;
  return r;
}

/// Double integral of f(tau, tau') over [-T, T]^2 with T = spec.half_width.
template <typename F>
IntegralResult integrate_2d(F&& f, const QuadratureSpec& spec, const RidgeLocator& ridges = {}) {
  const double T = spec.half_width;
  return integrate_region(std::forward<F>(f), -T, T, [T](double) { return std::pair{-T, T}; }, spec, ridges);
}

/// Real integrand on [0, inf). `tail_bound(S)` must bound int_S^inf |g|; the
/// domain is cut where that bound drops below a tenth of the absolute
/// tolerance, and the bound is added to the reported error.
template <typename G, typename Tail>
IntegralResult integrate_1d_semiinfinite(G&& g, Tail&& tail_bound, const QuadratureSpec& spec) {
  double cut = 1.0;
  while (tail_bound(cut) > 0.1 * spec.abs_tol && cut < 1e6) cut *= 2.0;
  std::vector<double> breaks;
  for (double b = 1.0; b < cut; b *= 2.0) breaks.push_back(b);
  auto f = [&](double s) -> cplx { return cplx(g(s), 0.0); };
  IntegralResult r = integrate_1d(f, 0.0, cut, spec.abs_tol, spec.rel_tol, spec.max_subdivisions,
                                  spec.max_evaluations, breaks);
  const double tail = tail_bound(cut);
  r.error += tail;
  if (tail > 0.1 * spec.abs_tol) r.converged = false;
  return r;
}

struct RegulatedValue {
  double eps;
  cplx value;
  double error = 0.0;  // quadrature error of `value`
};

struct Extrapolation {
  cplx value;
  double stability = 0.0;         // |order k estimate - order k-1 estimate|
  double propagated_error = 0.0;  // quadrature errors pushed through the weights
  bool stable = true;

  double error() const { return stability + propagated_error; }
};

/// Polynomial extrapolation to eps = 0 through the `order + 1` smallest-eps
/// samples. Samples must have strictly decreasing positive eps.
Extrapolation extrapolate_epsilon(std::span<const RegulatedValue> samples, int order, double abs_tol = 0.0,
                                  double rel_tol = 1e-6);

}  // namespace harvest
