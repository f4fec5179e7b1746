#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "harvest/core.hpp"
#include "harvest/quadrature.hpp"

// Two-point functions of a massless, minimally coupled scalar in 3+1
// dimensions. Unless stated otherwise `eps` is the UV regulator in Minkowski
// time units, entering as (t - t' - i eps).

namespace harvest {

struct MinkowskiVacuum {};

/// KMS state at inverse temperature beta (units of sigma).
struct ThermalKms {
  double beta = 1.0;
};

/// Conformal vacuum of de Sitter space; kappa = 2 pi T_GH.
struct DeSitterConformal {
  double temperature = 0.0;  // Gibbons-Hawking temperature, units of 1/sigma
};

using FieldState = std::variant<MinkowskiVacuum, ThermalKms, DeSitterConformal>;

void validate(const FieldState& state);
std::string describe(const FieldState& state);

inline double unruh_temperature(double acceleration) { return acceleration / (2.0 * std::numbers::pi); }

template <typename Scalar>
std::complex<Scalar> wightman_minkowski(Scalar dt, Scalar r2, Scalar eps) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const std::complex<Scalar> den(dt * dt - eps * eps - r2, Scalar(-2) * eps * dt);
  return Scalar(-1) / (Scalar(4) * pi * pi * den);
}

/// -1/(4 pi^2) / ((t - t' - i eps)^2 - |x - x'|^2)
template <typename Scalar>
std::complex<Scalar> wightman_minkowski(const SpacetimePoint<Scalar>& x, const SpacetimePoint<Scalar>& y, Scalar eps) {
  return wightman_minkowski<Scalar>(x(0) - y(0), (x.template tail<3>() - y.template tail<3>()).squaredNorm(), eps);
}

/// Vacuum two-point function along one uniformly accelerated worldline,
/// -(a^2/16 pi^2) / sinh^2(a dtau/2 - i eps). Here eps is the regulator as it
/// appears inside the sinh; a Minkowski-time regulator e corresponds to a e/2.
template <typename Scalar>
std::complex<Scalar> wightman_accel_single(Scalar a, Scalar dtau, Scalar eps) {
  using std::cos, std::cosh, std::sin, std::sinh;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar x = a * dtau / Scalar(2);
  const std::complex<Scalar> s(sinh(x) * cos(eps), -cosh(x) * sin(eps));
  return -(a * a / (Scalar(16) * pi * pi)) / (s * s);
}

/// W(x_A(tau_a), x_B(tau_b)). Parallel acceleration uses the closed form in
/// hyperbolic functions of the proper times; every other scenario pulls the
/// Minkowski function back through the trajectories.
///
/// Here eps is a proper-time regulator: the events are taken at complex proper
/// times tau_a - i eps/2 and tau_b + i eps/2, which keeps Im(x_A - x_B) past
/// timelike on any pair of worldlines. On inertial worldlines this is the
/// Minkowski-time regulator; on a single accelerated worldline it is the
/// a eps/2 of wightman_accel_single. Unlike a coordinate-time eps it is not
/// Doppler stretched where the detectors move fast.
cplx wightman_cross(const ScenarioConfig& cfg, double tau_a, double tau_b, double eps);

/// Generic route for wightman_cross, valid for all scenarios.
cplx wightman_cross_pullback(const ScenarioConfig& cfg, double tau_a, double tau_b, double eps);

/// Roots in (lo, hi) of the invariant interval between detector i at tau_i
/// and detector j's worldline, i.e. where the Wightman function is lightlike
/// singular. For i == j the only root is tau_i itself.
void lightlike_crossings(const ScenarioConfig& cfg, Detector i, double tau_i, Detector j, double lo, double hi,
                         std::vector<double>& out);

struct ThermalSum {
  cplx value;
  double tail_bound = 0.0;  // estimated error of the truncated, tail-corrected sum
  int terms = 0;            // images summed explicitly: n = -terms..terms

  bool within(double tol) const { return tail_bound <= tol; }
};

/// Thermal Wightman function as an imaginary-time image sum,
///   sum_n W_M(t - t' + i n beta, x, x'),
/// summed explicitly for |n| <= terms; the remaining tail is added from its
/// Euler-Maclaurin (integral plus first derivative) approximation. A negative
/// beta is treated as |beta|.
ThermalSum wightman_thermal(double dt, double r, double beta, double eps, int terms);
ThermalSum wightman_thermal(const Point& x, const Point& y, double beta, double eps, int terms);

/// The thermal part W_beta alone (the image sum without n = 0).
ThermalSum thermal_correction(double dt, double r, double beta, double eps, int terms);

/// Smallest image count whose tail bound is below `tol`; throws
/// ConvergenceError if none is found below a hard cap.
int thermal_terms(double dt, double r, double beta, double eps, double tol);

/// wightman_thermal with the image count chosen from `tol`.
cplx wightman_thermal_auto(double dt, double r, double beta, double eps, double tol = 1e-13);

/// W_beta(dt, r) from the radial momentum integral
///   1/(2 pi^2 r) int_0^inf dk sin(kr) cos(k dt) / (e^{beta k} - 1),
/// with r -> 0 taken analytically. Independent of the image sum; it exists to
/// cross-check it.
IntegralResult wightman_thermal_integral(double dt, double r, double beta,
                                         const QuadratureSpec& spec = QuadratureSpec::one_dimensional());

/// Conformal-vacuum de Sitter function for comoving points,
///   -1/(4 pi^2) / [ sinh^2(pi T dt - i eps)/(pi T)^2 - e^{2 pi T dt_sum} L^2 ],
/// dt = t - t', dt_sum = t + t', L the comoving separation. eps is regulated
/// inside the sinh as written; T = 0 returns the Minkowski function with a
/// Minkowski-time regulator eps. T may be negative (analytic continuation).
template <typename Scalar>
std::complex<Scalar> wightman_desitter(Scalar dt, Scalar dt_sum, Scalar L, Scalar T, Scalar eps) {
  using std::cos, std::cosh, std::exp, std::sin, std::sinh;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  if (T == Scalar(0)) return wightman_minkowski<Scalar>(dt, L * L, eps);
  const Scalar x = pi * T * dt;
  const std::complex<Scalar> s(sinh(x) * cos(eps), -cosh(x) * sin(eps));
  const std::complex<Scalar> den = s * s / (pi * pi * T * T) - exp(Scalar(2) * pi * T * dt_sum) * L * L;
  return Scalar(-1) / (Scalar(4) * pi * pi * den);
}

}  // namespace harvest
