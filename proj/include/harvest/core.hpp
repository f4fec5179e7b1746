#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

// Everything in this library is measured in units of the switching width
// sigma, which is therefore fixed to 1: accelerations are a*sigma, gaps are
// Omega*sigma, proper times and distances are tau/sigma and L/sigma.

namespace harvest {

enum class Scenario { inertial, parallel, anti_parallel, perpendicular };
enum class Detector { A, B };

std::string_view to_string(Scenario s);
std::string_view to_string(Detector d);

/// Parses "inertial", "parallel", "anti-parallel" or "perpendicular".
Scenario parse_scenario(std::string_view name);

inline bool is_accelerated(Scenario s) { return s != Scenario::inertial; }

struct DetectorParams {
  double coupling = 0.1;  // lambda
  double gap = 0.0;       // Omega*sigma
};

/// Per-detector parameters. The CLI and the sweeps use one shared
/// coupling and gap, built with DetectorPair::symmetric.
struct DetectorPair {
  DetectorParams A;
  DetectorParams B;

  static DetectorPair symmetric(double coupling, double gap) { return {{coupling, gap}, {coupling, gap}}; }
  const DetectorParams& operator[](Detector d) const { return d == Detector::A ? A : B; }
};

struct ScenarioConfig {
  Scenario scenario = Scenario::inertial;
  double acceleration = 0.0;  // a*sigma
  double separation = 0.0;    // L/sigma
};

/// Throws std::invalid_argument on a violated invariant.
void validate(const DetectorParams& p);
void validate(const DetectorPair& p);
void validate(const ScenarioConfig& cfg);

/// Event (t, x, y, z) in Minkowski coordinates.
template <typename Scalar>
using SpacetimePoint = Eigen::Matrix<Scalar, 4, 1>;

using Point = SpacetimePoint<double>;

template <typename Scalar>
Scalar switching(Scalar tau) {
  using std::exp;
  return exp(-tau * tau / Scalar(2));
}

namespace detail {

// sinh(a tau)/a, continuous through a = 0.
template <typename Scalar>
Scalar sinh_over(Scalar a, Scalar tau) {
  using std::sinh;
  if (a == Scalar(0)) return tau;
  return sinh(a * tau) / a;
}

// (cosh(a tau) - 1)/a written as 2 sinh^2(a tau/2)/a, continuous through a = 0.
template <typename Scalar>
Scalar cosh_minus_one_over(Scalar a, Scalar tau) {
  using std::sinh;
  if (a == Scalar(0)) return Scalar(0);
  const Scalar h = sinh(a * tau / Scalar(2));
  return Scalar(2) * h * h / a;
}

}  // namespace detail

/// Unchecked worldline. The acceleration may take any sign (a = 0 gives the
/// inertial limit of the chosen family); the temperature-series code relies
/// on that analytic continuation.
template <typename Scalar>
SpacetimePoint<Scalar> worldline(Scenario scenario, Detector detector, Scalar a, Scalar separation, Scalar tau) {
  const Scalar half = separation / Scalar(2);
  const Scalar t = detail::sinh_over(a, tau);
  const Scalar rise = detail::cosh_minus_one_over(a, tau);
  const bool is_a = detector == Detector::A;
  SpacetimePoint<Scalar> p;
  switch (scenario) {
    case Scenario::inertial:
      p << tau, is_a ? half : -half, Scalar(0), Scalar(0);
      break;
    case Scenario::parallel:
      p << t, is_a ? rise + half : rise - half, Scalar(0), Scalar(0);
      break;
    case Scenario::anti_parallel:
      p << t, is_a ? rise + half : -rise - half, Scalar(0), Scalar(0);
      break;
    case Scenario::perpendicular:
      if (is_a)
        p << t, Scalar(0), rise, Scalar(0);
      else
        p << t, rise + separation, Scalar(0), Scalar(0);
      break;
  }
  return p;
}

/// Position of `detector` at proper time tau. Rejects a zero acceleration on
/// an accelerated scenario: use Scenario::inertial for that limit.
template <typename Scalar = double>
SpacetimePoint<Scalar> trajectory_point(const ScenarioConfig& cfg, Detector detector, Scalar tau) {
  validate(cfg);
  if (!std::isfinite(static_cast<double>(tau))) throw std::invalid_argument("trajectory_point: non-finite proper time");
  return worldline<Scalar>(cfg.scenario, detector, Scalar(cfg.acceleration), Scalar(cfg.separation), tau);
}

/// Minkowski time t(tau). Strictly increasing in tau for every scenario, and
/// the same function for both detectors.
double coordinate_time(const ScenarioConfig& cfg, Detector detector, double tau);

}  // namespace harvest
