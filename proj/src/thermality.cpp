#include "harvest/thermality.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "harvest/wightman.hpp"

namespace harvest {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kImageTolerance = 1e-16;

cplx static_family(const StaticPair& p, double temperature) {
  if (temperature == 0.0) return {0.0, 0.0};
  const double beta = 1.0 / temperature;
  const int terms = thermal_terms(p.dt, p.r, beta, 0.0, kImageTolerance);
  return thermal_correction(p.dt, p.r, beta, 0.0, terms).value;
}

cplx trajectory_family(const TrajectoryPair& p, double temperature) {
  const double a = 2.0 * kPi * temperature;
  auto w = [&](double acc) {
    const Point x = worldline(p.scenario, p.i, acc, p.separation, p.tau_i);
    const Point y = worldline(p.scenario, p.j, acc, p.separation, p.tau_j);
    return wightman_minkowski(x, y, 0.0);
  };
  return w(a) - w(0.0);
}

cplx desitter_family(const DeSitterPair& p, double temperature) {
  return wightman_desitter(p.dt, p.dt_sum, p.separation, temperature, 0.0) -
         wightman_minkowski(p.dt, p.separation * p.separation, 0.0);
}

void check(const SeriesPoint& point) {
  if (const auto* s = std::get_if<StaticPair>(&point)) {
    if (!(s->r >= 0.0)) throw std::invalid_argument("series: r must be non-negative");
    if (s->dt == 0.0 && s->r == 0.0) throw std::invalid_argument("series: the events must not coincide");
  } else if (const auto* t = std::get_if<TrajectoryPair>(&point)) {
    if (!(t->separation >= 0.0)) throw std::invalid_argument("series: separation must be non-negative");
    if (t->i == t->j && t->tau_i == t->tau_j) throw std::invalid_argument("series: the events must not coincide");
  } else {
    const auto& d = std::get<DeSitterPair>(point);
    if (!(d.separation >= 0.0)) throw std::invalid_argument("series: separation must be non-negative");
    if (d.dt == 0.0 && d.separation == 0.0) throw std::invalid_argument("series: the events must not coincide");
  }
}

void put(std::ostream& os, double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  os.write(buf, res.ptr - buf);
}

}  // namespace

cplx thermal_family(const SeriesPoint& point, double temperature) {
  return std::visit(
      [&](const auto& p) -> cplx {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, StaticPair>)
          return static_family(p, temperature);
        else if constexpr (std::is_same_v<P, TrajectoryPair>)
          return trajectory_family(p, temperature);
        else
          return desitter_family(p, temperature);
      },
      point);
}

SeriesCoefficients series_in_temperature(const SeriesPoint& point, const SeriesOptions& options) {
  check(point);
  if (!(options.step > 0.0)) throw std::invalid_argument("series: step must be positive");
  if (options.levels < 2 || options.order < 1 || options.order >= options.levels)
    throw std::invalid_argument("series: need levels >= 2 and 1 <= order < levels");

  SeriesCoefficients out;
  const cplx f0 = thermal_family(point, 0.0);
  out.c[0] = f0;
  std::array<std::vector<RegulatedValue>, 3> samples;
  for (int level = 0; level < options.levels; ++level) {
    const double h = std::ldexp(options.step, -level);
    const cplx fp1 = thermal_family(point, h), fm1 = thermal_family(point, -h);
    const cplx fp2 = thermal_family(point, 2.0 * h), fm2 = thermal_family(point, -2.0 * h);
    const cplx d1 = (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h);
    const cplx d2 = (-(fp2 + fm2) + 16.0 * (fp1 + fm1) - 30.0 * f0) / (12.0 * h * h);
    const cplx d3 = ((fp2 - fm2) - 2.0 * (fp1 - fm1)) / (2.0 * h * h * h);
    samples[0].push_back({h * h, d1, 0.0});
    samples[1].push_back({h * h, d2 / 2.0, 0.0});
    samples[2].push_back({h * h, d3 / 6.0, 0.0});
  }
  for (int k = 0; k < 3; ++k) {
    const Extrapolation ex = extrapolate_epsilon(samples[k], options.order, options.abs_tol, options.rel_tol);
    out.c[k + 1] = ex.value;
    out.error[k + 1] = ex.stability;
    out.stable = out.stable && ex.stable && std::isfinite(std::abs(ex.value));
  }
  return out;
}

double EquivalenceRow::deviation() const {
  return accelerated != 0.0 ? std::abs(thermal - accelerated) / std::abs(accelerated) : std::abs(thermal);
}

EquivalenceRow single_detector_equivalence(double acceleration, double gap, const QuadratureSpec& spec) {
  if (!(acceleration > 0.0) || !std::isfinite(acceleration))
    throw std::invalid_argument("equivalence: acceleration must be positive");
  EquivalenceRow row;
  row.acceleration = acceleration;
  row.gap = gap;
  const ElementValue accelerated = transition_probability_closed(acceleration, gap, 1.0);
  const ScenarioConfig at_rest{Scenario::inertial, 0.0, 0.0};
  const ElementValue thermal = l_element(Detector::A, Detector::A, at_rest, DetectorPair::symmetric(1.0, gap),
                                         ThermalKms{2.0 * kPi / acceleration}, spec, Route::quadrature);
  row.accelerated = accelerated.value.real();
  row.thermal = thermal.value.real();
  row.thermal_error = thermal.error + std::abs(thermal.value.imag());
  row.converged = accelerated.converged && thermal.converged;
  return row;
}

std::vector<EquivalenceRow> single_detector_equivalence_report(const std::vector<double>& accelerations,
                                                               const std::vector<double>& gaps,
                                                               const QuadratureSpec& spec) {
  std::vector<EquivalenceRow> rows;
  for (const double a : accelerations)
    for (const double w : gaps) rows.push_back(single_detector_equivalence(a, w, spec));
  return rows;
}

void write_equivalence_csv(std::ostream& os, const std::vector<EquivalenceRow>& rows) {
  os << "a_sigma,omega_sigma,accelerated_vacuum,static_thermal,thermal_err,rel_deviation,converged\n";
  for (const auto& r : rows) {
    for (const double x : {r.acceleration, r.gap, r.accelerated, r.thermal, r.thermal_error, r.deviation()}) {
      put(os, x);
      os << ',';
    }
    os << (r.converged ? 1 : 0) << '\n';
  }
}

}  // namespace harvest
