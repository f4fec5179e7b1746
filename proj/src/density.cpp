#include "harvest/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace harvest {

namespace {

constexpr double kPi = std::numbers::pi;

Detector other(Detector d) { return d == Detector::A ? Detector::B : Detector::A; }

// Response of a detector at rest, per unit lambda^2.
double at_rest_response(double gap) {
  return (std::exp(-gap * gap) - std::sqrt(kPi) * gap * std::erfc(gap)) / (4.0 * kPi);
}

// 1/s^2 - 1/sinh^2 s, even in s, -> 1/3 at the origin.
double response_kernel(double s) {
  s = std::abs(s);
  if (s < 0.1) {
    const double x = s * s;
    return 1.0 / 3.0 + x * (-1.0 / 15.0 + x * (2.0 / 189.0 + x * (-1.0 / 675.0 + x * (2.0 / 10395.0))));
  }
  const double sh = std::sinh(s);
  return 1.0 / (s * s) - 1.0 / (sh * sh);
}

// Vacuum two-point functions along the pair of worldlines.
struct VacuumKernel {
  ScenarioConfig cfg;

  // W(x_p(tp), x_q(tq)) at regulator eps.
  cplx operator()(Detector p, double tp, Detector q, double tq, double eps) const {
    if (p == q) {
      if (cfg.scenario == Scenario::inertial) return wightman_minkowski(tp - tq, 0.0, eps);
      const double a = cfg.acceleration;
      return wightman_accel_single(a, tp - tq, 0.5 * a * eps);
    }
    if (p == Detector::A) return wightman_cross(cfg, tp, tq, eps);
    return std::conj(wightman_cross(cfg, tq, tp, eps));
  }

  void ridges(Detector p, double tp, Detector q, double lo, double hi, std::vector<double>& out) const {
    lightlike_crossings(cfg, p, tp, q, lo, hi, out);
  }

  // Time-ordered product of the two fields at (tau_a, tau_b). Near the light
  // cone the ordering is fixed by the sign of Im W, which always selects the
  // later-earlier ordering there; taking it everywhere keeps the integrand
  // continuous across tau_a = tau_b, where the two orderings of the
  // proper-time regulated function differ by complex conjugation.
  cplx time_ordered(double tau_a, double tau_b, double eps) const {
    const cplx w = wightman_cross(cfg, tau_a, tau_b, eps);
    return w.imag() > 0.0 ? std::conj(w) : w;
  }
};

// Static detectors at separation L in a KMS state.
struct ThermalKernel {
  double beta;
  double separation;
  int terms;

  cplx operator()(Detector p, double tp, Detector q, double tq, double eps) const {
    return wightman_thermal(tp - tq, p == q ? 0.0 : separation, beta, eps, terms).value;
  }

  cplx time_ordered(double tau_a, double tau_b, double eps) const {
    return wightman_thermal(std::abs(tau_a - tau_b), separation, beta, eps, terms).value;
  }

  void ridges(Detector p, double tp, Detector q, double lo, double hi, std::vector<double>& out) const {
    auto keep = [&](double t) {
      if (t > lo && t < hi) out.push_back(t);
    };
    if (p == q || separation == 0.0) {
      keep(tp);
      return;
    }
    keep(tp - separation);
    keep(tp + separation);
  }
};

std::string eps_label(double eps) {
  std::ostringstream os;
  os << eps;
  return os.str();
}

// Integrate at every rung of the regulator ladder, then extrapolate to eps = 0.
template <typename IntegrateAt>
ElementValue extrapolated(const QuadratureSpec& spec, const std::string& what, IntegrateAt&& integrate_at) {
  ElementValue out;
  std::vector<RegulatedValue> samples;
  for (int k = 0; k < spec.regulator.levels; ++k) {
    const double eps = spec.regulator.epsilon(k);
    const IntegralResult r = integrate_at(eps);
    out.evaluations += r.evaluations;
    if (!r.converged && out.converged) {
      out.converged = false;
      out.note = what + ": quadrature did not converge at eps=" + eps_label(eps);
    }
    samples.push_back({eps, r.value, r.error});
  }
  const Extrapolation ex = extrapolate_epsilon(samples, spec.regulator.order, spec.abs_tol, spec.rel_tol);
  if (!ex.stable && out.converged) {
    out.converged = false;
    out.note = what + ": eps extrapolation unstable (orders differ by " + eps_label(ex.stability) + ")";
  }
  out.value = ex.value;
  out.error = ex.error();
  return out;
}

template <typename Kernel>
ElementValue l_quadrature(Detector i, Detector j, double gap, const Kernel& kernel, const QuadratureSpec& spec) {
  const RidgeLocator ridges = [&](double t, double lo, double hi, std::vector<double>& out) {
    kernel.ridges(i, t, j, lo, hi, out);
  };
  const std::string what = "L_" + std::string(to_string(i)) + std::string(to_string(j));
  return extrapolated(spec, what, [&](double eps) {
    auto f = [&](double t, double u) {
      return switching(t) * switching(u) * std::polar(1.0, -gap * (t - u)) * kernel(i, t, j, u, eps);
    };
    return integrate_2d(f, spec, ridges);
  });
}

// Both triangles of the time-ordered integral, without the overall sign.
// For static pairs the ordering kink sits on tau_outer = tau_inner, a panel edge here.
template <typename Kernel>
ElementValue m_quadrature(double gap, const Kernel& kernel, const QuadratureSpec& spec, Detector outer) {
  const Detector inner = other(outer);
  const double T = spec.half_width;
  const RidgeLocator ridges = [&](double t, double lo, double hi, std::vector<double>& out) {
    kernel.ridges(outer, t, inner, lo, hi, out);
  };
  QuadratureSpec half = spec;
  half.abs_tol = 0.5 * spec.abs_tol;
  return extrapolated(spec, "M", [&](double eps) {
    auto weight = [&](double t, double u) { return switching(t) * switching(u) * std::polar(1.0, gap * (t + u)); };
    auto f = [&](double t, double u) {
      const cplx w = outer == Detector::A ? kernel.time_ordered(t, u, eps) : kernel.time_ordered(u, t, eps);
      return weight(t, u) * w;
    };
    const IntegralResult lo = integrate_region(f, -T, T, [T](double t) { return std::pair{-T, t}; }, half, ridges);
    const IntegralResult hi = integrate_region(f, -T, T, [T](double t) { return std::pair{t, T}; }, half, ridges);
    return IntegralResult{lo.value + hi.value, lo.error + hi.error, lo.evaluations + hi.evaluations,
                          lo.converged && hi.converged};
  });
}

void check_inputs(const ScenarioConfig& cfg, const DetectorPair& det, const FieldState& state,
                  const QuadratureSpec& spec) {
  validate(cfg);
  validate(det);
  validate(state);
  validate(spec);
  if (std::holds_alternative<DeSitterConformal>(state))
    throw std::invalid_argument("density: de Sitter detector pairs are not supported");
  if (std::holds_alternative<ThermalKms>(state) && cfg.scenario != Scenario::inertial)
    throw std::invalid_argument("density: the thermal state is defined for inertial (static) detectors only");
}

ThermalKernel thermal_kernel(const ThermalKms& th, const ScenarioConfig& cfg, const QuadratureSpec& spec) {
  // Kernel error delta changes an element by at most 2 pi delta.
  const double tol = 0.01 * spec.abs_tol / (2.0 * kPi);
  const double span = 2.0 * spec.half_width;
  const double eps = spec.regulator.initial;
  const int terms = std::max(thermal_terms(span, 0.0, th.beta, eps, tol), thermal_terms(span, cfg.separation, th.beta, eps, tol));
  return ThermalKernel{th.beta, cfg.separation, terms};
}

template <typename Fn>
ElementValue dispatch(const ScenarioConfig& cfg, const FieldState& state, const QuadratureSpec& spec, Fn&& fn) {
  if (const auto* th = std::get_if<ThermalKms>(&state)) return fn(thermal_kernel(*th, cfg, spec));
  return fn(VacuumKernel{cfg});
}

ElementValue scale(ElementValue e, double factor) {
  e.value *= factor;
  e.error *= std::abs(factor);
  return e;
}

void merge_status(MatrixElements& out, const ElementValue& e) {
  if (e.converged) return;
  out.converged = false;
  if (!out.diagnostics.empty()) out.diagnostics += "; ";
  out.diagnostics += e.note;
}

}  // namespace

double MatrixElements::max_error() const { return std::max({err_laa, err_lbb, err_lab, err_m}); }

MatrixElements MatrixElements::scaled(double factor) const {
  MatrixElements s = *this;
  s.laa *= factor;
  s.lbb *= factor;
  s.lab *= factor;
  s.m *= factor;
  const double f = std::abs(factor);
  s.err_laa *= f;
  s.err_lbb *= f;
  s.err_lab *= f;
  s.err_m *= f;
  return s;
}

ElementValue transition_probability_closed(double acceleration, double gap, double coupling,
                                           const QuadratureSpec& spec) {
  if (!(acceleration >= 0.0) || !std::isfinite(acceleration))
    throw std::invalid_argument("transition probability: acceleration must be non-negative");
  if (!std::isfinite(gap)) throw std::invalid_argument("transition probability: gap must be finite");
  if (!(coupling >= 0.0) || !std::isfinite(coupling))
    throw std::invalid_argument("transition probability: coupling must be non-negative");
  const double l2 = coupling * coupling;
  ElementValue out;
  out.value = l2 * at_rest_response(gap);
  if (acceleration == 0.0) return out;

  const double a = acceleration;
  const double freq = 2.0 * gap / a;
  const double alpha = 1.0 / (a * a);
  const double prefactor = a / (4.0 * std::pow(kPi, 1.5));
  auto g = [&](double s) { return std::cos(freq * s) * std::exp(-alpha * s * s) * response_kernel(s); };
  // |h| <= 1/s^2, so the tail is below e^{-alpha S^2} / (2 alpha S^3).
  auto tail = [&](double s) { return std::exp(-alpha * s * s) / (2.0 * alpha * s * s * s); };
  QuadratureSpec unscaled = spec;
  unscaled.abs_tol = spec.abs_tol / prefactor;
  const IntegralResult r = integrate_1d_semiinfinite(g, tail, unscaled);
  out.value += l2 * prefactor * r.value.real();
  out.error = l2 * prefactor * r.error;
  out.evaluations = r.evaluations;
  out.converged = r.converged;
  if (!r.converged) out.note = "transition probability: acceleration integral did not converge";
  return out;
}

ElementValue l_element(Detector i, Detector j, const ScenarioConfig& cfg, const DetectorPair& det,
                       const FieldState& state, const QuadratureSpec& spec, Route route) {
  check_inputs(cfg, det, state, spec);
  const double gap_i = det[i].gap;
  const double gap_j = det[j].gap;
  if (i != j && gap_i != gap_j) throw std::invalid_argument("density: cross elements need equal energy gaps");
  const double coupling = det[i].coupling * det[j].coupling;

  const bool vacuum = std::holds_alternative<MinkowskiVacuum>(state);
  if (route == Route::closed_form && !(vacuum && i == j))
    throw std::invalid_argument("density: no closed form for this element");
  if (vacuum && i == j && route != Route::quadrature)
    return transition_probability_closed(cfg.acceleration, gap_i, det[i].coupling);

  if (coupling == 0.0) return ElementValue{};
  return dispatch(cfg, state, spec, [&](const auto& kernel) {
    return scale(l_quadrature(i, j, gap_i, kernel, spec), coupling);
  });
}

ElementValue m_element(const ScenarioConfig& cfg, const DetectorPair& det, const FieldState& state,
                       const QuadratureSpec& spec, Detector outer) {
  check_inputs(cfg, det, state, spec);
  if (det.A.gap != det.B.gap) throw std::invalid_argument("density: M needs equal energy gaps");
  const double coupling = det.A.coupling * det.B.coupling;
  if (coupling == 0.0) return ElementValue{};
  return dispatch(cfg, state, spec, [&](const auto& kernel) {
    return scale(m_quadrature(det.A.gap, kernel, spec, outer), -coupling);
  });
}

MatrixElements compute_elements(const ScenarioConfig& cfg, const DetectorPair& det, const FieldState& state,
                                const QuadratureSpec& spec) {
  MatrixElements out;
  const ElementValue laa = l_element(Detector::A, Detector::A, cfg, det, state, spec);
  const bool same = det.A.gap == det.B.gap && det.A.coupling == det.B.coupling;
  const ElementValue lbb = same ? laa : l_element(Detector::B, Detector::B, cfg, det, state, spec);
  const ElementValue lab = l_element(Detector::A, Detector::B, cfg, det, state, spec);
  const ElementValue m = m_element(cfg, det, state, spec);
  out.laa = laa.value.real();
  out.lbb = lbb.value.real();
  out.lab = lab.value;
  out.m = m.value;
  out.err_laa = laa.error + std::abs(laa.value.imag());
  out.err_lbb = lbb.error + std::abs(lbb.value.imag());
  out.err_lab = lab.error;
  out.err_m = m.error;
  for (const ElementValue* e : {&laa, &lbb, &lab, &m}) merge_status(out, *e);
  return out;
}

DensityMatrix4 assemble_rho(const MatrixElements& e) {
  if (!std::isfinite(e.laa) || !std::isfinite(e.lbb) || !std::isfinite(std::abs(e.lab)) || !std::isfinite(std::abs(e.m)))
    throw std::invalid_argument("assemble_rho: elements must be finite");
  if (e.laa + e.lbb >= 1.0)
    throw std::domain_error("assemble_rho: L_AA + L_BB >= 1, outside the perturbative regime (reduce the coupling)");
  DensityMatrix4 rho = DensityMatrix4::Zero();
  rho(0, 0) = 1.0 - e.laa - e.lbb;
  rho(1, 1) = e.lbb;
  rho(2, 2) = e.laa;
  rho(2, 1) = e.lab;
  rho(1, 2) = std::conj(e.lab);
  rho(3, 0) = e.m;
  rho(0, 3) = std::conj(e.m);
  return rho;
}

bool is_x_shaped(const DensityMatrix4& rho) {
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      if (r != c && r + c != 3 && rho(r, c) != cplx(0.0, 0.0)) return false;
  return true;
}

}  // namespace harvest
