#include "harvest/wightman.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace harvest {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvFourPiSq = 1.0 / (4.0 * kPi * kPi);

struct Tail {
  cplx sum{0.0, 0.0};
  double bound = 0.0;
};

// sum_{|n| > N} 1/((z + i n beta)^2 - r^2) via the midpoint Euler-Maclaurin
// formula: integral from N + 1/2 plus the f'/24 correction. The size of the
// next (7/5760 f''') term, doubled, is returned as the bound.
Tail image_tail(cplx z, double r, double beta, int terms) {
  Tail t;
  const double x = terms + 0.5;
  if (x * beta < 2.0 * (std::abs(z) + r)) {
    t.bound = std::numeric_limits<double>::infinity();  // not yet in the asymptotic regime
    return t;
  }
  for (const double b : {beta, -beta}) {
    const cplx ib(0.0, b);
    const cplx q = z + ib * x;
    const cplx den = q * q - r * r;
    const cplx w = r / q;
    cplx integral;
    if (std::abs(w) < 1e-4)
      integral = (1.0 + w * w / 3.0 + w * w * w * w / 5.0) / (ib * q);
    else
      integral = std::atanh(w) / (r * ib);
    const cplx d1 = ib * (-2.0 * q) / (den * den);
    const cplx den2 = den * den;
    const cplx d3 = ib * ib * ib * (-24.0 * q * (q * q + r * r)) / (den2 * den2);
    t.sum += integral + d1 / 24.0;
    t.bound += 2.0 * (7.0 / 5760.0) * std::abs(d3);
  }
  return t;
}

// Explicit images n = -terms..terms (skipping n = 0 unless requested), dt >= 0.
cplx image_sum(double dt, double r, double beta, double eps, int terms, bool with_vacuum) {
  const double r2 = r * r;
  cplx sum(0.0, 0.0);
  auto term = [&](double im) {
    const cplx den(dt * dt - im * im - r2, 2.0 * dt * im);
    return 1.0 / den;
  };
  for (int n = terms; n >= 1; --n) sum += term(n * beta - eps) + term(-n * beta - eps);
  if (with_vacuum) sum += term(-eps);
  return sum;
}

ThermalSum thermal_impl(double dt, double r, double beta, double eps, int terms, bool with_vacuum) {
  if (!(r >= 0.0)) throw std::invalid_argument("thermal Wightman: spatial distance must be non-negative");
  if (terms < 0) throw std::invalid_argument("thermal Wightman: image count must be non-negative");
  beta = std::abs(beta);
  if (!(beta > 0.0)) throw std::invalid_argument("thermal Wightman: beta must be non-zero");
  if (dt < 0.0) {
    ThermalSum s = thermal_impl(-dt, r, beta, eps, terms, with_vacuum);
    s.value = std::conj(s.value);
    return s;
  }
  const Tail tail = image_tail(cplx(dt, -eps), r, beta, terms);
  ThermalSum s;
  s.terms = terms;
  s.value = -kInvFourPiSq * (image_sum(dt, r, beta, eps, terms, with_vacuum) + tail.sum);
  s.tail_bound = kInvFourPiSq * tail.bound;
  return s;
}

}  // namespace

void validate(const FieldState& state) {
  if (const auto* th = std::get_if<ThermalKms>(&state)) {
    if (!(th->beta > 0.0) || !std::isfinite(th->beta)) throw std::invalid_argument("thermal state: beta must be positive");
  } else if (const auto* ds = std::get_if<DeSitterConformal>(&state)) {
    if (!(ds->temperature >= 0.0) || !std::isfinite(ds->temperature))
      throw std::invalid_argument("de Sitter state: temperature must be non-negative");
  }
}

std::string describe(const FieldState& state) {
  std::ostringstream os;
  os.precision(17);
  if (std::holds_alternative<MinkowskiVacuum>(state))
    os << "vacuum";
  else if (const auto* th = std::get_if<ThermalKms>(&state))
    os << "thermal(beta=" << th->beta << ")";
  else
    os << "desitter(T_GH=" << std::get<DeSitterConformal>(state).temperature << ")";
  return os.str();
}

cplx wightman_cross(const ScenarioConfig& cfg, double tau_a, double tau_b, double eps) {
  validate(cfg);
  if (cfg.scenario != Scenario::parallel) return wightman_cross_pullback(cfg, tau_a, tau_b, eps);

  // a^2 (dt^2 - dx^2) = 4 sinh^2 d - 4 a L sinh s sinh d - (a L)^2 with
  // s, d the half sum and half difference of the rapidities; this avoids the
  // cancellation between the two squares at large rapidity. The regulator
  // only moves d off the real axis.
  const double a = cfg.acceleration;
  const double aL = a * cfg.separation;
  const cplx d(0.5 * a * (tau_a - tau_b), -0.5 * a * eps);
  const double s = 0.5 * a * (tau_a + tau_b);
  const cplx sd = std::sinh(d);
  const cplx interval = 4.0 * sd * sd - 4.0 * aL * std::sinh(s) * sd - aL * aL;
  return -(a * a * kInvFourPiSq) / interval;
}

cplx wightman_cross_pullback(const ScenarioConfig& cfg, double tau_a, double tau_b, double eps) {
  const cplx a(cfg.acceleration), L(cfg.separation);
  const SpacetimePoint<cplx> xa = worldline<cplx>(cfg.scenario, Detector::A, a, L, cplx(tau_a, -0.5 * eps));
  const SpacetimePoint<cplx> xb = worldline<cplx>(cfg.scenario, Detector::B, a, L, cplx(tau_b, 0.5 * eps));
  const SpacetimePoint<cplx> d = xa - xb;
  // bilinear, not Hermitian: the interval is continued analytically
  const cplx interval = d(0) * d(0) - d.tail<3>().cwiseProduct(d.tail<3>()).sum();
  return -kInvFourPiSq / interval;
}

void lightlike_crossings(const ScenarioConfig& cfg, Detector i, double tau_i, Detector j, double lo, double hi,
                         std::vector<double>& out) {
  auto keep = [&](double tau) {
    if (tau > lo && tau < hi) out.push_back(tau);
  };
  if (i == j) {
    keep(tau_i);
    return;
  }
  if (cfg.scenario == Scenario::inertial) {
    keep(tau_i - cfg.separation);
    if (cfg.separation > 0.0) keep(tau_i + cfg.separation);
    return;
  }
  // Coincident starting points give a double root that a sign scan cannot see.
  if (cfg.separation == 0.0) keep(tau_i);
  const Point xi = worldline(cfg.scenario, i, cfg.acceleration, cfg.separation, tau_i);
  auto interval = [&](double tau) {
    const Point xj = worldline(cfg.scenario, j, cfg.acceleration, cfg.separation, tau);
    const double dt = xi(0) - xj(0);
    return dt * dt - (xi.tail<3>() - xj.tail<3>()).squaredNorm();
  };
  // A timelike worldline meets the light cone of a point at most twice and
  // crosses it transversally, so sign changes on a fine grid find every root
  // except pairs closer than the grid step.
  constexpr double step = 0.1;
  const int n = std::max(2, static_cast<int>(std::ceil((hi - lo) / step)));
  double left = lo;
  double f_left = interval(left);
  for (int k = 1; k <= n; ++k) {
    const double right = lo + (hi - lo) * k / n;
    const double f_right = interval(right);
    if ((f_left < 0.0) != (f_right < 0.0)) {
      double a = left, b = right, fa = f_left;
      for (int it = 0; it < 60 && b - a > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
        const double m = 0.5 * (a + b);
        const double fm = interval(m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      out.push_back(0.5 * (a + b));
    }
    left = right;
    f_left = f_right;
  }
}

ThermalSum wightman_thermal(double dt, double r, double beta, double eps, int terms) {
  return thermal_impl(dt, r, beta, eps, terms, true);
}

ThermalSum wightman_thermal(const Point& x, const Point& y, double beta, double eps, int terms) {
  return wightman_thermal(x(0) - y(0), (x.tail<3>() - y.tail<3>()).norm(), beta, eps, terms);
}

ThermalSum thermal_correction(double dt, double r, double beta, double eps, int terms) {
  return thermal_impl(dt, r, beta, eps, terms, false);
}

int thermal_terms(double dt, double r, double beta, double eps, double tol) {
  beta = std::abs(beta);
  if (!(beta > 0.0)) throw std::invalid_argument("thermal Wightman: beta must be non-zero");
  const cplx z(std::abs(dt), -eps);
  int terms = std::max(2, static_cast<int>(std::ceil(2.0 * (std::abs(z) + r) / beta)));
  constexpr int cap = 10'000'000;
  while (kInvFourPiSq * image_tail(z, r, beta, terms).bound > tol) {
    if (terms >= cap) throw ConvergenceError("thermal image sum: tail bound above tolerance at the image cap");
    terms = std::min(cap, terms + terms / 2 + 1);
  }
  return terms;
}

cplx wightman_thermal_auto(double dt, double r, double beta, double eps, double tol) {
  return wightman_thermal(dt, r, beta, eps, thermal_terms(dt, r, beta, eps, tol)).value;
}

IntegralResult wightman_thermal_integral(double dt, double r, double beta, const QuadratureSpec& spec) {
  if (!(r >= 0.0)) throw std::invalid_argument("thermal integral: r must be non-negative");
  if (!(beta > 0.0)) throw std::invalid_argument("thermal integral: beta must be positive");
  auto g = [&](double k) {
    const double radial = r > 0.0 ? std::sin(k * r) / r : k;
    return radial * std::cos(k * dt) / std::expm1(beta * k);
  };
  // |g| <= k / (e^{beta k} - 1) <= 2 k e^{-beta k} once beta k >= 1.
  auto tail = [&](double s) {
    if (beta * s < 1.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::exp(-beta * s) * (s / beta + 1.0 / (beta * beta));
  };
  QuadratureSpec scaled = spec;
  scaled.abs_tol = spec.abs_tol * 2.0 * kPi * kPi;
  IntegralResult res = integrate_1d_semiinfinite(g, tail, scaled);
  const double norm = 1.0 / (2.0 * kPi * kPi);
  res.value *= norm;
  res.error *= norm;
  return res;
}

}  // namespace harvest
