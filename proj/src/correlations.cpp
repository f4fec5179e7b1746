#include "harvest/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace harvest {

namespace {

double clamp_small(double x, double tolerance, const char* name) {
  if (x >= 0.0) return x;
  if (-x <= tolerance) return 0.0;
  throw std::domain_error(std::string("mutual information: ") + name + " = " + std::to_string(x) +
                          " is negative beyond the tolerance; the elements violate L_AA L_BB >= |L_AB|^2");
}

}  // namespace

LPlusMinus l_plus_minus(double laa, double lbb, cplx lab) {
  if (std::abs(lab) == 0.0) return {std::max(laa, lbb), std::min(laa, lbb)};
  const double plus = 0.5 * (laa + lbb) + 0.5 * std::hypot(laa - lbb, 2.0 * std::abs(lab));
  // the determinant gives L- without cancellation
  const double minus = plus > 0.0 ? (laa * lbb - std::norm(lab)) / plus : laa + lbb - plus;
  return {plus, minus};
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double mutual_information(double laa, double lbb, cplx lab, double tolerance) {
  if (!std::isfinite(laa) || !std::isfinite(lbb) || !std::isfinite(std::abs(lab)))
    throw std::invalid_argument("mutual information: elements must be finite");
  laa = clamp_small(laa, tolerance, "L_AA");
  lbb = clamp_small(lbb, tolerance, "L_BB");
  const LPlusMinus l = l_plus_minus(laa, lbb, lab);
  const double minus = clamp_small(l.minus, tolerance, "L_-");
  // paired so that L_AB = 0 gives exactly zero
  return (xlogx(l.plus) - xlogx(std::max(laa, lbb))) + (xlogx(minus) - xlogx(std::min(laa, lbb)));
}

double concurrence(double laa, double lbb, cplx m) {
  return 2.0 * std::max(0.0, std::abs(m) - std::sqrt(std::max(0.0, laa) * std::max(0.0, lbb)));
}

HarvestResult correlate(const ScenarioConfig& cfg, const DetectorPair& det, const FieldState& state,
                        const MatrixElements& e) {
  HarvestResult r{cfg, det, state, e};
  const LPlusMinus l = l_plus_minus(e.laa, e.lbb, e.lab);
  r.l_plus = l.plus;
  r.l_minus = l.minus;
  const double tolerance = e.err_laa + e.err_lbb + e.err_lab + 64.0 * std::numeric_limits<double>::epsilon() * l.plus;
  r.mutual_info = std::max(0.0, mutual_information(e.laa, e.lbb, e.lab, tolerance));
  r.concurrence = concurrence(e.laa, e.lbb, e.m);

  const double inf = std::numeric_limits<double>::infinity();
  const double mod_lab = std::abs(e.lab);
  const double mod_m = std::abs(e.m);
  for (const double sa : {-1.0, 1.0})
    for (const double sb : {-1.0, 1.0})
      for (const double sc : {-1.0, 1.0}) {
        const double laa = std::max(0.0, e.laa + sa * e.err_laa);
        const double lbb = std::max(0.0, e.lbb + sb * e.err_lbb);
        const double lab = std::max(0.0, mod_lab + sc * e.err_lab);
        const double m = std::max(0.0, mod_m + sc * e.err_m);
        const double shrunk = std::min(lab, std::sqrt(laa * lbb));  // stay inside the Cauchy-Schwarz cone
        r.err_mutual_info = std::max(r.err_mutual_info, std::abs(mutual_information(laa, lbb, shrunk, inf) - r.mutual_info));
        r.err_concurrence = std::max(r.err_concurrence, std::abs(concurrence(laa, lbb, m) - r.concurrence));
      }
  return r;
}

HarvestResult harvest(const ScenarioConfig& cfg, const DetectorPair& det, const FieldState& state,
                      const QuadratureSpec& spec) {
  return correlate(cfg, det, state, compute_elements(cfg, det, state, spec));
}

}  // namespace harvest
