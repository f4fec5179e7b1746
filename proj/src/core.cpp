#include "harvest/core.hpp"

#include <string>

namespace harvest {

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::inertial: return "inertial";
    case Scenario::parallel: return "parallel";
    case Scenario::anti_parallel: return "anti-parallel";
    case Scenario::perpendicular: return "perpendicular";
  }
  return "unknown";
}

std::string_view to_string(Detector d) { return d == Detector::A ? "A" : "B"; }

Scenario parse_scenario(std::string_view name) {
  if (name == "inertial") return Scenario::inertial;
  if (name == "parallel") return Scenario::parallel;
  if (name == "anti-parallel" || name == "antiparallel" || name == "anti_parallel") return Scenario::anti_parallel;
  if (name == "perpendicular") return Scenario::perpendicular;
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

void validate(const DetectorParams& p) {
  if (!std::isfinite(p.coupling) || p.coupling < 0.0)
    throw std::invalid_argument("coupling must be finite and non-negative");
  if (!std::isfinite(p.gap)) throw std::invalid_argument("energy gap must be finite");
}

void validate(const DetectorPair& p) {
  validate(p.A);
  validate(p.B);
}

void validate(const ScenarioConfig& cfg) {
  if (!std::isfinite(cfg.acceleration) || cfg.acceleration < 0.0)
    throw std::invalid_argument("acceleration must be finite and non-negative");
  if (!std::isfinite(cfg.separation) || cfg.separation < 0.0)
    throw std::invalid_argument("separation must be finite and non-negative");
  if (is_accelerated(cfg.scenario) && cfg.acceleration == 0.0)
    throw std::invalid_argument(std::string(to_string(cfg.scenario)) +
                                " scenario needs a > 0; use the inertial scenario for a = 0");
  if (cfg.scenario == Scenario::inertial && cfg.acceleration != 0.0)
    throw std::invalid_argument("inertial scenario requires a = 0");
}

double coordinate_time(const ScenarioConfig& cfg, Detector detector, double tau) {
  return trajectory_point(cfg, detector, tau)(0);
}

}  // namespace harvest
