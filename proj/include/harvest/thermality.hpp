#pragma once

#include <array>
#include <iosfwd>
#include <variant>
#include <vector>

#include "harvest/core.hpp"
#include "harvest/density.hpp"
#include "harvest/quadrature.hpp"

namespace harvest {

/// Two static events in a KMS state; the family is W_th(T = 1/beta) - W_M.
struct StaticPair {
  double dt = 0.0;
  double r = 0.0;
};

/// Events at proper times tau_i, tau_j on the scenario's worldlines with
/// a = 2 pi T, so the events move with T. The family is W(a) - W(a = 0).
struct TrajectoryPair {
  Scenario scenario = Scenario::parallel;
  double separation = 0.0;
  Detector i = Detector::A;
  double tau_i = 0.0;
  Detector j = Detector::A;
  double tau_j = 0.0;
};

/// Comoving points in de Sitter; the family is W_dS(T_GH) - W_M.
struct DeSitterPair {
  double dt = 0.0;
  double dt_sum = 0.0;
  double separation = 0.0;
};

using SeriesPoint = std::variant<StaticPair, TrajectoryPair, DeSitterPair>;

struct SeriesOptions {
  double step = 0.05;  // initial temperature step h
  int levels = 5;      // h, h/2, ..., h/2^(levels-1)
  int order = 2;       // Richardson order in h^2
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
};

/// Taylor coefficients c_0..c_3 of W(T) - W_M about T = 0.
struct SeriesCoefficients {
  std::array<cplx, 4> c{};
  std::array<double, 4> error{};  // Richardson stability estimates
  bool stable = true;
};

/// The family W(T) - W_M evaluated at temperature T (T may be negative: the
/// analytic continuation of each family).
cplx thermal_family(const SeriesPoint& point, double temperature);

/// Five-point central differences in T at T = 0, refined by step halving and
/// Richardson extrapolation in h^2.
SeriesCoefficients series_in_temperature(const SeriesPoint& point, const SeriesOptions& options = {});

struct EquivalenceRow {
  double acceleration = 0.0;
  double gap = 0.0;
  double accelerated = 0.0;  // closed-form vacuum response on the accelerated worldline
  double thermal = 0.0;      // static detector, KMS state at beta = 2 pi / a, 2D quadrature
  double thermal_error = 0.0;
  bool converged = true;

  double deviation() const;  // relative
};

/// Unit-coupling comparison of the two single-detector routes.
EquivalenceRow single_detector_equivalence(double acceleration, double gap, const QuadratureSpec& spec = {});

std::vector<EquivalenceRow> single_detector_equivalence_report(const std::vector<double>& accelerations,
                                                               const std::vector<double>& gaps,
                                                               const QuadratureSpec& spec = {});

void write_equivalence_csv(std::ostream& os, const std::vector<EquivalenceRow>& rows);

}  // namespace harvest
