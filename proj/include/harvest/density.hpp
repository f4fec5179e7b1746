#pragma once

#include <complex>
#include <string>

#include <Eigen/Core>

#include "harvest/core.hpp"
#include "harvest/quadrature.hpp"
#include "harvest/wightman.hpp"

namespace harvest {

/// One density-matrix element with its error estimate. Values carry the
/// coupling factor lambda_i lambda_j.
struct ElementValue {
  cplx value{0.0, 0.0};
  double error = 0.0;
  bool converged = true;
  std::size_t evaluations = 0;
  std::string note;  // first failure encountered, if any
};

struct MatrixElements {
  double laa = 0.0;
  double lbb = 0.0;
  cplx lab{0.0, 0.0};
  cplx m{0.0, 0.0};
  double err_laa = 0.0;
  double err_lbb = 0.0;
  double err_lab = 0.0;
  double err_m = 0.0;
  bool converged = true;
  std::string diagnostics;

  double max_error() const;
  MatrixElements scaled(double factor) const;
};

/// 4x4 detector state in the basis {gg, ge, eg, ee}.
using DensityMatrix4 = Eigen::Matrix4cd;

enum class Route {
  automatic,    // closed form where one exists, quadrature otherwise
  closed_form,  // vacuum transition probabilities only
  quadrature,   // regulated double integral, extrapolated to eps = 0
};

/// Gaussian-switched vacuum response of a detector with acceleration a >= 0:
/// the at-rest term plus the acceleration-induced one-dimensional integral.
ElementValue transition_probability_closed(double acceleration, double gap, double coupling,
                                           const QuadratureSpec& spec = QuadratureSpec::one_dimensional());

/// lambda_i lambda_j int int chi(tau) chi(tau') e^{-i Omega (tau - tau')} W(x_i(tau), x_j(tau')).
ElementValue l_element(Detector i, Detector j, const ScenarioConfig& cfg, const DetectorPair& det,
                       const FieldState& state, const QuadratureSpec& spec = {}, Route route = Route::automatic);

/// The time-ordered element M. Both detectors share t(tau), so the ordering
/// reduces to tau_A versus tau_B and the plane splits into two triangles.
/// At finite regulator the integrand is the time-ordered function with the
/// ordering read off the sign of Im W, so the two triangles join continuously.
/// `outer` selects which proper time is the outer integration variable.
ElementValue m_element(const ScenarioConfig& cfg, const DetectorPair& det, const FieldState& state,
                       const QuadratureSpec& spec = {}, Detector outer = Detector::A);

/// L_AA, L_BB, L_AB and M for one configuration. Quadrature failures are
/// recorded in the result (converged = false, diagnostics), not thrown.
MatrixElements compute_elements(const ScenarioConfig& cfg, const DetectorPair& det, const FieldState& state,
                                const QuadratureSpec& spec = {});

/// The X-shaped second-order state. Throws std::domain_error when
/// L_AA + L_BB >= 1, where the perturbative expansion has broken down.
DensityMatrix4 assemble_rho(const MatrixElements& e);

/// True when every entry off the diagonal and anti-diagonal is exactly zero.
bool is_x_shaped(const DensityMatrix4& rho);

}  // namespace harvest
