#pragma once

#include <complex>

#include "harvest/core.hpp"
#include "harvest/density.hpp"
#include "harvest/wightman.hpp"

namespace harvest {

struct LPlusMinus {
  double plus = 0.0;
  double minus = 0.0;
};

/// Eigenvalues of the inner 2x2 block of rho_AB.
LPlusMinus l_plus_minus(double laa, double lbb, cplx lab);

/// x ln x with the continuous extension 0 at x = 0.
double xlogx(double x);

/// L+ ln L+ + L- ln L- - L_AA ln L_AA - L_BB ln L_BB.
/// Negative L_AA, L_BB or L- no larger than `tolerance` in magnitude are
/// clamped to zero; anything beyond it throws std::domain_error.
double mutual_information(double laa, double lbb, cplx lab, double tolerance = 0.0);

/// 2 max(0, |M| - sqrt(L_AA L_BB)).
double concurrence(double laa, double lbb, cplx m);

struct HarvestResult {
  ScenarioConfig config;
  DetectorPair detectors;
  FieldState state;
  MatrixElements elements;
  double l_plus = 0.0;
  double l_minus = 0.0;
  double mutual_info = 0.0;
  double concurrence = 0.0;
  double err_mutual_info = 0.0;
  double err_concurrence = 0.0;

  bool converged() const { return elements.converged; }
};

/// Correlation measures for already computed elements. Errors are the largest
/// deviation over the corners of the element error box.
HarvestResult correlate(const ScenarioConfig& cfg, const DetectorPair& det, const FieldState& state,
                        const MatrixElements& elements);

/// compute_elements followed by correlate.
HarvestResult harvest(const ScenarioConfig& cfg, const DetectorPair& det, const FieldState& state,
                      const QuadratureSpec& spec = {});

}  // namespace harvest
