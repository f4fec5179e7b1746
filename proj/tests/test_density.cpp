#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "harvest/correlations.hpp"
#include "harvest/density.hpp"
#include "oracle_values.hpp"

using namespace harvest;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Scenario kAccelerated[] = {Scenario::parallel, Scenario::anti_parallel, Scenario::perpendicular};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

const FieldState kVacuum = MinkowskiVacuum{};

// M with the ordering imposed by a tanh step of sharpness k over the whole
// plane, regulated by the plain (un-reordered) cross function.
cplx smooth_step_m(const ScenarioConfig& cfg, double gap, double k, const QuadratureSpec& spec) {
  const RidgeLocator ridges = [&](double t, double lo, double hi, std::vector<double>& out) {
    lightlike_crossings(cfg, Detector::A, t, Detector::B, lo, hi, out);
    if (t > lo && t < hi) out.push_back(t);
  };
  std::vector<RegulatedValue> samples;
  for (int level = 0; level < spec.regulator.levels; ++level) {
    const double eps = spec.regulator.epsilon(level);
    auto f = [&](double ta, double tb) {
      const cplx ab = wightman_cross(cfg, ta, tb, eps);
      const double step = 0.5 * (1.0 + std::tanh(k * (ta - tb)));
      const cplx ordered = step * ab + (1.0 - step) * std::conj(ab);
      return -switching(ta) * switching(tb) * std::polar(1.0, gap * (ta + tb)) * ordered;
    };
    const IntegralResult r = integrate_2d(f, spec, ridges);
    samples.push_back({eps, r.value, r.error});
  }
  return extrapolate_epsilon(samples, spec.regulator.order, spec.abs_tol, spec.rel_tol).value;
}

}  // namespace

TEST_CASE("closed-form transition probability") {
  const ElementValue rest = transition_probability_closed(0.0, 1.0, 1.0);
  CHECK(rel(rest.value.real(), oracle::kInertialP_1) < 1e-12);
  CHECK(rest.value.real() == doctest::Approx(7.089e-3).epsilon(1e-3));

  struct Row {
    double a, w, expected;
  };
  const Row table[] = {
      {0.5, 0.05, oracle::kLjj_a0p5_w0p05}, {0.5, 0.5, oracle::kLjj_a0p5_w0p5}, {0.5, 1, oracle::kLjj_a0p5_w1},
      {0.5, 2, oracle::kLjj_a0p5_w2},       {1, 0.05, oracle::kLjj_a1_w0p05},   {1, 0.5, oracle::kLjj_a1_w0p5},
      {1, 1, oracle::kLjj_a1_w1},           {1, 2, oracle::kLjj_a1_w2},         {2, 0.05, oracle::kLjj_a2_w0p05},
      {2, 0.5, oracle::kLjj_a2_w0p5},       {2, 1, oracle::kLjj_a2_w1},         {2, 2, oracle::kLjj_a2_w2},
      {4, 0.05, oracle::kLjj_a4_w0p05},     {4, 0.5, oracle::kLjj_a4_w0p5},     {4, 1, oracle::kLjj_a4_w1},
      {4, 2, oracle::kLjj_a4_w2},
  };
  for (const Row& r : table) {
    const ElementValue e = transition_probability_closed(r.a, r.w, 1.0);
    CHECK(e.converged);
    CHECK(rel(e.value.real(), r.expected) < 1e-8);
    CHECK(std::abs(e.value.real() - r.expected) <= std::max(10.0 * e.error, 1e-14));
  }

  const ElementValue huge_gap = transition_probability_closed(1.0, 6.0, 1.0);
  CHECK(huge_gap.value.real() < 1e-8);
  CHECK(std::abs(huge_gap.value.real() - oracle::kLjj_a1_w6) < 1e-14);

  const double p05 = transition_probability_closed(0.5, 0.5, 1.0).value.real();
  const double p1 = transition_probability_closed(1.0, 0.5, 1.0).value.real();
  const double p2 = transition_probability_closed(2.0, 0.5, 1.0).value.real();
  CHECK(p2 > p1);
  CHECK(p1 > p05);

  CHECK(transition_probability_closed(1.0, 0.5, 0.1).value.real() == doctest::Approx(0.01 * p1).epsilon(1e-14));
  CHECK_THROWS_AS(transition_probability_closed(-1.0, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("two-dimensional route agrees with the closed form") {
  const ScenarioConfig cfg{Scenario::parallel, 1.0, 1.0};
  const DetectorPair det = DetectorPair::symmetric(1.0, 0.5);
  const ElementValue brute = l_element(Detector::A, Detector::A, cfg, det, kVacuum, {}, Route::quadrature);
  CHECK(brute.converged);
  CHECK(rel(brute.value.real(), oracle::kLjj_a1_w0p5) < 1e-5);
  CHECK(std::abs(brute.value.imag()) < 1e-8);

  const double accel_part = brute.value.real() - oracle::kInertialP_0p5;
  CHECK(rel(accel_part, oracle::kAccelTerm_a1_w0p5) < 1e-6);
}

TEST_CASE("inertial detectors against the oracles") {
  const ScenarioConfig cfg{Scenario::inertial, 0.0, 1.0};
  const DetectorPair det = DetectorPair::symmetric(1.0, 1.0);
  const ElementValue rest = l_element(Detector::A, Detector::A, cfg, det, kVacuum, {}, Route::quadrature);
  CHECK(rel(rest.value.real(), oracle::kInertialP_1) < 1e-6);

  const ElementValue lab = l_element(Detector::A, Detector::B, cfg, det, kVacuum);
  CHECK(rel(lab.value, cplx(oracle::kLabInertialRe_w1_L1, oracle::kLabInertialIm_w1_L1)) < 1e-6);
  CHECK(std::abs(lab.value.real() - oracle::kLabInertialRe_w1_L1) <= 10.0 * lab.error + 1e-12);

  const ElementValue m = m_element(cfg, det, kVacuum);
  CHECK(m.converged);
  CHECK(rel(m.value, cplx(oracle::kMInertialRe_w1_L1, oracle::kMInertialIm_w1_L1)) < 1e-6);
  CHECK(std::abs(m.value - cplx(oracle::kMInertialRe_w1_L1, oracle::kMInertialIm_w1_L1)) <= 10.0 * m.error + 1e-12);

  const DetectorPair far = DetectorPair::symmetric(1.0, 0.5);
  const ElementValue lab7 = l_element(Detector::A, Detector::B, {Scenario::inertial, 0.0, 7.0}, far, kVacuum);
  CHECK(rel(lab7.value.real(), oracle::kLabInertialRe_w0p5_L7) < 1e-5);
}

TEST_CASE("zero coupling") {
  const ScenarioConfig cfg{Scenario::anti_parallel, 1.0, 1.0};
  const DetectorPair det = DetectorPair::symmetric(0.0, 0.5);
  CHECK(l_element(Detector::A, Detector::A, cfg, det, kVacuum).value == cplx(0.0));
  CHECK(l_element(Detector::A, Detector::B, cfg, det, kVacuum).value == cplx(0.0));
  CHECK(m_element(cfg, det, kVacuum).value == cplx(0.0));
}

TEST_CASE("both detectors share the transition probability") {
  const DetectorPair det = DetectorPair::symmetric(1.0, 0.5);
  for (Scenario s : kAccelerated) {
    const ScenarioConfig cfg{s, 1.0, 1.0};
    const ElementValue a = l_element(Detector::A, Detector::A, cfg, det, kVacuum, {}, Route::quadrature);
    const ElementValue b = l_element(Detector::B, Detector::B, cfg, det, kVacuum, {}, Route::quadrature);
    CHECK(std::abs(a.value - b.value) <= a.error + b.error);
    const MatrixElements e = compute_elements(cfg, det, kVacuum);
    CHECK(e.laa == e.lbb);
  }
}

TEST_CASE("swapping the detectors") {
  const DetectorPair det = DetectorPair::symmetric(1.0, 0.5);
  for (Scenario s : kAccelerated) {
    const ScenarioConfig cfg{s, 1.5, 1.0};
    const ElementValue ab = l_element(Detector::A, Detector::B, cfg, det, kVacuum);
    const ElementValue ba = l_element(Detector::B, Detector::A, cfg, det, kVacuum);
    CHECK(std::abs(ba.value - std::conj(ab.value)) < 1e-8);
    const ElementValue ma = m_element(cfg, det, kVacuum, {}, Detector::A);
    const ElementValue mb = m_element(cfg, det, kVacuum, {}, Detector::B);
    CHECK(std::abs(std::abs(ma.value) - std::abs(mb.value)) < 1e-8);
  }
}

TEST_CASE("triangle split matches a smooth step") {
  QuadratureSpec spec;
  spec.abs_tol = 1e-10;
  const ScenarioConfig inertial{Scenario::inertial, 0.0, 1.0};
  const cplx oracle_m(oracle::kMInertialRe_w1_L1, oracle::kMInertialIm_w1_L1);
  const double coarse = std::abs(smooth_step_m(inertial, 1.0, 5.0, spec) - oracle_m);
  const double sharp = std::abs(smooth_step_m(inertial, 1.0, 80.0, spec) - oracle_m);
  CHECK(sharp < coarse);
  CHECK(sharp < 1e-7);

  const ScenarioConfig parallel{Scenario::parallel, 1.0, 1.0};
  const ElementValue split = m_element(parallel, DetectorPair::symmetric(1.0, 0.5), kVacuum, spec);
  const cplx smooth = smooth_step_m(parallel, 0.5, 80.0, spec);
  CHECK(std::abs(split.value - smooth) < 1e-6);
}

TEST_CASE("density matrix assembly") {
  const DensityMatrix4 empty = assemble_rho(MatrixElements{});
  CHECK(empty.isApprox(Eigen::Vector4cd(1, 0, 0, 0).asDiagonal().toDenseMatrix()));

  MatrixElements e;
  e.laa = 0.03;
  e.lbb = 0.02;
  e.lab = cplx(0.01, -0.004);
  e.m = cplx(-0.02, 0.015);
  const DensityMatrix4 rho = assemble_rho(e);
  CHECK(rho.trace() == cplx(1.0, 0.0));
  CHECK(rho == rho.adjoint());
  CHECK(is_x_shaped(rho));
  CHECK(rho(2, 1) == e.lab);
  CHECK(rho(3, 0) == e.m);
  CHECK(rho(3, 3) == cplx(0.0));

  Eigen::Matrix2cd inner;
  inner << rho(1, 1), rho(1, 2), rho(2, 1), rho(2, 2);
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(inner).eigenvalues();
  const LPlusMinus lpm = l_plus_minus(e.laa, e.lbb, e.lab);
  CHECK(ev(0) == doctest::Approx(lpm.minus).epsilon(1e-14));
  CHECK(ev(1) == doctest::Approx(lpm.plus).epsilon(1e-14));

  DensityMatrix4 bent = rho;
  bent(0, 1) = 1e-9;
  CHECK_FALSE(is_x_shaped(bent));

  e.laa = 0.6;
  e.lbb = 0.4;
  CHECK_THROWS_AS(assemble_rho(e), std::domain_error);
  e.laa = NAN;
  CHECK_THROWS_AS(assemble_rho(e), std::invalid_argument);
}

TEST_CASE("computed state is consistent") {
  const DetectorPair det = DetectorPair::symmetric(0.1, 0.5);
  for (Scenario s : kAccelerated) {
    const ScenarioConfig cfg{s, 1.0, 1.0};
    const MatrixElements e = compute_elements(cfg, det, kVacuum);
    CHECK(e.converged);
    const double err = e.err_laa + e.err_lbb + 2.0 * e.err_lab;
    CHECK(e.laa * e.lbb - std::norm(e.lab) >= -err);
    const DensityMatrix4 rho = assemble_rho(e);
    CHECK(rho == rho.adjoint());
    CHECK(rho.trace() == cplx(1.0, 0.0));
    CHECK(is_x_shaped(rho));
    const Eigen::Vector4d ev = Eigen::SelfAdjointEigenSolver<DensityMatrix4>(rho).eigenvalues();
    const LPlusMinus lpm = l_plus_minus(e.laa, e.lbb, e.lab);
    CHECK(lpm.minus >= -err);
    CHECK(std::abs(std::min(0.0, ev.minCoeff())) <= 2.0 * std::norm(e.m));
  }
}

TEST_CASE("elements scale as lambda squared") {
  const ScenarioConfig cfg{Scenario::perpendicular, 1.0, 1.0};
  const MatrixElements one = compute_elements(cfg, DetectorPair::symmetric(0.1, 0.5), kVacuum);
  const MatrixElements two = compute_elements(cfg, DetectorPair::symmetric(0.2, 0.5), kVacuum);
  const double tol = 8.0 * std::numeric_limits<double>::epsilon();
  CHECK(std::abs(two.laa / one.laa - 4.0) <= 4.0 * tol);
  CHECK(std::abs(two.lbb / one.lbb - 4.0) <= 4.0 * tol);
  CHECK(std::abs(two.lab / one.lab - 4.0) <= 4.0 * tol);
  CHECK(std::abs(two.m / one.m - 4.0) <= 4.0 * tol);
}

TEST_CASE("no distillable entanglement at high acceleration") {
  const ScenarioConfig cfg{Scenario::parallel, 4.0, 1.0};
  const MatrixElements e = compute_elements(cfg, DetectorPair::symmetric(1.0, 0.5), kVacuum);
  CHECK(e.converged);
  CHECK(2.0 * std::abs(e.m) < 2.0 * std::sqrt(e.laa * e.lbb));
}

TEST_CASE("thermal bath elements") {
  const ScenarioConfig cfg{Scenario::inertial, 0.0, 1.0};
  const DetectorPair det = DetectorPair::symmetric(1.0, 1.0);
  const MatrixElements cold = compute_elements(cfg, det, ThermalKms{1e4});
  const MatrixElements vac = compute_elements(cfg, det, kVacuum);
  CHECK(std::abs(cold.laa - vac.laa) < 1e-6);
  CHECK(std::abs(cold.lab - vac.lab) < 1e-6);
  CHECK(std::abs(cold.m - vac.m) < 1e-6);

  // Im M is the commutator part and does not depend on the state.
  const MatrixElements hot = compute_elements(cfg, det, ThermalKms{1.0});
  CHECK(hot.converged);
  CHECK(hot.laa > vac.laa);
  CHECK(std::abs(hot.m.imag() - vac.m.imag()) < 1e-6);
}

TEST_CASE("input checks") {
  const DetectorPair det = DetectorPair::symmetric(1.0, 0.5);
  const ScenarioConfig acc{Scenario::parallel, 1.0, 1.0};
  CHECK_THROWS_AS(l_element(Detector::A, Detector::B, acc, det, DeSitterConformal{0.1}), std::invalid_argument);
  CHECK_THROWS_AS(m_element(acc, det, ThermalKms{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(l_element(Detector::A, Detector::B, acc, det, kVacuum, {}, Route::closed_form),
                  std::invalid_argument);
  DetectorPair uneven = det;
  uneven.B.gap = 1.0;
  CHECK_THROWS_AS(l_element(Detector::A, Detector::B, acc, uneven, kVacuum), std::invalid_argument);
  CHECK_THROWS_AS(m_element(acc, uneven, kVacuum), std::invalid_argument);
  CHECK_THROWS_AS(compute_elements({Scenario::parallel, 0.0, 1.0}, det, kVacuum), std::invalid_argument);
}

TEST_CASE("quadrature failure is recorded, not thrown") {
  QuadratureSpec starved;
  starved.max_evaluations = 2000;
  const MatrixElements e = compute_elements({Scenario::anti_parallel, 1.0, 1.0}, DetectorPair::symmetric(1.0, 0.5),
                                            kVacuum, starved);
  CHECK_FALSE(e.converged);
  CHECK(e.diagnostics.find("did not converge") != std::string::npos);
}
