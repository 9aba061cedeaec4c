#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "curlforce/auxiliary.hpp"
#include "curlforce/errors.hpp"
#include "support.hpp"

using namespace curlforce;
using curlforce::testing::cube;
using curlforce::testing::field;
using curlforce::testing::quasi;
using curlforce::testing::scalar;
using curlforce::testing::vec;

namespace {

Box berry_domain() { return cube(2, 0.05, 5); }

AuxiliaryProblem berry_problem() {
  const Box d = berry_domain();
  AuxiliaryProblem prob{field({"-x*y^2", "-x^3"}, d),
                        {scalar("-(1/x + 1/y)", d), scalar("x^3*y^2", d), std::nullopt},
                        1.0,
                        0.0};
  prob.v_floor = default_v_floor(prob.potentials.V, quasi(cube(2, 0.5, 2), 200));
  return prob;
}

AuxiliaryProblem harmonic_problem() {
  const Box d = cube(2, -3, 3);
  return {field({"-x", "-y"}, d), {scalar("0.5*(x^2 + y^2)", d), scalar("1", d), std::nullopt},
          1.0, 0.0};
}

SimConfig dopri(double t_end, double tol) {
  SimConfig cfg;
  cfg.t_end = t_end;
  cfg.integrator.atol = tol;
  cfg.integrator.rtol = tol;
  return cfg;
}

SimConfig rk4(double t_end, double h) {
  SimConfig cfg;
  cfg.t_end = t_end;
  cfg.integrator.method = OdeMethod::rk4;
  cfg.integrator.step = h;
  return cfg;
}

}  // namespace

TEST(AuxiliaryForce, BerryRescalesToInverseSquares) {
  const auto prob = berry_problem();
  const auto fbar = auxiliary_force(prob);
  for (const auto& p : sample_points(quasi(cube(2, 0.5, 2), 200))) {
    const Eigen::VectorXd expected = vec({-1 / (p(0) * p(0)), -1 / (p(1) * p(1))});
    EXPECT_LE((fbar(p) - expected).norm(), 1e-12 * expected.norm());
    EXPECT_LE((fbar(p) + gradient(prob.potentials.U, p)).norm(), 1e-9);
  }
}

TEST(AuxiliaryForce, UnitVLeavesForceUnchanged) {
  const auto prob = harmonic_problem();
  const auto p = vec({0.3, -1.1});
  EXPECT_EQ(auxiliary_force(prob)(p), value(prob.force, p));
}

TEST(AuxiliaryForce, FloorViolation) {
  const Box d = cube(2, -1, 1);
  AuxiliaryProblem prob{field({"y", "0"}, d), {scalar("x", d), scalar("x", d), std::nullopt}, 1.0,
                        1e-6};
  EXPECT_THROW(auxiliary_force(prob)(vec({0.0, 0.5})), NumericalError);
  EXPECT_NO_THROW(auxiliary_force(prob)(vec({0.5, 0.5})));
}

TEST(AuxiliaryForce, WithThirdPotential) {
  const Box d = cube(3, 0.5, 2);
  // F = (y, 0, 1): U = x, V = -y, W = -z, so (F + grad W)/V = (-1, 0, 0) = -grad U.
  AuxiliaryProblem prob{field({"y", "0", "1"}, d),
                        {scalar("x", d), scalar("-y", d), scalar("-z", d)}, 1.0, 1e-12};
  const auto f = auxiliary_force(prob)(vec({1, 1.5, 1}));
  EXPECT_LE((f - vec({-1, 0, 0})).norm(), 1e-15);
}

TEST(AuxiliaryHamiltonian, Examples) {
  const Box d = cube(2, 0.05, 5);
  EXPECT_EQ(auxiliary_hamiltonian(vec({1, 1}), vec({0, 0}), scalar("x*y", d), 1.0), 1.0);
  EXPECT_EQ(auxiliary_hamiltonian(vec({1, 1}), vec({1, 0}), scalar("0", d), 1.0), 0.5);
  EXPECT_DOUBLE_EQ(
      auxiliary_hamiltonian(vec({1, 1}), vec({0, 0}), berry_problem().potentials.U, 1.0), -2.0);
  EXPECT_THROW(auxiliary_hamiltonian(vec({9, 1}), vec({0, 0}), scalar("x", d), 1.0), DomainError);
}

TEST(AuxiliaryTrajectory, BerryConservesAuxiliaryEnergy) {
  const auto run = auxiliary_trajectory(berry_problem(), vec({1, 1}), vec({0.2, 0}), dopri(1, 1e-9));
  EXPECT_FALSE(run.trajectory.exited_domain);
  EXPECT_LE(run.drift, 1e-6);
  EXPECT_LE(run.drift, 100 * 1e-9);
}

TEST(AuxiliaryTrajectory, HarmonicTenPeriods) {
  const double tol = 1e-10;
  const auto run = auxiliary_trajectory(harmonic_problem(), vec({1, 0}), vec({0, 1}),
                                        dopri(20 * std::numbers::pi, tol));
  EXPECT_LE(run.drift, 1e-8);
  EXPECT_LE(run.drift, 100 * tol);
}

TEST(AuxiliaryTrajectory, RestAtCriticalPoint) {
  const auto run = auxiliary_trajectory(harmonic_problem(), vec({0, 0}), vec({0, 0}), dopri(3, 1e-9));
  EXPECT_EQ(run.drift, 0.0);
  EXPECT_EQ(run.trajectory.states.back().x.norm(), 0.0);
}

TEST(NonlocalSeries, InitialValues) {
  const auto prob = berry_problem();
  const auto traj = integrate(prob.force, vec({1, 1}), vec({0.2, -0.1}), dopri(1, 1e-9));
  const auto series = nonlocal_hamiltonian_series(traj, prob);
  ASSERT_FALSE(series.H.empty());
  EXPECT_EQ(series.pbar.front(), vec({0.2, -0.1}));
  EXPECT_EQ(series.xbar.front(), vec({1, 1}));
  EXPECT_DOUBLE_EQ(series.H.front(), 0.5 * (0.04 + 0.01) - 2.0);
  EXPECT_GE(series.drift, 0.0);
}

TEST(NonlocalSeries, ConservativeReductionMatchesEnergy) {
  auto prob = harmonic_problem();
  prob.mass = 1.0;
  const auto traj = integrate(prob.force, vec({1, 0.5}), vec({0.1, 0.3}), rk4(1, 1e-4));
  const auto series = nonlocal_hamiltonian_series(traj, prob);
  ASSERT_EQ(series.t.size(), traj.states.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    const double energy = traj.kinetic[i] + value(prob.potentials.U, traj.states[i].x);
    worst = std::max(worst, std::abs(series.H[i] - energy));
    EXPECT_LE((series.xbar[i] - traj.states[i].x).norm(), 1e-8);
  }
  EXPECT_LE(worst, 1e-8);
  EXPECT_LE(series.drift, 1e-7);
}

TEST(NonlocalSeries, TrapezoidDefectQuarters) {
  // Compare pbar with m v(t) on a coarse and a half-step grid.
  const auto prob = harmonic_problem();
  auto defect = [&](double h) {
    const auto traj = integrate(prob.force, vec({1, 0.5}), vec({0.1, 0.3}), rk4(1, h));
    const auto series = nonlocal_hamiltonian_series(traj, prob);
    double worst = 0.0;
    for (std::size_t i = 0; i < series.t.size(); ++i) {
      worst = std::max(worst, (series.pbar[i] - traj.states[i].v).norm());
    }
    return worst;
  };
  const double ratio = defect(0.02) / defect(0.01);
  EXPECT_NEAR(ratio, 4.0, 0.4);
}

TEST(NonlocalSeries, RefinementUsesHermiteSamples) {
  const auto prob = harmonic_problem();
  const auto traj = integrate(prob.force, vec({1, 0.5}), vec({0.1, 0.3}), rk4(1, 0.01));
  const auto coarse = nonlocal_hamiltonian_series(traj, prob);
  const auto fine = nonlocal_hamiltonian_series(traj, prob, {4});
  EXPECT_EQ(fine.t.size(), 4 * (coarse.t.size() - 1) + 1);
  EXPECT_LT(fine.drift, coarse.drift);
}
