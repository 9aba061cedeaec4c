#include <cmath>

#include <gtest/gtest.h>

#include "curlforce/accessibility.hpp"
#include "curlforce/errors.hpp"
#include "support.hpp"

using namespace curlforce;
using curlforce::testing::cube;
using curlforce::testing::field;
using curlforce::testing::quasi;
using curlforce::testing::vec;

namespace {

VectorField berry() { return field({"-x*y^2", "-x^3"}, cube(2, 0.05, 5)); }
double berry_u(const Eigen::VectorXd& p) { return -(1 / p(0) + 1 / p(1)); }

VectorField triple() { return field({"-(y*z)", "-(2*x*z)", "-(x*y)"}, cube(3, -3, 3)); }

}  // namespace

TEST(ZeroWorkTrace, BerryStaysOnLevelSet) {
  const auto trace = zero_work_trace_2d(berry(), vec({1, 1}), 0.5);
  ASSERT_GT(trace.nodes.size(), 2u);
  EXPECT_NEAR(trace.arclength.front(), -0.5, 1e-12);
  EXPECT_NEAR(trace.arclength.back(), 0.5, 1e-12);
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    worst = std::max(worst, std::abs(berry_u(trace.path.point(i / 400.0)) + 2.0));
  }
  EXPECT_LE(worst, 1e-6);
  EXPECT_LE(std::abs(line_work(berry(), trace.path).value), 1e-8);
}

TEST(ZeroWorkTrace, GradientFieldTracesCircle) {
  const auto f = field({"2*x", "2*y"}, cube(2, -2, 2));
  const auto trace = zero_work_trace_2d(f, vec({1, 0}), 1.0);
  for (int i = 0; i <= 200; ++i) EXPECT_NEAR(trace.path.point(i / 200.0).norm(), 1.0, 1e-6);
  EXPECT_LE(std::abs(line_work(f, trace.path).value), 1e-8);
}

TEST(ZeroWorkTrace, Errors) {
  EXPECT_THROW(zero_work_trace_2d(berry(), vec({1, 1}), 50.0), DomainError);
  TraceOptions stop;
  stop.stop_at_boundary = true;
  const auto clipped = zero_work_trace_2d(berry(), vec({1, 1}), 50.0, stop);
  EXPECT_TRUE(clipped.hit_boundary);
  const auto f = field({"x", "y"}, cube(2, -1, 1));
  EXPECT_THROW(zero_work_trace_2d(f, vec({0, 0}), 1.0), NumericalError);
  EXPECT_THROW(zero_work_trace_2d(triple(), vec({1, 1, 1}), 1.0), InputError);
}

TEST(Reachability, BerryLevelOracle) {
  const double y_on = 1.0 / (2.0 - 1.0 / 1.2);  // U(1.2, y) = -2
  EXPECT_NEAR(berry_u(vec({1.2, y_on})), -2.0, 1e-15);
  const auto verdicts =
      reachability_report_2d(berry(), vec({1, 1}), {vec({1.2, y_on}), vec({1.1, 1.1})});
  EXPECT_TRUE(verdicts[0].reachable);
  EXPECT_LE(verdicts[0].distance, 1e-6);
  EXPECT_FALSE(verdicts[1].reachable);
  EXPECT_GT(verdicts[1].distance, 1e-2);
}

TEST(Reachability, ConservativeCircle) {
  const auto f = field({"2*x", "2*y"}, cube(2, -2, 2));
  const auto v = reachability_report_2d(f, vec({1, 0}), {vec({0, 1}), vec({0, 1.2})});
  EXPECT_TRUE(v[0].reachable);
  EXPECT_FALSE(v[1].reachable);
}

TEST(KernelFrame, Examples) {
  const Box d = cube(3, -2, 2);
  const auto up = kernel_frame_3d(field({"0", "0", "1"}, d), vec({0.1, 0, 0}));
  EXPECT_EQ(up.axis, 0);
  EXPECT_NEAR(std::abs(up.X(1)), 1.0, 1e-15);
  EXPECT_LE((up.X.cross(up.Y) - up.n).norm(), 1e-15);

  const auto chiral = kernel_frame_3d(field({"y", "0", "1"}, d), vec({1, 0, 0}));
  EXPECT_NEAR(chiral.X(2), 0.0, 1e-15);
  EXPECT_NEAR(chiral.Y(2), 0.0, 1e-15);

  const auto f = triple();
  for (const auto& p : sample_points(quasi(cube(3, -3, 3), 100))) {
    const auto fr = kernel_frame_3d(f, p);
    const Eigen::Vector3d F = value(f, p);
    EXPECT_LE(std::abs(F.dot(fr.X)), 1e-12 * std::max(1.0, F.norm()));
    EXPECT_LE(std::abs(F.dot(fr.Y)), 1e-12 * std::max(1.0, F.norm()));
    EXPECT_NEAR(fr.X.norm(), 1.0, 1e-15);
    EXPECT_NEAR(fr.Y.norm(), 1.0, 1e-15);
    EXPECT_LE(std::abs(fr.X.dot(fr.Y)), 1e-15);
    EXPECT_LE((fr.X.cross(fr.Y) - fr.n).norm(), 1e-15);
  }
  EXPECT_THROW(kernel_frame_3d(field({"0", "0", "0"}, d), vec({0, 0, 0})), NumericalError);
}

TEST(BracketManeuver, ChiralFieldScalesQuadratically) {
  const auto f = field({"y", "0", "1"}, cube(3, -1, 1));
  const auto a = bracket_maneuver_3d(f, vec({0, 0, 0}), 0.1);
  const auto b = bracket_maneuver_3d(f, vec({0, 0, 0}), 0.05);
  const double ratio = std::abs(a.transverse) / std::abs(b.transverse);
  EXPECT_GE(ratio, 3.6);
  EXPECT_LE(ratio, 4.4);
  EXPECT_LE(std::abs(a.work), 1e-8);
  EXPECT_LE(std::abs(b.work), 1e-8);
}

TEST(BracketManeuver, ConservativeStaysOnLevelPlane) {
  const auto f = field({"1", "1", "1"}, cube(3, -1, 1));
  const auto r = bracket_maneuver_3d(f, vec({0.1, 0.2, -0.3}), 0.1);
  EXPECT_LE(std::abs(r.endpoint.sum() - 0.0), 1e-8);
  EXPECT_LE(std::abs(r.work), 1e-8);
}

TEST(BracketManeuver, HelicityFreeIsHigherOrder) {
  const auto f = triple();
  const auto a = bracket_maneuver_3d(f, vec({1, 1, 1}), 0.1);
  const auto b = bracket_maneuver_3d(f, vec({1, 1, 1}), 0.05);
  const bool tiny = std::abs(a.transverse) < 1e-10 && std::abs(b.transverse) < 1e-10;
  EXPECT_TRUE(tiny || std::abs(a.transverse) / std::abs(b.transverse) >= 7.0);
  EXPECT_LE(std::abs(a.work), 1e-8);
}

TEST(FrameIdentity, MatchesCurlAndHelicity) {
  const Box d = cube(3, 0.5, 2);
  for (const auto& comps : std::vector<std::vector<std::string>>{
           {"y", "0", "1"}, {"-(y*z)", "-(2*x*z)", "-(x*y)"}, {"sin(y*z)", "x^2 + z", "exp(x)*y"}}) {
    const auto f = field(comps, d);
    EXPECT_LE(frame_identity_report(f, quasi(d, 100)).max, 1e-5);
  }
}
