#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "curlforce/errors.hpp"
#include "curlforce/pathwork.hpp"
#include "support.hpp"

using namespace curlforce;
using curlforce::testing::cube;
using curlforce::testing::field;
using curlforce::testing::vec;

namespace {

VectorField berry_wide() { return field({"-x*y^2", "-x^3"}, cube(2, -3, 3)); }

ParamPath unit_square() {
  return ParamPath::polyline({vec({0, 0}), vec({1, 0}), vec({1, 1}), vec({0, 1})}, true);
}

// Green's-theorem oracle: integral of -3x^2 + 2xy over [x0,x1] x [y0,y1] in closed form.
double green_rectangle(double x0, double x1, double y0, double y1) {
  const double ix2 = (std::pow(x1, 3) - std::pow(x0, 3)) / 3;
  const double ix = (x1 * x1 - x0 * x0) / 2;
  const double iy = (y1 * y1 - y0 * y0) / 2;
  return -3 * ix2 * (y1 - y0) + 2 * ix * iy;
}

}  // namespace

TEST(LineWork, SegmentExamples) {
  const auto f = berry_wide();
  EXPECT_EQ(line_work(f, ParamPath::polyline({vec({0, 0}), vec({1, 0})}, false)).value, 0.0);
  EXPECT_NEAR(line_work(f, ParamPath::polyline({vec({1, 0}), vec({1, 1})}, false)).value, -1.0,
              1e-14);
}

TEST(LineWork, UnitSquareLoop) {
  const auto w = line_work(berry_wide(), unit_square());
  EXPECT_NEAR(w.value, green_rectangle(0, 1, 0, 1), 1e-12);
  EXPECT_NEAR(w.value, -0.5, 1e-12);
  EXPECT_GE(w.error_estimate, 0.0);
  EXPECT_GT(w.segments, 0);
}

TEST(LineWork, ReverseAndNetZero) {
  const auto f = berry_wide();
  const auto loop = unit_square();
  const auto back = reverse_path(loop);
  EXPECT_TRUE(back.closed());
  const double fwd = line_work(f, loop).value;
  const double rev = line_work(f, back).value;
  EXPECT_NEAR(rev, 0.5, 1e-12);
  EXPECT_LE(std::abs(fwd + rev), 1e-12);

  const auto gamma = ParamPath::parametric({"0.5 + s", "0.2 + sin(3*s)"}, {}, false);
  const auto there_and_back = concatenate({gamma, reverse_path(gamma)});
  EXPECT_TRUE(there_and_back.closed());
  EXPECT_LE(std::abs(line_work(f, there_and_back).value), 1e-12);
}

TEST(LineWork, DoubleReversalIsIdentity) {
  const auto p = ParamPath::parametric({"cos(s)", "s^2 - 1"}, {}, false);
  const auto q = reverse_path(reverse_path(p));
  const auto poly = unit_square();
  const auto poly2 = reverse_path(reverse_path(poly));
  for (int i = 0; i <= 9; ++i) {
    const double s = i / 9.0;
    EXPECT_EQ(p.point(s), q.point(s));
    EXPECT_EQ(poly.point(s), poly2.point(s));
    EXPECT_EQ(p.tangent(s), q.tangent(s));
  }
}

TEST(LineWork, ParametrizationInvariance) {
  const auto f = field({"sin(x*y)", "x^2 - y"}, cube(2, -3, 3));
  const auto straight = ParamPath::polyline({vec({0.2, -0.1}), vec({1.4, 0.9})}, false);
  const auto smooth = ParamPath::parametric({"0.2 + 1.2*s^3", "-0.1 + s^3"}, {}, false);
  EXPECT_NEAR(line_work(f, straight).value, line_work(f, smooth).value, 1e-9);
}

TEST(LineWork, ConservativeLoopsVanish) {
  const auto f = field({"2*x*y + cos(x)", "x^2"}, cube(2, -3, 3));
  const auto circle =
      ParamPath::parametric({"cos(2*pi*s)", "sin(2*pi*s)"}, {{"pi", std::numbers::pi}}, true);
  EXPECT_LE(std::abs(line_work(f, circle).value), 1e-8);
  const auto tri = ParamPath::polyline({vec({1, 1}), vec({2, 1}), vec({1, 2})}, true);
  EXPECT_LE(std::abs(line_work(f, tri).value), 1e-8);
}

TEST(LineWork, HermitePieces) {
  // A quarter circle from Hermite nodes is close to, but not exactly, the arc.
  std::vector<Eigen::VectorXd> nodes, derivs;
  std::vector<double> params;
  const int k = 16;
  for (int i = 0; i <= k; ++i) {
    const double s = static_cast<double>(i) / k, a = 0.5 * std::numbers::pi * s;
    nodes.push_back(vec({std::cos(a), std::sin(a)}));
    derivs.push_back(0.5 * std::numbers::pi * vec({-std::sin(a), std::cos(a)}));
    params.push_back(s);
  }
  const auto arc = ParamPath::hermite(nodes, derivs, params);
  const auto f = field({"-y", "x"}, cube(2, -2, 2));
  EXPECT_NEAR(line_work(f, arc).value, 0.5 * std::numbers::pi, 1e-6);
  EXPECT_EQ(arc.point(0.25), nodes[4]);
}

TEST(LineWork, Errors) {
  const auto f = field({"-x*y^2", "-x^3"}, cube(2, 0.05, 5));
  EXPECT_THROW(line_work(f, unit_square()), DomainError);
  EXPECT_THROW(ParamPath::parametric({"s", "s^2"}, {}, true), InputError);
  EXPECT_THROW(line_work(berry_wide(), ParamPath::parametric({"s", "s", "s"}, {}, false)),
               InputError);
}

TEST(Stokes, MatchesLineWork) {
  const auto f = berry_wide();
  const auto s = stokes_work(f, unit_square());
  EXPECT_NEAR(s.value, -0.5, 1e-10);
  EXPECT_NEAR(s.value, line_work(f, unit_square()).value, 1e-6);

  const auto tri = ParamPath::polyline({vec({1, 1}), vec({2, 1}), vec({1, 2})}, true);
  EXPECT_NEAR(stokes_work(f, tri).value, line_work(f, tri).value, 1e-6);

  const auto shifted = ParamPath::polyline(
      {vec({0.5, 0.875}), vec({1.5, 0.875}), vec({1.5, 1.875}), vec({0.5, 1.875})}, true);
  EXPECT_NEAR(green_rectangle(0.5, 1.5, 0.875, 1.875), -0.5, 1e-14);
  EXPECT_NEAR(stokes_work(f, shifted).value, -0.5, 1e-10);
  EXPECT_NEAR(line_work(f, shifted).value, -0.5, 1e-10);
  EXPECT_NEAR(stokes_work(f, reverse_path(shifted)).value, 0.5, 1e-10);
}

TEST(Stokes, NonConvexPolygonAndConservative) {
  const auto f = field({"sin(y) + x*y", "x^2*y"}, cube(2, -3, 3));
  const auto ell = ParamPath::polyline(
      {vec({0, 0}), vec({2, 0}), vec({2, 1}), vec({1, 1}), vec({1, 2}), vec({0, 2})}, true);
  const double lw = line_work(f, ell).value;
  EXPECT_LE(std::abs(lw - stokes_work(f, ell).value), std::max(1e-6, 1e-6 * std::abs(lw)));
  const auto g = field({"2*x", "2*y"}, cube(2, -3, 3));
  EXPECT_LE(std::abs(stokes_work(g, ell).value), 1e-8);
}

TEST(Stokes, ThreeDimensionalLoop) {
  const auto f = field({"-(y*z)", "-(2*x*z)", "-(x*y)"}, cube(3, -3, 3));
  // Tilted triangle; compare the circulation with the flux of curl F = (x, 0, -z).
  const auto tri = ParamPath::polyline({vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})}, true);
  const double lw = line_work(f, tri).value;
  EXPECT_NEAR(stokes_work(f, tri).value, lw, 1e-9);
  const auto bent = ParamPath::polyline(
      {vec({0, 0, 0}), vec({1, 0, 0}), vec({1, 1, 0.5}), vec({0, 1, 0})}, true);
  EXPECT_THROW(stokes_work(f, bent), InputError);
}

TEST(Stokes, RejectsBadLoops) {
  const auto f = berry_wide();
  const auto bow = ParamPath::polyline({vec({0, 0}), vec({1, 1}), vec({1, 0}), vec({0, 1})}, true);
  EXPECT_THROW(stokes_work(f, bow), InputError);
  EXPECT_THROW(stokes_work(f, ParamPath::polyline({vec({0, 0}), vec({1, 0})}, false)), InputError);
  const auto narrow = field({"-x*y^2", "-x^3"}, cube(2, 0.05, 5));
  const auto around = ParamPath::polyline({vec({0.1, 0.1}), vec({4, 0.1}), vec({0.1, 4})}, true);
  EXPECT_NO_THROW(stokes_work(narrow, around));
}
