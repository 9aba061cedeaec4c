#include "curlforce/accessibility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Geometry>

#include "curlforce/errors.hpp"
#include "curlforce/ode.hpp"

namespace curlforce {

namespace {

// A locked frame axis may fall behind the least-aligned one by this much in
// |n_k| before the maneuver is abandoned; exact ties at the start point would
// otherwise flip on the first step.
constexpr double kAxisHysteresis = 0.1;

std::string fmt(const Eigen::VectorXd& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p(i);
  os << ")";
  return os.str();
}

// Cuts a step that left the box back to the boundary: returns the last
// inside point found by bisection on the dense output.
std::pair<double, Eigen::VectorXd> clip_to_box(const StepView& step, const Box& box) {
  double lo = step.t0(), hi = step.t1();
  Eigen::VectorXd y_lo = step.y0(), y_hi = step.y1();
  while ((y_hi - y_lo).norm() > 1e-10 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    Eigen::VectorXd y_mid = step.at(mid);
    if (box.contains(y_mid)) {
      lo = mid;
      y_lo = std::move(y_mid);
    } else {
      hi = mid;
      y_hi = std::move(y_mid);
    }
  }
  return {lo, y_lo};
}

int least_aligned_axis(const Eigen::Vector3d& n) {
  int k = 0;
  for (int j = 1; j < 3; ++j) {
    if (std::abs(n(j)) < std::abs(n(k))) k = j;
  }
  return k;
}

KernelFrame frame_from_force(const Eigen::Vector3d& force, const Eigen::Vector3d& x, double floor,
                             int axis) {
  const double norm = force.norm();
  if (!(norm > floor)) {
    throw NumericalError("|F| = " + std::to_string(norm) + " at " + fmt(x) +
                         " is below the floor; equilibrium point, no kernel frame");
  }
  KernelFrame frame;
  frame.base = x;
  frame.n = force / norm;
  frame.axis = axis >= 0 ? axis : least_aligned_axis(frame.n);
  frame.X = Eigen::Vector3d::Unit(frame.axis).cross(frame.n).normalized();
  frame.Y = frame.n.cross(frame.X);
  return frame;
}

KernelFrame raw_frame(const VectorField& f, const Eigen::VectorXd& x, double floor, int axis) {
  return frame_from_force(f.raw_value(x), x, floor, axis);
}

}  // namespace

ZeroWorkTrace zero_work_trace_2d(const VectorField& f, const Eigen::VectorXd& x0, double arclength,
                                 const TraceOptions& options) {
  if (f.dimension() != 2) throw InputError("zero-work tracing is implemented for 2D fields");
  if (!(arclength > 0.0)) throw InputError("arclength must be positive");
  require_in_domain(f.domain(), x0);

  auto unit = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::VectorXd F = f.raw_value(x);
    const double n = F.norm();
    if (!(n > options.force_floor)) {
      throw NumericalError("|F| = " + std::to_string(n) + " at " + fmt(x) +
                           " is below the floor; the zero-work direction is undefined");
    }
    return Eigen::Vector2d(-F(1), F(0)) / n;
  };
  unit(x0);

  OdeSettings settings;
  settings.method = OdeMethod::dopri45;
  settings.atol = options.atol;
  settings.rtol = options.rtol;
  settings.h_max = options.h_max > 0.0 ? options.h_max : arclength / 256.0;

  bool hit_boundary = false;
  auto trace = [&](double sign, std::vector<Eigen::VectorXd>& nodes, std::vector<double>& dist) {
    auto rhs = [&](double, const Eigen::VectorXd& x) -> Eigen::VectorXd { return sign * unit(x); };
    auto observer = [&](const StepView& step) {
      if (f.domain().contains(step.y1())) {
        unit(step.y1());
        nodes.push_back(step.y1());
        dist.push_back(step.t1());
        return StepAction::proceed;
      }
      if (!options.stop_at_boundary) {
        throw DomainError("zero-work trace left the domain near " + fmt(step.y1()), step.y1());
      }
      auto [t, y] = clip_to_box(step, f.domain());
      if (t > step.t0()) {
        nodes.push_back(y);
        dist.push_back(t);
      }
      hit_boundary = true;
      return StepAction::stop;
    };
    solve_ode(rhs, 0.0, x0, arclength, settings, observer);
  };

  std::vector<Eigen::VectorXd> fwd, bwd;
  std::vector<double> fwd_s, bwd_s;
  trace(1.0, fwd, fwd_s);
  trace(-1.0, bwd, bwd_s);

  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> sigma;
  for (std::size_t i = bwd.size(); i-- > 0;) {
    nodes.push_back(bwd[i]);
    sigma.push_back(-bwd_s[i]);
  }
  nodes.push_back(x0);
  sigma.push_back(0.0);
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    nodes.push_back(fwd[i]);
    sigma.push_back(fwd_s[i]);
  }

  const double lo = sigma.front(), span = sigma.back() - lo;
  std::vector<double> params;
  std::vector<Eigen::VectorXd> derivs;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    params.push_back((sigma[i] - lo) / span);
    derivs.push_back(span * unit(nodes[i]));
  }
  params.front() = 0.0;
  params.back() = 1.0;
  ParamPath path = ParamPath::hermite(nodes, derivs, params);
  return {std::move(path), std::move(nodes), std::move(sigma), hit_boundary};
}

std::vector<ReachVerdict> reachability_report_2d(const VectorField& f, const Eigen::VectorXd& x0,
                                                 const std::vector<Eigen::VectorXd>& targets,
                                                 double delta, double arclength) {
  const double diam = f.domain().diameter();
  if (delta <= 0.0) delta = 1e-4 * diam;
  if (arclength <= 0.0) arclength = 2.0 * diam;
  TraceOptions options;
  options.stop_at_boundary = true;
  const auto trace = zero_work_trace_2d(f, x0, arclength, options);

  // Chord approximation of the Hermite curve to bracket the nearest point,
  // then a golden-section search on the curve itself.
  std::vector<double> ss;
  const auto bps = trace.path.breakpoints();
  constexpr int kSub = 16;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    for (int k = 0; k < kSub; ++k) ss.push_back(bps[i] + (bps[i + 1] - bps[i]) * k / kSub);
  }
  ss.push_back(1.0);
  std::vector<Eigen::VectorXd> pts;
  for (double s : ss) pts.push_back(trace.path.point(s));

  std::vector<ReachVerdict> out;
  for (const auto& target : targets) {
    if (target.size() != 2) throw InputError("reachability targets must be 2D points");
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const Eigen::VectorXd d = pts[i + 1] - pts[i];
      const double len2 = d.squaredNorm();
      const double u = len2 > 0.0 ? std::clamp((target - pts[i]).dot(d) / len2, 0.0, 1.0) : 0.0;
      const double dist = (pts[i] + u * d - target).norm();
      if (dist < best) {
        best = dist;
        best_i = i;
      }
    }
    auto dist_at = [&](double s) { return (trace.path.point(s) - target).norm(); };
    double a = ss[best_i > 0 ? best_i - 1 : 0];
    double b = ss[std::min(best_i + 2, ss.size() - 1)];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = dist_at(c), fd = dist_at(d);
    for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = dist_at(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = dist_at(d);
      }
    }
    best = std::min({best, fc, fd});
    out.push_back({target, best, best <= delta});
  }
  return out;
}

KernelFrame kernel_frame_3d(const VectorField& f, const Eigen::VectorXd& x, double force_floor,
                            int axis) {
  if (f.dimension() != 3) throw InputError("kernel frames are defined for 3D fields");
  return frame_from_force(value(f, x), x, force_floor, axis);
}

ManeuverResult bracket_maneuver_3d(const VectorField& f, const Eigen::VectorXd& x0, double eps,
                                   const ManeuverOptions& options) {
  if (f.dimension() != 3) throw InputError("bracket maneuvers are defined for 3D fields");
  if (!(eps > 0.0)) throw InputError("epsilon must be positive");
  const KernelFrame start = kernel_frame_3d(f, x0, options.force_floor);
  const int axis = start.axis;

  OdeSettings settings;
  settings.method = OdeMethod::dopri45;
  settings.atol = options.atol;
  settings.rtol = options.rtol;
  settings.h_max = eps / 8.0;

  ManeuverResult result;
  result.start = x0;
  result.epsilon = eps;
  result.path.push_back(x0);
  Eigen::VectorXd x = x0;

  struct Leg {
    bool use_x;
    double sign;
  };
  for (const Leg leg : {Leg{true, 1.0}, Leg{false, 1.0}, Leg{true, -1.0}, Leg{false, -1.0}}) {
    auto direction = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
      const KernelFrame fr = raw_frame(f, p, options.force_floor, axis);
      return leg.sign * (leg.use_x ? fr.X : fr.Y);
    };
    auto power = [&](const Eigen::VectorXd& p) { return f.raw_value(p).dot(direction(p)); };
    auto rhs = [&](double, const Eigen::VectorXd& p) { return direction(p); };
    auto observer = [&](const StepView& step) {
      const Eigen::VectorXd& y = step.y1();
      if (!f.domain().contains(y)) {
        throw DomainError("maneuver left the domain near " + fmt(y), y);
      }
      const KernelFrame here = raw_frame(f, y, options.force_floor, -1);
      if (std::abs(here.n(axis)) > std::abs(here.n(here.axis)) + kAxisHysteresis) {
        throw NumericalError("kernel frame axis changed during the maneuver near " + fmt(y) +
                             "; try a smaller epsilon");
      }
      const double tm = 0.5 * (step.t0() + step.t1());
      result.work += (step.t1() - step.t0()) / 6.0 *
                     (power(step.y0()) + 4.0 * power(step.at(tm)) + power(y));
      result.path.push_back(y);
      return StepAction::proceed;
    };
    solve_ode(rhs, 0.0, x, eps, settings, observer);
    x = result.path.back();
  }

  result.endpoint = x;
  result.displacement = x - x0;
  result.transverse = result.displacement.dot(Eigen::VectorXd(start.n));
  return result;
}

double frame_identity_defect(const VectorField& f, const Eigen::VectorXd& x, double h) {
  const KernelFrame frame = kernel_frame_3d(f, x);
  Eigen::Matrix3d dX, dY;
  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    const KernelFrame fp = raw_frame(f, xp, 0.0, frame.axis);
    const KernelFrame fm = raw_frame(f, xm, 0.0, frame.axis);
    dX.col(j) = (fp.X - fm.X) / (2 * h);
    dY.col(j) = (fp.Y - fm.Y) / (2 * h);
  }
  const Eigen::Vector3d bracket = dY * frame.X - dX * frame.Y;
  const Eigen::Vector3d F = value(f, x);
  const Eigen::Vector3d c = curl(f, x);
  return std::abs(F.dot(bracket) + c.dot(frame.X.cross(frame.Y)));
}

ResidualReport frame_identity_report(const VectorField& f, const Region& region, double h) {
  if (!f.domain().contains(region.box)) throw InputError("sample region is not inside the field domain");
  ResidualAccumulator acc("|F . [X,Y] + curl F . (X x Y)|");
  for (const auto& p : sample_points(region)) acc.add(p, frame_identity_defect(f, p, h));
  return acc.finish();
}

}  // namespace curlforce
