#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "curlforce/darboux.hpp"
#include "curlforce/pathwork.hpp"

namespace curlforce {

struct TraceOptions {
  double force_floor = 1e-12;
  double atol = 1e-10;
  double rtol = 1e-10;
  /// Largest step in arclength; 0 selects arclength / 256.
  double h_max = 0.0;
  /// Stop at the domain boundary instead of failing with DomainError.
  bool stop_at_boundary = false;
};

/// A curve tangent to ker(F . dx) through x0, parametrized by signed arclength.
struct ZeroWorkTrace {
  ParamPath path;                      // cubic Hermite through the nodes
  std::vector<Eigen::VectorXd> nodes;  // ordered from the backward end to the forward end
  std::vector<double> arclength;       // signed, 0 at x0
  bool hit_boundary = false;
};

/// Integrates the unit field (-F_y, F_x) / |F| for `arclength` in both
/// directions from x0 (2D only).
ZeroWorkTrace zero_work_trace_2d(const VectorField& f, const Eigen::VectorXd& x0, double arclength,
                                 const TraceOptions& options = {});

struct ReachVerdict {
  Eigen::VectorXd target;
  double distance = 0.0;  // to the traced curve
  bool reachable = false;
};

/// A target is zero-work reachable when it lies within delta of the zero-work
/// curve through x0. delta <= 0 selects 1e-4 * diam(domain); arclength <= 0
/// selects twice the domain diameter. Traces stop at the boundary.
std::vector<ReachVerdict> reachability_report_2d(const VectorField& f, const Eigen::VectorXd& x0,
                                                 const std::vector<Eigen::VectorXd>& targets,
                                                 double delta = 0.0, double arclength = 0.0);

/// Orthonormal basis X, Y of the plane F . w = 0, with X x Y = F / |F|.
struct KernelFrame {
  Eigen::Vector3d base;
  Eigen::Vector3d X, Y, n;
  int axis = 0;  // index of the standard axis least aligned with n
};

/// X = normalize(e_k x n) with e_k least aligned with n (ties to the smaller
/// index), Y = n x X. `axis` >= 0 forces e_k instead of choosing it.
KernelFrame kernel_frame_3d(const VectorField& f, const Eigen::VectorXd& x, double force_floor = 1e-12,
                            int axis = -1);

struct ManeuverResult {
  Eigen::VectorXd start;
  Eigen::VectorXd endpoint;
  Eigen::VectorXd displacement;
  double transverse = 0.0;  // displacement . n(x0)
  double work = 0.0;
  double epsilon = 0.0;
  std::vector<Eigen::VectorXd> path;  // step ends of the four flows
};

struct ManeuverOptions {
  double force_floor = 1e-12;
  double atol = 1e-10;
  double rtol = 1e-10;
};

/// Follows X for eps, Y for eps, -X for eps, -Y for eps, recomputing the
/// frame at every point. Work is accumulated by Simpson's rule on the dense
/// output of each flow. Fails if the least-aligned axis changes on the way.
ManeuverResult bracket_maneuver_3d(const VectorField& f, const Eigen::VectorXd& x0, double eps,
                                   const ManeuverOptions& options = {});

/// |F . [X, Y] + curl F . (X x Y)| at x, with [X, Y] = DY X - DX Y from
/// central differences of the frame fields (step `h`).
double frame_identity_defect(const VectorField& f, const Eigen::VectorXd& x, double h = 1e-5);

ResidualReport frame_identity_report(const VectorField& f, const Region& region, double h = 1e-5);

}  // namespace curlforce
