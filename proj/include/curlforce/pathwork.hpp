#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "curlforce/exprlang.hpp"
#include "curlforce/fieldkit.hpp"

namespace curlforce {

/// A piecewise-smooth curve c : [0, 1] -> R^n. Each piece is a straight
/// segment, a cubic Hermite arc, or a parametric expression in `s`, and owns
/// an equal or explicit share of the global parameter range.
class ParamPath {
 public:
  /// Segments get equal parameter spans. A closed polyline is closed back to
  /// its first vertex unless the last vertex already repeats it.
  static ParamPath polyline(std::vector<Eigen::VectorXd> vertices, bool closed);

  /// One component expression per coordinate, in the variable `s`.
  static ParamPath parametric(const std::vector<std::string>& components,
                              const ConstantTable& constants, bool closed);

  /// Cubic Hermite interpolation of nodes at increasing parameters
  /// params[0] = 0 < ... < params[k] = 1; derivatives are d c / d s.
  static ParamPath hermite(std::vector<Eigen::VectorXd> nodes,
                           std::vector<Eigen::VectorXd> derivatives, std::vector<double> params,
                           bool closed = false);

  int dimension() const { return dimension_; }
  bool closed() const { return closed_; }

  Eigen::VectorXd point(double s) const;
  Eigen::VectorXd tangent(double s) const;

  /// Piece boundaries in the path's own parameter, ascending, from 0 to 1.
  std::vector<double> breakpoints() const;

  /// True when every piece is a straight segment.
  bool is_polygon() const;
  /// Polygon corners in traversal order, without repeating the first one.
  std::vector<Eigen::VectorXd> vertices() const;

  ParamPath reversed() const;

  /// Joins paths end to end; each contributes an equal parameter share.
  friend ParamPath concatenate(const std::vector<ParamPath>& paths);

 private:
  struct Piece {
    enum class Kind { segment, hermite, expression } kind = Kind::segment;
    Eigen::VectorXd a, b;    // segment ends or Hermite nodes
    Eigen::VectorXd ma, mb;  // Hermite derivatives with respect to the local parameter
    std::vector<BoundExpression> components;
    double s0 = 0.0, s1 = 1.0;
    bool flipped = false;

    Eigen::VectorXd point(double tau) const;
    Eigen::VectorXd derivative(double tau) const;
  };

  ParamPath() = default;
  const Piece& locate(double base_s) const;
  void check_closure() const;
  std::vector<Piece> materialized() const;

  std::vector<Piece> pieces_;
  int dimension_ = 0;
  bool closed_ = false;
  bool reversed_ = false;
};

ParamPath concatenate(const std::vector<ParamPath>& paths);

/// s -> c(1 - s). Applying it twice gives back the original path exactly.
ParamPath reverse_path(const ParamPath& path);

struct QuadratureConfig {
  int initial_segments = 64;
  double atol = 1e-10;
  double rtol = 1e-9;
  int max_refinements = 12;
};

struct WorkResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long segments = 0;
};

/// Work of F along the path by composite 5-point Gauss-Legendre on every
/// piece, doubling the segment count until successive values agree.
WorkResult line_work(const VectorField& f, const ParamPath& path, const QuadratureConfig& q = {});

/// Flux of curl F through a planar simple polygon (the loop's orientation
/// fixes the normal), by fan triangulation from the vertex centroid, a
/// degree-5 seven-point triangle rule, and 4-way subdivision refinement.
WorkResult stokes_work(const VectorField& f, const ParamPath& loop, const QuadratureConfig& q = {});

}  // namespace curlforce
