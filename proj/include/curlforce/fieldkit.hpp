#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "curlforce/exprlang.hpp"

namespace curlforce {

using Point = Eigen::VectorXd;

/// Analytic derivatives use forward-mode AD; fd uses central differences.
enum class DiffMode { analytic, fd };

/// Central-difference step for coordinate value `xi`: max(1, |xi|) * cbrt(eps).
double fd_step(double xi);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool lo_closed = true;
  bool hi_closed = true;
};

/// Axis-aligned box with per-side open/closed flags.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<Interval> axes);
  static Box closed(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

  int dimension() const { return static_cast<int>(axes_.size()); }
  const Interval& axis(int i) const { return axes_[static_cast<std::size_t>(i)]; }
  Eigen::VectorXd lo() const;
  Eigen::VectorXd hi() const;
  double diameter() const;

  bool contains(const Eigen::Ref<const Eigen::VectorXd>& p) const;
  /// Closed-interval containment of another box (flags ignored).
  bool contains(const Box& other) const;

 private:
  std::vector<Interval> axes_;
};

struct GridPlan {
  std::vector<int> counts;  // cell-centred nodes per axis
};

struct QuasiRandomPlan {
  int count = 0;
  std::uint64_t seed = 0;
};

/// A sampling box plus how to place points in it.
struct Region {
  Box box;
  std::variant<GridPlan, QuasiRandomPlan> plan;

  std::size_t sample_count() const;
};

/// Deterministic sample points. Grid: cell centres; quasi-random: Halton
/// sequence with a seed-derived Cranley-Patterson shift.
std::vector<Point> sample_points(const Region& region);

class ScalarField {
 public:
  ScalarField(int dimension, BoundExpression expression, Box domain);
  static ScalarField parse(std::string_view source, int dimension, const ConstantTable& constants,
                           Box domain);

  int dimension() const { return dimension_; }
  const Box& domain() const { return domain_; }
  const BoundExpression& expression() const { return expr_; }

  /// Evaluation without the domain check (integrator stage points).
  double raw_value(const Eigen::Ref<const Eigen::VectorXd>& p) const { return expr_.value(p); }
  DualValue raw_value_and_gradient(const Eigen::Ref<const Eigen::VectorXd>& p) const {
    return expr_.value_and_gradient(p);
  }

 private:
  int dimension_;
  BoundExpression expr_;
  Box domain_;
};

class VectorField {
 public:
  VectorField(int dimension, std::vector<BoundExpression> components, Box domain);
  static VectorField parse(const std::vector<std::string>& sources, int dimension,
                           const ConstantTable& constants, Box domain);

  int dimension() const { return dimension_; }
  const Box& domain() const { return domain_; }
  const std::vector<BoundExpression>& components() const { return components_; }

  Eigen::VectorXd raw_value(const Eigen::Ref<const Eigen::VectorXd>& p) const;
  Eigen::MatrixXd raw_jacobian(const Eigen::Ref<const Eigen::VectorXd>& p) const;

 private:
  int dimension_;
  std::vector<BoundExpression> components_;
  Box domain_;
};

/// Throws DomainError unless p lies in the box (and has matching dimension).
void require_in_domain(const Box& domain, const Eigen::Ref<const Eigen::VectorXd>& p);

double value(const ScalarField& f, const Eigen::Ref<const Eigen::VectorXd>& p);
Eigen::VectorXd value(const VectorField& f, const Eigen::Ref<const Eigen::VectorXd>& p);

Eigen::VectorXd gradient(const ScalarField& f, const Eigen::Ref<const Eigen::VectorXd>& p,
                         DiffMode mode = DiffMode::analytic);

/// Rows are components: J(i, j) = dF_i / dx_j.
Eigen::MatrixXd jacobian(const VectorField& f, const Eigen::Ref<const Eigen::VectorXd>& p,
                         DiffMode mode = DiffMode::analytic);

/// Curl from a Jacobian: one entry in 2D (z-component), three in 3D.
Eigen::VectorXd curl_from_jacobian(const Eigen::MatrixXd& jac);

Eigen::VectorXd curl(const VectorField& f, const Eigen::Ref<const Eigen::VectorXd>& p,
                     DiffMode mode = DiffMode::analytic);

/// F . curl F; 3D only.
double helicity(const VectorField& f, const Eigen::Ref<const Eigen::VectorXd>& p,
                DiffMode mode = DiffMode::analytic);

/// Central-difference Jacobian of an arbitrary sampler (same step rule as fd mode).
Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
                            const Eigen::Ref<const Eigen::VectorXd>& p);

/// 2D cross product a_x b_y - a_y b_x as a length-1 vector, or the 3D cross product.
Eigen::VectorXd cross(const Eigen::Ref<const Eigen::VectorXd>& a,
                      const Eigen::Ref<const Eigen::VectorXd>& b);

}  // namespace curlforce
