#include "curlforce/fieldkit.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Geometry>

namespace curlforce {

namespace {

std::string format_point(const Eigen::Ref<const Eigen::VectorXd>& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p(i);
  os << ")";
  return os.str();
}

double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double out = 0.0;
  while (index > 0) {
    out += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return out;
}

enum class Stencil { central, forward, backward };

Stencil stencil_for(const Box& domain, const Eigen::Ref<const Eigen::VectorXd>& p, int axis) {
  const Interval& iv = domain.axis(axis);
  if (iv.lo_closed && p(axis) == iv.lo) return Stencil::forward;
  if (iv.hi_closed && p(axis) == iv.hi) return Stencil::backward;
  return Stencil::central;
}

// Second-order difference of a (scalar- or vector-valued) function along one axis.
template <typename Fn>
auto difference(const Fn& fn, const Eigen::Ref<const Eigen::VectorXd>& p, int axis,
                Stencil stencil) {
  const double h = fd_step(p(axis));
  Eigen::VectorXd q = p;
  auto at = [&](double offset) {
    q(axis) = p(axis) + offset;
    return fn(q);
  };
  switch (stencil) {
    case Stencil::forward:
      return decltype(at(0.0))((-3.0 * at(0.0) + 4.0 * at(h) - at(2.0 * h)) / (2.0 * h));
    case Stencil::backward:
      return decltype(at(0.0))((3.0 * at(0.0) - 4.0 * at(-h) + at(-2.0 * h)) / (2.0 * h));
    case Stencil::central:
      break;
  }
  return decltype(at(0.0))((at(h) - at(-h)) / (2.0 * h));
}

}  // namespace

double fd_step(double xi) { return std::max(1.0, std::abs(xi)) * 6.06e-6; }

Box::Box(std::vector<Interval> axes) : axes_(std::move(axes)) {
  if (axes_.size() != 2 && axes_.size() != 3) {
    throw InputError("domain must have 2 or 3 axes, got " + std::to_string(axes_.size()));
  }
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (!(axes_[i].lo < axes_[i].hi)) {
      throw InputError("degenerate domain on axis " + std::to_string(i) + ": lo must be < hi");
    }
  }
}

Box Box::closed(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  std::vector<Interval> axes;
  for (Eigen::Index i = 0; i < lo.size(); ++i) axes.push_back({lo(i), hi(i), true, true});
  return Box(std::move(axes));
}

Eigen::VectorXd Box::lo() const {
  Eigen::VectorXd v(dimension());
  for (int i = 0; i < dimension(); ++i) v(i) = axis(i).lo;
  return v;
}

Eigen::VectorXd Box::hi() const {
  Eigen::VectorXd v(dimension());
  for (int i = 0; i < dimension(); ++i) v(i) = axis(i).hi;
  return v;
}

double Box::diameter() const { return (hi() - lo()).norm(); }

bool Box::contains(const Eigen::Ref<const Eigen::VectorXd>& p) const {
  if (p.size() != dimension()) return false;
  for (int i = 0; i < dimension(); ++i) {
    const Interval& iv = axis(i);
    const double x = p(i);
    if (!std::isfinite(x)) return false;
    if (x < iv.lo || (x == iv.lo && !iv.lo_closed)) return false;
    if (x > iv.hi || (x == iv.hi && !iv.hi_closed)) return false;
  }
  return true;
}

bool Box::contains(const Box& other) const {
  if (other.dimension() != dimension()) return false;
  for (int i = 0; i < dimension(); ++i) {
    if (other.axis(i).lo < axis(i).lo || other.axis(i).hi > axis(i).hi) return false;
  }
  return true;
}

std::size_t Region::sample_count() const {
  if (const auto* grid = std::get_if<GridPlan>(&plan)) {
    std::size_t n = 1;
    for (int c : grid->counts) n *= static_cast<std::size_t>(std::max(c, 0));
    return n;
  }
  return static_cast<std::size_t>(std::max(std::get<QuasiRandomPlan>(plan).count, 0));
}

std::vector<Point> sample_points(const Region& region) {
  const int dim = region.box.dimension();
  const Eigen::VectorXd lo = region.box.lo();
  const Eigen::VectorXd span = region.box.hi() - lo;
  std::vector<Point> points;
  if (region.sample_count() == 0) throw InputError("region has no samples");
  points.reserve(region.sample_count());

  if (const auto* grid = std::get_if<GridPlan>(&region.plan)) {
    if (static_cast<int>(grid->counts.size()) != dim) {
      throw InputError("grid plan needs one count per axis");
    }
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    for (std::size_t k = 0; k < region.sample_count(); ++k) {
      Point p(dim);
      for (int i = 0; i < dim; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        p(i) = lo(i) + span(i) * (idx[ui] + 0.5) / grid->counts[ui];
      }
      points.push_back(std::move(p));
      for (int i = 0; i < dim; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (++idx[ui] < grid->counts[ui]) break;
        idx[ui] = 0;
      }
    }
    return points;
  }

  const auto& qr = std::get<QuasiRandomPlan>(region.plan);
  constexpr std::array<std::uint64_t, 3> bases{2, 3, 5};
  std::mt19937_64 rng(qr.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::array<double, 3> shift{};
  for (auto& s : shift) s = unit(rng);
  for (int k = 0; k < qr.count; ++k) {
    Point p(dim);
    for (int i = 0; i < dim; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      double u = radical_inverse(static_cast<std::uint64_t>(k) + 1, bases[ui]) + shift[ui];
      u -= std::floor(u);
      p(i) = lo(i) + span(i) * u;
    }
    points.push_back(std::move(p));
  }
  return points;
}

ScalarField::ScalarField(int dimension, BoundExpression expression, Box domain)
    : dimension_(dimension), expr_(std::move(expression)), domain_(std::move(domain)) {
  if (expr_.tree().dimension() != dimension_ || domain_.dimension() != dimension_) {
    throw InputError("scalar field: expression, domain and dimension disagree");
  }
}

ScalarField ScalarField::parse(std::string_view source, int dimension,
                               const ConstantTable& constants, Box domain) {
  std::set<std::string> names;
  for (const auto& [k, v] : constants) names.insert(k);
  return ScalarField(dimension,
                     BoundExpression(curlforce::parse(source, dimension, names), constants),
                     std::move(domain));
}

VectorField::VectorField(int dimension, std::vector<BoundExpression> components, Box domain)
    : dimension_(dimension), components_(std::move(components)), domain_(std::move(domain)) {
  if (static_cast<int>(components_.size()) != dimension_) {
    throw InputError("vector field needs " + std::to_string(dimension_) + " components, got " +
                     std::to_string(components_.size()));
  }
  for (const auto& c : components_) {
    if (c.tree().dimension() != dimension_) {
      throw InputError("vector field component dimension mismatch");
    }
  }
  if (domain_.dimension() != dimension_) throw InputError("vector field domain dimension mismatch");
}

VectorField VectorField::parse(const std::vector<std::string>& sources, int dimension,
                               const ConstantTable& constants, Box domain) {
  if (static_cast<int>(sources.size()) != dimension) {
    throw InputError("force needs " + std::to_string(dimension) + " components, got " +
                     std::to_string(sources.size()));
  }
  std::set<std::string> names;
  for (const auto& [k, v] : constants) names.insert(k);
  std::vector<BoundExpression> comps;
  for (const auto& s : sources) {
    comps.emplace_back(curlforce::parse(s, dimension, names), constants);
  }
  return VectorField(dimension, std::move(comps), std::move(domain));
}

Eigen::VectorXd VectorField::raw_value(const Eigen::Ref<const Eigen::VectorXd>& p) const {
  Eigen::VectorXd out(dimension_);
  for (int i = 0; i < dimension_; ++i) out(i) = components_[static_cast<std::size_t>(i)].value(p);
  return out;
}

Eigen::MatrixXd VectorField::raw_jacobian(const Eigen::Ref<const Eigen::VectorXd>& p) const {
  Eigen::MatrixXd jac(dimension_, dimension_);
  for (int i = 0; i < dimension_; ++i) {
    jac.row(i) = components_[static_cast<std::size_t>(i)].value_and_gradient(p).partials.transpose();
  }
  return jac;
}

void require_in_domain(const Box& domain, const Eigen::Ref<const Eigen::VectorXd>& p) {
  if (!domain.contains(p)) {
    throw DomainError("point " + format_point(p) + " is outside the field domain", p);
  }
}

double value(const ScalarField& f, const Eigen::Ref<const Eigen::VectorXd>& p) {
  require_in_domain(f.domain(), p);
  return f.raw_value(p);
}

Eigen::VectorXd value(const VectorField& f, const Eigen::Ref<const Eigen::VectorXd>& p) {
  require_in_domain(f.domain(), p);
  return f.raw_value(p);
}

Eigen::VectorXd gradient(const ScalarField& f, const Eigen::Ref<const Eigen::VectorXd>& p,
                         DiffMode mode) {
  require_in_domain(f.domain(), p);
  if (mode == DiffMode::analytic) return Eigen::VectorXd(f.raw_value_and_gradient(p).partials);
  Eigen::VectorXd g(p.size());
  auto fn = [&](const Eigen::VectorXd& q) { return f.raw_value(q); };
  for (int i = 0; i < p.size(); ++i) g(i) = difference(fn, p, i, stencil_for(f.domain(), p, i));
  return g;
}

Eigen::MatrixXd jacobian(const VectorField& f, const Eigen::Ref<const Eigen::VectorXd>& p,
                         DiffMode mode) {
  require_in_domain(f.domain(), p);
  if (mode == DiffMode::analytic) return f.raw_jacobian(p);
  Eigen::MatrixXd jac(p.size(), p.size());
  auto fn = [&](const Eigen::VectorXd& q) -> Eigen::VectorXd { return f.raw_value(q); };
  for (int j = 0; j < p.size(); ++j) {
    jac.col(j) = difference(fn, p, j, stencil_for(f.domain(), p, j));
  }
  return jac;
}

Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
                            const Eigen::Ref<const Eigen::VectorXd>& p) {
  Eigen::MatrixXd jac;
  for (int j = 0; j < p.size(); ++j) {
    Eigen::VectorXd col = difference(fn, p, j, Stencil::central);
    if (j == 0) jac.resize(col.size(), p.size());
    jac.col(j) = col;
  }
  return jac;
}

Eigen::VectorXd curl_from_jacobian(const Eigen::MatrixXd& jac) {
  if (jac.rows() == 2) {
    Eigen::VectorXd c(1);
    c(0) = jac(1, 0) - jac(0, 1);
    return c;
  }
  Eigen::VectorXd c(3);
  c << jac(2, 1) - jac(1, 2), jac(0, 2) - jac(2, 0), jac(1, 0) - jac(0, 1);
  return c;
}

Eigen::VectorXd curl(const VectorField& f, const Eigen::Ref<const Eigen::VectorXd>& p,
                     DiffMode mode) {
  return curl_from_jacobian(jacobian(f, p, mode));
}

double helicity(const VectorField& f, const Eigen::Ref<const Eigen::VectorXd>& p, DiffMode mode) {
  if (f.dimension() != 3) throw InputError("helicity is defined for 3D fields only");
  return value(f, p).dot(curl(f, p, mode));
}

Eigen::VectorXd cross(const Eigen::Ref<const Eigen::VectorXd>& a,
                      const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() == 2 && b.size() == 2) {
    Eigen::VectorXd c(1);
    c(0) = a(0) * b(1) - a(1) * b(0);
    return c;
  }
  if (a.size() == 3 && b.size() == 3) {
    return Eigen::Vector3d(a(0), a(1), a(2)).cross(Eigen::Vector3d(b(0), b(1), b(2)));
  }
  throw InputError("cross product needs two 2D or two 3D vectors");
}

}  // namespace curlforce
