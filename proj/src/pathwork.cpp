#include "curlforce/pathwork.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Geometry>

#include "curlforce/errors.hpp"

namespace curlforce {

namespace {

constexpr double kClosureTol = 1e-12;

// Gauss-Legendre 5-point rule on [-1, 1], listed symmetrically.
constexpr std::array<double, 5> kGlNodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                         0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGlWeights{0.2369268850561891, 0.4786286704993665,
                                           128.0 / 225.0, 0.4786286704993665,
                                           0.2369268850561891};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string fmt(const Eigen::VectorXd& p) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) out += (i ? ", " : "") + fmt(p(i));
  return out + ")";
}

}  // namespace

Eigen::VectorXd ParamPath::Piece::point(double tau) const {
  switch (kind) {
    case Kind::segment:
      return a + tau * (b - a);
    case Kind::hermite: {
      const double t2 = tau * tau, t3 = t2 * tau;
      return (2 * t3 - 3 * t2 + 1) * a + (t3 - 2 * t2 + tau) * ma + (-2 * t3 + 3 * t2) * b +
             (t3 - t2) * mb;
    }
    case Kind::expression: {
      Eigen::VectorXd out(static_cast<Eigen::Index>(components.size()));
      const Eigen::VectorXd s = Eigen::VectorXd::Constant(1, tau);
      for (std::size_t i = 0; i < components.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = components[i].value(s);
      }
      return out;
    }
  }
  return {};
}

Eigen::VectorXd ParamPath::Piece::derivative(double tau) const {
  switch (kind) {
    case Kind::segment:
      return b - a;
    case Kind::hermite: {
      const double t2 = tau * tau;
      return (6 * t2 - 6 * tau) * a + (3 * t2 - 4 * tau + 1) * ma + (-6 * t2 + 6 * tau) * b +
             (3 * t2 - 2 * tau) * mb;
    }
    case Kind::expression: {
      Eigen::VectorXd out(static_cast<Eigen::Index>(components.size()));
      const Eigen::VectorXd s = Eigen::VectorXd::Constant(1, tau);
      for (std::size_t i = 0; i < components.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = components[i].value_and_gradient(s).partials(0);
      }
      return out;
    }
  }
  return {};
}

ParamPath ParamPath::polyline(std::vector<Eigen::VectorXd> vertices, bool closed) {
  if (vertices.size() < 2) throw InputError("a polyline needs at least two vertices");
  const auto dim = vertices.front().size();
  for (const auto& v : vertices) {
    if (v.size() != dim) throw InputError("polyline vertices have mixed dimensions");
  }
  if (dim != 2 && dim != 3) throw InputError("paths live in 2 or 3 dimensions");
  if (closed && (vertices.back() - vertices.front()).norm() > kClosureTol) {
    vertices.push_back(vertices.front());
  }
  ParamPath path;
  path.dimension_ = static_cast<int>(dim);
  path.closed_ = closed;
  const double n = static_cast<double>(vertices.size() - 1);
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    Piece piece;
    piece.kind = Piece::Kind::segment;
    piece.a = vertices[i];
    piece.b = vertices[i + 1];
    piece.s0 = static_cast<double>(i) / n;
    piece.s1 = i + 2 == vertices.size() ? 1.0 : static_cast<double>(i + 1) / n;
    path.pieces_.push_back(std::move(piece));
  }
  return path;
}

ParamPath ParamPath::parametric(const std::vector<std::string>& components,
                                const ConstantTable& constants, bool closed) {
  if (components.size() != 2 && components.size() != 3) {
    throw InputError("a parametric path needs 2 or 3 components, got " +
                     std::to_string(components.size()));
  }
  std::set<std::string> names;
  for (const auto& [name, value] : constants) names.insert(name);
  Piece piece;
  piece.kind = Piece::Kind::expression;
  for (const auto& src : components) {
    piece.components.emplace_back(parse(src, std::vector<std::string>{"s"}, names), constants);
  }
  ParamPath path;
  path.dimension_ = static_cast<int>(components.size());
  path.closed_ = closed;
  path.pieces_.push_back(std::move(piece));
  path.check_closure();
  return path;
}

ParamPath ParamPath::hermite(std::vector<Eigen::VectorXd> nodes,
                             std::vector<Eigen::VectorXd> derivatives, std::vector<double> params,
                             bool closed) {
  if (nodes.size() < 2 || nodes.size() != derivatives.size() || nodes.size() != params.size()) {
    throw InputError("hermite path needs matching nodes, derivatives and parameters");
  }
  if (params.front() != 0.0 || params.back() != 1.0) {
    throw InputError("hermite parameters must run from 0 to 1");
  }
  ParamPath path;
  path.dimension_ = static_cast<int>(nodes.front().size());
  path.closed_ = closed;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double span = params[i + 1] - params[i];
    if (!(span > 0.0)) throw InputError("hermite parameters must increase strictly");
    Piece piece;
    piece.kind = Piece::Kind::hermite;
    piece.a = nodes[i];
    piece.b = nodes[i + 1];
    piece.ma = derivatives[i] * span;
    piece.mb = derivatives[i + 1] * span;
    piece.s0 = params[i];
    piece.s1 = params[i + 1];
    path.pieces_.push_back(std::move(piece));
  }
  path.check_closure();
  return path;
}

void ParamPath::check_closure() const {
  if (closed_ && (point(0.0) - point(1.0)).norm() > kClosureTol) {
    throw InputError("path is flagged closed but c(0) = " + fmt(point(0.0)) + " and c(1) = " +
                     fmt(point(1.0)));
  }
}

const ParamPath::Piece& ParamPath::locate(double base_s) const {
  auto it = std::lower_bound(pieces_.begin(), pieces_.end(), base_s,
                             [](const Piece& p, double s) { return p.s1 < s; });
  if (it == pieces_.end()) --it;
  return *it;
}

Eigen::VectorXd ParamPath::point(double s) const {
  const double base = reversed_ ? 1.0 - s : s;
  const Piece& piece = locate(base);
  double tau = (base - piece.s0) / (piece.s1 - piece.s0);
  if (piece.flipped) tau = 1.0 - tau;
  return piece.point(tau);
}

Eigen::VectorXd ParamPath::tangent(double s) const {
  const double base = reversed_ ? 1.0 - s : s;
  const Piece& piece = locate(base);
  double tau = (base - piece.s0) / (piece.s1 - piece.s0);
  if (piece.flipped) tau = 1.0 - tau;
  const double sign = (piece.flipped != reversed_) ? -1.0 : 1.0;
  return sign / (piece.s1 - piece.s0) * piece.derivative(tau);
}

std::vector<double> ParamPath::breakpoints() const {
  std::vector<double> out;
  for (const auto& piece : pieces_) out.push_back(piece.s0);
  out.push_back(1.0);
  if (reversed_) {
    std::reverse(out.begin(), out.end());
    for (double& b : out) b = 1.0 - b;
  }
  out.front() = 0.0;
  out.back() = 1.0;
  return out;
}

bool ParamPath::is_polygon() const {
  return std::all_of(pieces_.begin(), pieces_.end(),
                     [](const Piece& p) { return p.kind == Piece::Kind::segment; });
}

std::vector<ParamPath::Piece> ParamPath::materialized() const {
  std::vector<Piece> out = pieces_;
  if (reversed_) {
    std::reverse(out.begin(), out.end());
    for (auto& piece : out) {
      const double s0 = piece.s0;
      piece.s0 = 1.0 - piece.s1;
      piece.s1 = 1.0 - s0;
      piece.flipped = !piece.flipped;
    }
    out.front().s0 = 0.0;
    out.back().s1 = 1.0;
  }
  return out;
}

std::vector<Eigen::VectorXd> ParamPath::vertices() const {
  const auto pieces = materialized();
  std::vector<Eigen::VectorXd> out;
  for (const auto& piece : pieces) out.push_back(piece.flipped ? piece.b : piece.a);
  if (!closed_) {
    const auto& last = pieces.back();
    out.push_back(last.flipped ? last.a : last.b);
  }
  return out;
}

ParamPath ParamPath::reversed() const {
  ParamPath out = *this;
  out.reversed_ = !reversed_;
  return out;
}

ParamPath concatenate(const std::vector<ParamPath>& paths) {
  if (paths.empty()) throw InputError("nothing to concatenate");
  ParamPath out;
  out.dimension_ = paths.front().dimension();
  const double share = 1.0 / static_cast<double>(paths.size());
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const auto& path = paths[k];
    if (path.dimension() != out.dimension_) throw InputError("cannot join paths of different dimension");
    if (k > 0 && (paths[k - 1].point(1.0) - path.point(0.0)).norm() > 1e-9) {
      throw InputError("paths to concatenate are not contiguous");
    }
    const double base = static_cast<double>(k) * share;
    for (auto piece : path.materialized()) {
      piece.s0 = base + piece.s0 * share;
      piece.s1 = k + 1 == paths.size() && piece.s1 == 1.0 ? 1.0 : base + piece.s1 * share;
      out.pieces_.push_back(std::move(piece));
    }
  }
  out.closed_ = (out.point(0.0) - out.point(1.0)).norm() <= kClosureTol;
  return out;
}

ParamPath reverse_path(const ParamPath& path) { return path.reversed(); }

WorkResult line_work(const VectorField& f, const ParamPath& path, const QuadratureConfig& q) {
  if (path.dimension() != f.dimension()) throw InputError("path and field dimensions differ");
  if (q.initial_segments < 1 || q.max_refinements < 1) throw InputError("bad quadrature settings");

  const auto bps = path.breakpoints();
  std::vector<long> base_counts;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    base_counts.push_back(std::max(
        1L, static_cast<long>(std::ceil(q.initial_segments * (bps[i + 1] - bps[i]) - 1e-9))));
  }

  auto integrand = [&](double s) {
    const Eigen::VectorXd p = path.point(s);
    if (!f.domain().contains(p)) {
      throw DomainError("path leaves the field domain at s = " + fmt(s) + ", point " + fmt(p), p);
    }
    try {
      return f.raw_value(p).dot(path.tangent(s));
    } catch (const EvalError& e) {
      throw NumericalError(std::string(e.what()) + " (path parameter s = " + fmt(s) + ")");
    }
  };

  auto composite = [&](int level, long& segments) {
    double total = 0.0;
    segments = 0;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
      const long n = base_counts[i] << level;
      const double h = (bps[i + 1] - bps[i]) / static_cast<double>(n);
      for (long k = 0; k < n; ++k) {
        const double a = bps[i] + static_cast<double>(k) * h;
        double seg = 0.0;
        for (std::size_t j = 0; j < kGlNodes.size(); ++j) {
          seg += kGlWeights[j] * integrand(a + 0.5 * h * (1.0 + kGlNodes[j]));
        }
        total += 0.5 * h * seg;
      }
      segments += n;
    }
    return total;
  };

  long segments = 0;
  double prev = composite(0, segments);
  for (int level = 1; level <= q.max_refinements; ++level) {
    const double cur = composite(level, segments);
    const double delta = std::abs(cur - prev);
    if (delta <= std::max(q.atol, q.rtol * std::abs(cur))) return {cur, delta, segments};
    prev = cur;
  }
  throw NumericalError("line work did not converge after " + std::to_string(q.max_refinements) +
                       " refinements (" + std::to_string(segments) + " segments)");
}

namespace {

double orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool on_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_meet(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, const Eigen::Vector2d& q1,
                   const Eigen::Vector2d& q2) {
  const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return (d1 == 0 && on_segment(q1, q2, p1)) || (d2 == 0 && on_segment(q1, q2, p2)) ||
         (d3 == 0 && on_segment(p1, p2, q1)) || (d4 == 0 && on_segment(p1, p2, q2));
}

void require_simple(const std::vector<Eigen::Vector2d>& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_meet(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) {
        throw InputError("loop polygon intersects itself (edges " + std::to_string(i) + " and " +
                         std::to_string(j) + ")");
      }
    }
  }
}

// Degree-5 seven-point rule in barycentric coordinates; weights sum to one.
struct TriangleRule {
  std::array<std::array<double, 3>, 7> bary;
  std::array<double, 7> weights;
};

const TriangleRule& triangle_rule() {
  static const TriangleRule rule = [] {
    const double r = std::sqrt(15.0);
    const double a1 = (6 - r) / 21, b1 = (9 + 2 * r) / 21, w1 = (155 - r) / 1200;
    const double a2 = (6 + r) / 21, b2 = (9 - 2 * r) / 21, w2 = (155 + r) / 1200;
    TriangleRule t;
    t.bary = {{{1.0 / 3, 1.0 / 3, 1.0 / 3},
               {a1, a1, b1},
               {a1, b1, a1},
               {b1, a1, a1},
               {a2, a2, b2},
               {a2, b2, a2},
               {b2, a2, a2}}};
    t.weights = {9.0 / 40, w1, w1, w1, w2, w2, w2};
    return t;
  }();
  return rule;
}

}  // namespace

WorkResult stokes_work(const VectorField& f, const ParamPath& loop, const QuadratureConfig& q) {
  if (!loop.closed()) throw InputError("stokes_work needs a closed loop");
  if (!loop.is_polygon()) throw InputError("stokes_work needs a polygonal loop");
  if (loop.dimension() != f.dimension()) throw InputError("loop and field dimensions differ");
  const auto verts = loop.vertices();
  const std::size_t n = verts.size();
  if (n < 3) throw InputError("loop polygon needs at least three distinct vertices");
  const int dim = f.dimension();

  Eigen::VectorXd centre = Eigen::VectorXd::Zero(dim);
  for (const auto& v : verts) centre += v;
  centre /= static_cast<double>(n);

  std::vector<Eigen::Vector2d> flat;
  if (dim == 2) {
    for (const auto& v : verts) flat.emplace_back(v(0), v(1));
  } else {
    Eigen::Vector3d normal = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      normal += Eigen::Vector3d(verts[i]).cross(Eigen::Vector3d(verts[(i + 1) % n]));
    }
    if (normal.norm() == 0.0) throw InputError("loop polygon encloses no area");
    const Eigen::Vector3d nhat = normal.normalized();
    double extent = 1.0;
    for (const auto& v : verts) extent = std::max(extent, (v - centre).norm());
    for (const auto& v : verts) {
      const double off = std::abs((v - centre).dot(Eigen::VectorXd(nhat)));
      if (off > 1e-9 * extent) {
        throw InputError("loop is not planar: vertex " + fmt(v) + " is " + fmt(off) +
                         " off the loop plane");
      }
    }
    Eigen::Index k = 0;
    nhat.cwiseAbs().minCoeff(&k);
    const Eigen::Vector3d e = Eigen::Vector3d::Unit(k);
    const Eigen::Vector3d u = e.cross(nhat).normalized();
    const Eigen::Vector3d w = nhat.cross(u);
    for (const auto& v : verts) {
      const Eigen::Vector3d d = Eigen::Vector3d(v - centre);
      flat.emplace_back(d.dot(u), d.dot(w));
    }
  }
  require_simple(flat);

  const auto& rule = triangle_rule();
  // Integral of the normal curl over a triangle, with orientation from vertex order.
  auto triangle = [&](const Eigen::VectorXd& p0, const Eigen::VectorXd& p1,
                      const Eigen::VectorXd& p2) {
    double sum = 0.0;
    const Eigen::VectorXd e1 = p1 - p0, e2 = p2 - p0;
    const Eigen::VectorXd area = 0.5 * cross(e1, e2);
    for (std::size_t j = 0; j < rule.weights.size(); ++j) {
      const Eigen::VectorXd x = rule.bary[j][0] * p0 + rule.bary[j][1] * p1 + rule.bary[j][2] * p2;
      if (!f.domain().contains(x)) {
        throw DomainError("loop interior leaves the field domain at " + fmt(x), x);
      }
      try {
        sum += rule.weights[j] * curl_from_jacobian(f.raw_jacobian(x)).dot(area);
      } catch (const EvalError& e) {
        throw NumericalError(std::string(e.what()) + " (inside loop at " + fmt(x) + ")");
      }
    }
    return sum;
  };

  auto refine = [&](auto&& self, const Eigen::VectorXd& p0, const Eigen::VectorXd& p1,
                    const Eigen::VectorXd& p2, int level) -> double {
    if (level == 0) return triangle(p0, p1, p2);
    const Eigen::VectorXd m01 = 0.5 * (p0 + p1), m12 = 0.5 * (p1 + p2), m20 = 0.5 * (p2 + p0);
    return self(self, p0, m01, m20, level - 1) + self(self, m01, p1, m12, level - 1) +
           self(self, m20, m12, p2, level - 1) + self(self, m01, m12, m20, level - 1);
  };

  auto total = [&](int level) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += refine(refine, centre, verts[i], verts[(i + 1) % n], level);
    return sum;
  };

  const int max_level = std::min(q.max_refinements, 8);
  double prev = total(0);
  for (int level = 1; level <= max_level; ++level) {
    const double cur = total(level);
    const double delta = std::abs(cur - prev);
    if (delta <= std::max(q.atol, q.rtol * std::abs(cur))) {
      return {cur, delta, static_cast<long>(n) << (2 * level)};
    }
    prev = cur;
  }
  throw NumericalError("surface quadrature did not converge after " + std::to_string(max_level) +
                       " subdivisions");
}

}  // namespace curlforce
