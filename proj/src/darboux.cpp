#include "curlforce/darboux.hpp"

#include <cmath>
#include <sstream>

#include "curlforce/errors.hpp"

namespace curlforce {

namespace {

std::string describe(const Eigen::VectorXd& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p(i);
  os << ")";
  return os.str();
}

// Runs fn at every sample of the region; evaluation failures are re-raised
// with the failing point attached.
template <typename Fn>
void for_each_sample(const Region& region, const Box& domain, Fn&& fn) {
  if (!domain.contains(region.box)) throw InputError("sample region is not inside the field domain");
  const auto points = sample_points(region);
  for (const auto& p : points) {
    try {
      fn(p);
    } catch (const EvalError& e) {
      throw NumericalError(std::string(e.what()) + " (sample point " + describe(p) + ")");
    }
  }
}

void require_same_space(const Box& a, const Box& b) {
  if (a.dimension() != b.dimension()) throw InputError("dimension mismatch between fields");
}

}  // namespace

std::string_view to_string(CanonicalClass c) {
  switch (c) {
    case CanonicalClass::conservative:
      return "conservative";
    case CanonicalClass::two_potential:
      return "two-potential";
    case CanonicalClass::chiral_three_potential:
      return "chiral-three-potential";
  }
  return "?";
}

void ResidualAccumulator::add(const Eigen::VectorXd& p, double magnitude) {
  if (report_.samples == 0 || magnitude > report_.max) {
    report_.max = magnitude;
    report_.worst_point = p;
  }
  report_.min = report_.samples == 0 ? magnitude : std::min(report_.min, magnitude);
  sum_sq_ += magnitude * magnitude;
  ++report_.samples;
}

ResidualReport ResidualAccumulator::finish() const {
  if (report_.samples == 0) throw InputError("no samples for residual report " + report_.tag);
  ResidualReport out = report_;
  out.rms = std::sqrt(sum_sq_ / static_cast<double>(report_.samples));
  return out;
}

double field_scale(const VectorField& f, const Region& region, double floor, DiffMode mode) {
  double jmax = 0.0;
  for_each_sample(region, f.domain(), [&](const Eigen::VectorXd& p) {
    jmax = std::max(jmax, jacobian(f, p, mode).lpNorm<Eigen::Infinity>());
  });
  return std::max(jmax * region.box.diameter(), floor);
}

ClassificationReport classify(const VectorField& f, const Region& region,
                              const ClassifyThresholds& thresholds) {
  ClassificationReport report;
  report.region = region;
  report.thresholds = thresholds;

  double jmax = 0.0, curl_max = 0.0, hel_max = 0.0, f_max = 0.0;
  for_each_sample(region, f.domain(), [&](const Eigen::VectorXd& p) {
    const Eigen::MatrixXd jac = jacobian(f, p, thresholds.mode);
    const Eigen::VectorXd c = curl_from_jacobian(jac);
    const Eigen::VectorXd fv = value(f, p);
    jmax = std::max(jmax, jac.lpNorm<Eigen::Infinity>());
    curl_max = std::max(curl_max, c.norm());
    f_max = std::max(f_max, fv.norm());
    if (f.dimension() == 3) hel_max = std::max(hel_max, std::abs(fv.dot(c)));
    ++report.samples;
  });

  report.scale = std::max(jmax * region.box.diameter(), thresholds.scale_floor);
  report.curl_statistic = curl_max / report.scale;
  if (f.dimension() == 3) {
    report.helicity_statistic = f_max > 0.0 ? hel_max / (report.scale * f_max) : 0.0;
  }

  if (report.helicity_statistic && *report.helicity_statistic > thresholds.chiral) {
    report.canonical_class = CanonicalClass::chiral_three_potential;
  } else if (report.curl_statistic <= thresholds.conservative) {
    report.canonical_class = CanonicalClass::conservative;
  } else {
    report.canonical_class = CanonicalClass::two_potential;
  }
  return report;
}

ResidualReport verify_representation(const VectorField& f, const PotentialSet& potentials,
                                     const Region& region) {
  require_same_space(f.domain(), potentials.U.domain());
  require_same_space(f.domain(), potentials.V.domain());
  if (potentials.W) require_same_space(f.domain(), potentials.W->domain());

  ResidualAccumulator acc(potentials.W ? "F + V*grad(U) + grad(W)" : "F + V*grad(U)");
  for_each_sample(region, f.domain(), [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r = value(f, p) + value(potentials.V, p) * gradient(potentials.U, p);
    if (potentials.W) r += gradient(*potentials.W, p);
    acc.add(p, r.norm());
  });
  return acc.finish();
}

ResidualReport vpde_residual(const VectorField& f, const ScalarField& v, const Region& region) {
  require_same_space(f.domain(), v.domain());
  ResidualAccumulator acc("grad(V) x F - V*curl(F)");
  for_each_sample(region, f.domain(), [&](const Eigen::VectorXd& p) {
    const Eigen::VectorXd r = cross(gradient(v, p), value(f, p)) - value(v, p) * curl(f, p);
    acc.add(p, r.norm());
  });
  return acc.finish();
}

PotentialSet gauge_transform(const PotentialSet& potentials, const SyntaxTree& f,
                             const ConstantTable& constants, const Region& region) {
  if (f.dimension() != 1) throw InputError("gauge function must have exactly one variable");
  const SyntaxTree& u_tree = potentials.U.expression().tree();
  const SyntaxTree& v_tree = potentials.V.expression().tree();
  const SyntaxTree slope = compose(differentiate(f, 0), u_tree);

  const int dim = potentials.U.dimension();
  const BoundExpression slope_bound(slope, constants);
  for_each_sample(region, potentials.U.domain(), [&](const Eigen::VectorXd& p) {
    if (slope_bound.value(p) == 0.0) {
      throw NumericalError("gauge derivative f'(U) vanishes at " + describe(p));
    }
  });

  PotentialSet out{
      ScalarField(dim, BoundExpression(compose(f, u_tree), constants), potentials.U.domain()),
      ScalarField(dim, BoundExpression(combine(BinaryOp::div, v_tree, slope), constants),
                  potentials.V.domain()),
      potentials.W};
  return out;
}

ResidualReport independence_metric(const ScalarField& u, const ScalarField& v,
                                   const Region& region) {
  require_same_space(u.domain(), v.domain());
  ResidualAccumulator acc("|grad(V) x grad(U)|");
  for_each_sample(region, u.domain(), [&](const Eigen::VectorXd& p) {
    acc.add(p, cross(gradient(v, p), gradient(u, p)).norm());
  });
  return acc.finish();
}

Decomposition3d::Decomposition3d(VectorField f, ScalarField v, DecomposeOptions options)
    : f_(std::move(f)), v_(std::move(v)), options_(options) {
  if (f_.dimension() != 3 || v_.dimension() != 3) {
    throw InputError("decompose3d requires a 3D force field and invariant");
  }
}

Eigen::VectorXd Decomposition3d::grad_u(const Eigen::VectorXd& p) const {
  const Eigen::VectorXd gv = v_.raw_value_and_gradient(p).partials;
  const double g2 = gv.squaredNorm();
  if (std::sqrt(g2) < options_.grad_floor) {
    throw NumericalError("|grad V| below floor at " + describe(p));
  }
  return cross(gv, curl_from_jacobian(f_.raw_jacobian(p))) / g2;
}

Eigen::VectorXd Decomposition3d::nonconservative(const Eigen::VectorXd& p) const {
  return -v_.raw_value(p) * grad_u(p);
}

Eigen::VectorXd Decomposition3d::conservative(const Eigen::VectorXd& p) const {
  return f_.raw_value(p) - nonconservative(p);
}

DecompositionResult decompose3d(const VectorField& f, const ScalarField& v, const Region& region,
                                const DecomposeOptions& options) {
  DecompositionResult result{Decomposition3d(f, v, options), {}, {}, {}, {}, 0.0};
  const Decomposition3d& d = result.decomposition;
  result.scale = field_scale(f, region, 1e-30, options.mode);

  ResidualAccumulator sum("|F - F_c - F_nc|");
  ResidualAccumulator curl_c("|curl F_c|");
  ResidualAccumulator gauge("|grad V . grad U|");
  ResidualAccumulator agree("|curl F_nc - curl F|");
  auto f_c = [&](const Eigen::VectorXd& q) { return d.conservative(q); };
  auto f_nc = [&](const Eigen::VectorXd& q) { return d.nonconservative(q); };

  for_each_sample(region, f.domain(), [&](const Eigen::VectorXd& p) {
    const Eigen::VectorXd gv = gradient(v, p, options.mode);
    if (gv.norm() < options.grad_floor) {
      throw NumericalError("|grad V| below floor " + std::to_string(options.grad_floor) + " at " +
                           describe(p));
    }
    const Eigen::VectorXd c = curl(f, p, options.mode);
    const double transport = std::abs(gv.dot(c));
    if (transport > options.admissibility * result.scale) {
      throw NumericalError("V is not constant along characteristics of curl F: |grad V . curl F| = " +
                           std::to_string(transport) + " at " + describe(p));
    }
    const Eigen::VectorXd fnc = d.nonconservative(p);
    sum.add(p, (value(f, p) - d.conservative(p) - fnc).norm());
    curl_c.add(p, curl_from_jacobian(fd_jacobian(f_c, p)).norm());
    gauge.add(p, std::abs(gv.dot(d.grad_u(p))));
    agree.add(p, (curl_from_jacobian(fd_jacobian(f_nc, p)) - c).norm());
  });

  result.sum_residual = sum.finish();
  result.curl_conservative = curl_c.finish();
  result.gauge = gauge.finish();
  result.curl_agreement = agree.finish();
  return result;
}

ResidualReport equivalence_residual(const Decomposition3d& a, const Decomposition3d& b,
                                    const Region& region) {
  ResidualAccumulator acc("|curl(F_nc_a - F_nc_b)|");
  auto diff = [&](const Eigen::VectorXd& q) -> Eigen::VectorXd {
    return a.nonconservative(q) - b.nonconservative(q);
  };
  for_each_sample(region, a.force().domain(), [&](const Eigen::VectorXd& p) {
    acc.add(p, curl_from_jacobian(fd_jacobian(diff, p)).norm());
  });
  return acc.finish();
}

double characteristic_deviation(const VectorField& f, const ScalarField& v,
                                const Eigen::VectorXd& x0, double s_max,
                                const OdeSettings& settings) {
  if (f.dimension() != 3) throw InputError("characteristics are traced for 3D fields");
  if (!(s_max > 0.0)) throw InputError("s_max must be positive");
  require_in_domain(f.domain(), x0);
  const double v0 = value(v, x0);
  double worst = 0.0;

  auto rhs = [&](double, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return curl_from_jacobian(f.raw_jacobian(x));
  };
  auto observer = [&](const StepView& step) {
    if (!f.domain().contains(step.y1())) {
      throw DomainError("characteristic curve left the domain at " + describe(step.y1()),
                        step.y1());
    }
    const Eigen::VectorXd mid = step.at(0.5 * (step.t0() + step.t1()));
    worst = std::max({worst, std::abs(v.raw_value(mid) - v0), std::abs(v.raw_value(step.y1()) - v0)});
    return StepAction::proceed;
  };
  solve_ode(rhs, 0.0, x0, s_max, settings, observer);
  return worst;
}

}  // namespace curlforce
