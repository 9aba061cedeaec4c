#include "curlforce/auxiliary.hpp"

#include <cmath>
#include <sstream>

#include "curlforce/errors.hpp"

namespace curlforce {

namespace {

std::string fmt(const Eigen::VectorXd& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p(i);
  os << ")";
  return os.str();
}

void check_shapes(const AuxiliaryProblem& prob) {
  const int n = prob.force.dimension();
  if (prob.potentials.U.dimension() != n || prob.potentials.V.dimension() != n ||
      (prob.potentials.W && prob.potentials.W->dimension() != n)) {
    throw InputError("potentials and force have different dimensions");
  }
  if (!(prob.mass > 0.0)) throw InputError("mass must be positive");
}

double guarded_v(const AuxiliaryProblem& prob, const Eigen::VectorXd& x) {
  const double v = prob.potentials.V.raw_value(x);
  if (!(std::abs(v) > prob.v_floor)) {
    std::ostringstream os;
    os << "|V| = " << std::abs(v) << " at " << fmt(x) << " is at or below the floor "
       << prob.v_floor << "; the 1/V rescaling of the momentum is undefined there";
    throw NumericalError(os.str());
  }
  return v;
}

// grad U + grad W / V: the rate at which the rescaled momentum decreases.
Eigen::VectorXd rescaled_rate(const AuxiliaryProblem& prob, const Eigen::VectorXd& x) {
  Eigen::VectorXd g = prob.potentials.U.raw_value_and_gradient(x).partials;
  if (prob.potentials.W) {
    g += prob.potentials.W->raw_value_and_gradient(x).partials / guarded_v(prob, x);
  }
  return g;
}

}  // namespace

double default_v_floor(const ScalarField& v, const Region& region) {
  double vmax = 0.0;
  for (const auto& p : sample_points(region)) vmax = std::max(vmax, std::abs(value(v, p)));
  return 1e-9 * vmax;
}

ForceSampler auxiliary_force(const AuxiliaryProblem& prob) {
  check_shapes(prob);
  return [prob](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd f = prob.force.raw_value(x);
    if (prob.potentials.W) f += prob.potentials.W->raw_value_and_gradient(x).partials;
    return f / guarded_v(prob, x);
  };
}

double auxiliary_hamiltonian(const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                             const ScalarField& u, double mass) {
  if (!(mass > 0.0)) throw InputError("mass must be positive");
  return p.squaredNorm() / (2.0 * mass) + value(u, x);
}

AuxiliaryRun auxiliary_trajectory(const AuxiliaryProblem& prob, const Eigen::VectorXd& x0,
                                  const Eigen::VectorXd& v0, const SimConfig& cfg) {
  check_shapes(prob);
  SimConfig run_cfg = cfg;
  run_cfg.mass = prob.mass;
  AuxiliaryRun run;
  run.trajectory = integrate(auxiliary_force(prob), prob.force.domain(), x0, v0, run_cfg);
  const double m = prob.mass;
  for (const auto& s : run.trajectory.states) {
    run.hamiltonian.push_back(auxiliary_hamiltonian(s.x, m * s.v, prob.potentials.U, m));
    run.drift = std::max(run.drift, std::abs(run.hamiltonian.back() - run.hamiltonian.front()));
  }
  return run;
}

AuxiliarySeries nonlocal_hamiltonian_series(const Trajectory& traj, const AuxiliaryProblem& prob,
                                            const SeriesOptions& options) {
  check_shapes(prob);
  if (traj.states.empty()) throw InputError("empty trajectory");
  if (traj.dimension != prob.force.dimension()) throw InputError("trajectory dimension mismatch");
  if (options.refine < 1) throw InputError("refinement factor must be at least 1");
  const double m = prob.mass;

  // Sample grid, optionally refined by Hermite interpolation of x (x' = v)
  // and v (v' = F / m) between consecutive states.
  std::vector<double> ts;
  std::vector<Eigen::VectorXd> xs;
  ts.push_back(traj.states.front().t);
  xs.push_back(traj.states.front().x);
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    const auto& a = traj.states[i - 1];
    const auto& b = traj.states[i];
    const double h = b.t - a.t;
    for (int k = 1; k < options.refine; ++k) {
      const double s = static_cast<double>(k) / options.refine;
      const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
      const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
      ts.push_back(a.t + s * h);
      xs.push_back(h00 * a.x + h10 * h * a.v + h01 * b.x + h11 * h * b.v);
    }
    ts.push_back(b.t);
    xs.push_back(b.x);
  }

  const auto& s0 = traj.states.front();
  const Eigen::VectorXd p0 = m * s0.v;
  AuxiliarySeries out;
  Eigen::VectorXd g_prev = rescaled_rate(prob, xs.front());
  Eigen::VectorXd g_int = Eigen::VectorXd::Zero(g_prev.size());   // int_0^t g
  Eigen::VectorXd gg_int = Eigen::VectorXd::Zero(g_prev.size());  // int_0^t int_0^tau g

  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i > 0) {
      const double h = ts[i] - ts[i - 1];
      const Eigen::VectorXd g = rescaled_rate(prob, xs[i]);
      const Eigen::VectorXd g_int_prev = g_int;
      g_int += 0.5 * h * (g_prev + g);
      gg_int += 0.5 * h * (g_int_prev + g_int);
      g_prev = g;
    }
    const double t = ts[i] - s0.t;
    const Eigen::VectorXd pbar = p0 - g_int;
    const Eigen::VectorXd xbar = s0.x + s0.v * t - gg_int / m;
    if (!prob.potentials.U.domain().contains(xbar)) {
      out.truncated = true;
      break;
    }
    out.t.push_back(ts[i]);
    out.pbar.push_back(pbar);
    out.xbar.push_back(xbar);
    out.H.push_back(pbar.squaredNorm() / (2.0 * m) + prob.potentials.U.raw_value(xbar));
    out.drift = std::max(out.drift, std::abs(out.H.back() - out.H.front()));
  }
  return out;
}

}  // namespace curlforce
