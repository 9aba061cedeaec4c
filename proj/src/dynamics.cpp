#include "curlforce/dynamics.hpp"

#include <cmath>

#include "curlforce/errors.hpp"

namespace curlforce {

namespace {
constexpr int kPanels = 4;
}  // namespace

void validate(const SimConfig& cfg) {
  if (!(cfg.mass > 0.0)) throw InputError("mass must be positive");
  if (!(cfg.t_end > 0.0)) throw InputError("t_end must be positive");
  if (!(cfg.integrator.atol > 0.0) || !(cfg.integrator.rtol > 0.0)) {
    throw InputError("integrator tolerances must be positive");
  }
  if (cfg.integrator.method == OdeMethod::rk4 && !(cfg.integrator.step > 0.0)) {
    throw InputError("rk4 step must be positive");
  }
}

Trajectory integrate(const ForceSampler& force, const Box& domain, const Eigen::VectorXd& x0,
                     const Eigen::VectorXd& v0, const SimConfig& cfg) {
  validate(cfg);
  const int n = static_cast<int>(x0.size());
  if (v0.size() != n || domain.dimension() != n) {
    throw InputError("initial position, velocity and domain dimensions disagree");
  }
  require_in_domain(domain, x0);

  const double m = cfg.mass;
  OdeSettings settings = cfg.integrator;
  if (!std::isfinite(settings.h_max)) settings.h_max = cfg.t_end / 10.0;

  auto rhs = [&](double, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    Eigen::VectorXd dy(2 * n);
    dy.head(n) = y.tail(n);
    dy.tail(n) = force(y.head(n)) / m;
    return dy;
  };
  auto power = [&](const Eigen::VectorXd& y) { return force(y.head(n)).dot(y.tail(n)); };
  auto kinetic = [m, n](const Eigen::VectorXd& y) { return 0.5 * m * y.tail(n).squaredNorm(); };

  Trajectory traj;
  traj.dimension = n;
  traj.mass = m;
  Eigen::VectorXd y0(2 * n);
  y0 << x0, v0;
  traj.states.push_back({0.0, x0, v0});
  traj.kinetic.push_back(kinetic(y0));
  traj.work.push_back(0.0);
  double p_prev = power(y0);

  // Composite Simpson over kPanels sub-intervals of the step's dense output.
  auto record = [&](const StepView& step, double t, const Eigen::VectorXd& y) {
    const double t0 = step.t0();
    const double dt = (t - t0) / kPanels;
    const double p_end = power(y);
    double sum = p_prev + p_end;
    for (int k = 1; k < 2 * kPanels; ++k) {
      sum += (k % 2 ? 4.0 : 2.0) * power(step.at(t0 + 0.5 * k * dt));
    }
    traj.states.push_back({t, y.head(n), y.tail(n)});
    traj.kinetic.push_back(kinetic(y));
    traj.work.push_back(traj.work.back() + dt / 6.0 * sum);
    p_prev = p_end;
  };

  auto observer = [&](const StepView& step) {
    if (domain.contains(step.y1().head(n))) {
      record(step, step.t1(), step.y1());
      return StepAction::proceed;
    }
    double lo = step.t0();
    double hi = step.t1();
    Eigen::VectorXd y_lo = step.y0();
    Eigen::VectorXd y_hi = step.y1();
    while ((y_hi.head(n) - y_lo.head(n)).norm() > 1e-10 && hi - lo > 1e-15 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      Eigen::VectorXd y_mid = step.at(mid);
      if (domain.contains(y_mid.head(n))) {
        lo = mid;
        y_lo = std::move(y_mid);
      } else {
        hi = mid;
        y_hi = std::move(y_mid);
      }
    }
    if (lo > step.t0()) {
      record(step, lo, y_lo);
    }
    traj.exited_domain = true;
    traj.exit_point = y_hi.head(n);
    return StepAction::stop;
  };

  traj.stats = solve_ode(rhs, 0.0, y0, cfg.t_end, settings, observer);
  return traj;
}

Trajectory integrate(const VectorField& force, const Eigen::VectorXd& x0,
                     const Eigen::VectorXd& v0, const SimConfig& cfg) {
  ForceSampler sampler = [&force](const Eigen::VectorXd& x) { return force.raw_value(x); };
  return integrate(sampler, force.domain(), x0, v0, cfg);
}

double work_energy_residual(const Trajectory& traj) {
  double worst = 0.0;
  if (traj.kinetic.empty()) return worst;
  for (std::size_t i = 0; i < traj.kinetic.size(); ++i) {
    worst = std::max(worst, std::abs(traj.kinetic[i] - traj.kinetic.front() - traj.work[i]));
  }
  return worst;
}

std::vector<std::pair<double, double>> kinetic_series(const Trajectory& traj) {
  std::vector<std::pair<double, double>> out;
  out.reserve(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    out.emplace_back(traj.states[i].t, traj.kinetic[i]);
  }
  return out;
}

}  // namespace curlforce
