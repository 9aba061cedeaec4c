#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "curlforce/fieldkit.hpp"
#include "curlforce/ode.hpp"

namespace curlforce {

/// Position-dependent force x -> F(x). Evaluated without domain checks.
using ForceSampler = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct ParticleState {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd v;
};

struct SimConfig {
  double mass = 1.0;
  double t_end = 1.0;
  /// Defaults to dopri45 with atol = rtol = 1e-9; h_max falls back to t_end / 10.
  OdeSettings integrator{};
};

/// Samples at every accepted step, with K = m v.v / 2 and the cumulative work
/// W(t) = int F . v dt accumulated by Simpson's rule on the dense output.
struct Trajectory {
  int dimension = 0;
  double mass = 1.0;
  std::vector<ParticleState> states;
  std::vector<double> kinetic;
  std::vector<double> work;
  OdeStats stats;
  bool exited_domain = false;
  Eigen::VectorXd exit_point;
};

void validate(const SimConfig& cfg);

/// Solves m x'' = F(x) from (x0, v0). A step that leaves `domain` is cut back to
/// the boundary by bisection on the dense output (to 1e-10) and the partial
/// trajectory is returned with exited_domain set.
Trajectory integrate(const ForceSampler& force, const Box& domain, const Eigen::VectorXd& x0,
                     const Eigen::VectorXd& v0, const SimConfig& cfg);
Trajectory integrate(const VectorField& force, const Eigen::VectorXd& x0,
                     const Eigen::VectorXd& v0, const SimConfig& cfg);

/// max_t |K(t) - K(0) - W(t)|
double work_energy_residual(const Trajectory& traj);

std::vector<std::pair<double, double>> kinetic_series(const Trajectory& traj);

}  // namespace curlforce
