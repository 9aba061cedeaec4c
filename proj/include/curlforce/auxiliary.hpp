#pragma once

#include <vector>

#include <Eigen/Core>

#include "curlforce/darboux.hpp"
#include "curlforce/dynamics.hpp"

namespace curlforce {

/// A force with its generalized potentials and the particle mass.
/// `v_floor` guards the 1/V rescaling; see default_v_floor.
struct AuxiliaryProblem {
  VectorField force;
  PotentialSet potentials;
  double mass = 1.0;
  double v_floor = 0.0;
};

/// 1e-9 * max |V| over the region samples.
double default_v_floor(const ScalarField& v, const Region& region);

/// x -> (F(x) + grad W(x)) / V(x). Throws NumericalError where |V| <= v_floor.
ForceSampler auxiliary_force(const AuxiliaryProblem& prob);

/// p.p / (2m) + U(x)
double auxiliary_hamiltonian(const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                             const ScalarField& u, double mass);

struct AuxiliaryRun {
  Trajectory trajectory;
  std::vector<double> hamiltonian;
  double drift = 0.0;  // max |H(t) - H(0)|
};

/// Motion under the auxiliary force from the same initial data, with the
/// auxiliary Hamiltonian recorded at every sample.
AuxiliaryRun auxiliary_trajectory(const AuxiliaryProblem& prob, const Eigen::VectorXd& x0,
                                  const Eigen::VectorXd& v0, const SimConfig& cfg);

struct AuxiliarySeries {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> pbar;
  std::vector<Eigen::VectorXd> xbar;
  std::vector<double> H;
  double drift = 0.0;
  bool truncated = false;  // xbar left the domain of U
};

struct SeriesOptions {
  /// Extra samples per trajectory step from cubic Hermite interpolation of
  /// (x, v); 1 keeps the trajectory's own grid.
  int refine = 1;
};

/// Along a trajectory computed under the original force:
///   pbar(t) = m v0 - int_0^t g,   xbar(t) = x0 + v0 t - (1/m) int_0^t int_0^tau g,
///   H(t) = |pbar|^2 / (2m) + U(xbar),  with g = grad U + grad W / V,
/// all by cumulative trapezoid sums on the sample grid.
AuxiliarySeries nonlocal_hamiltonian_series(const Trajectory& traj, const AuxiliaryProblem& prob,
                                            const SeriesOptions& options = {});

}  // namespace curlforce
