#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "curlforce/fieldkit.hpp"
#include "curlforce/ode.hpp"

namespace curlforce {

/// Generalized potentials of a force field: F = -V grad U - grad W.
struct PotentialSet {
  ScalarField U;
  ScalarField V;
  std::optional<ScalarField> W;
};

/// Canonical class of the work 1-form F.dx: exact, one product term, or a
/// product term plus an exact part (nonzero helicity, 3D only).
enum class CanonicalClass { conservative, two_potential, chiral_three_potential };

std::string_view to_string(CanonicalClass c);

struct ClassifyThresholds {
  double conservative = 1e-8;
  double chiral = 1e-8;
  double scale_floor = 1e-30;
  DiffMode mode = DiffMode::analytic;
};

struct ClassificationReport {
  CanonicalClass canonical_class = CanonicalClass::conservative;
  double curl_statistic = 0.0;                // max |curl F| / scale
  std::optional<double> helicity_statistic;   // max |F.curl F| / (scale max |F|), 3D only
  double scale = 0.0;                         // max ||J||_inf * diam(region), floored
  std::size_t samples = 0;
  Region region;
  ClassifyThresholds thresholds;
};

struct ResidualReport {
  std::string tag;
  double max = 0.0;
  double rms = 0.0;
  double min = 0.0;
  Eigen::VectorXd worst_point;
  std::size_t samples = 0;
};

/// Accumulates per-sample magnitudes into a ResidualReport.
class ResidualAccumulator {
 public:
  explicit ResidualAccumulator(std::string tag) { report_.tag = std::move(tag); }
  void add(const Eigen::VectorXd& p, double magnitude);
  ResidualReport finish() const;

 private:
  ResidualReport report_;
  double sum_sq_ = 0.0;
};

/// max over samples of ||J(p)||_inf * diam(region), floored.
double field_scale(const VectorField& f, const Region& region, double floor = 1e-30,
                   DiffMode mode = DiffMode::analytic);

ClassificationReport classify(const VectorField& f, const Region& region,
                              const ClassifyThresholds& thresholds = {});

/// Residual F + V grad U (+ grad W) over the region samples.
ResidualReport verify_representation(const VectorField& f, const PotentialSet& potentials,
                                     const Region& region);

/// Residual of the first-order PDE grad V x F - V curl F = 0.
ResidualReport vpde_residual(const VectorField& f, const ScalarField& v, const Region& region);

/// (U, V) -> (f(U), V / f'(U)) for an expression f in the single variable `u`.
/// The new potentials are expression trees; f' is obtained symbolically.
/// Throws NumericalError if f'(U) vanishes at a sample of `region`.
PotentialSet gauge_transform(const PotentialSet& potentials, const SyntaxTree& f,
                             const ConstantTable& constants, const Region& region);

/// |grad V x grad U| over the samples (min and RMS are the interesting fields).
ResidualReport independence_metric(const ScalarField& u, const ScalarField& v,
                                   const Region& region);

struct DecomposeOptions {
  double grad_floor = 1e-12;
  double admissibility = 1e-6;  // |grad V . curl F| <= admissibility * scale
  DiffMode mode = DiffMode::analytic;
};

/// Gauge-fixed split F = F_c + F_nc of a 3D field given a characteristic
/// invariant V of curl F:
///   grad U = (grad V x curl F) / |grad V|^2,  F_nc = -V grad U,  F_c = F - F_nc.
class Decomposition3d {
 public:
  Decomposition3d(VectorField f, ScalarField v, DecomposeOptions options = {});

  const VectorField& force() const { return f_; }
  const ScalarField& invariant() const { return v_; }

  Eigen::VectorXd grad_u(const Eigen::VectorXd& p) const;
  Eigen::VectorXd nonconservative(const Eigen::VectorXd& p) const;
  Eigen::VectorXd conservative(const Eigen::VectorXd& p) const;

 private:
  VectorField f_;
  ScalarField v_;
  DecomposeOptions options_;
};

struct DecompositionResult {
  Decomposition3d decomposition;
  ResidualReport sum_residual;     // |F - F_c - F_nc|
  ResidualReport curl_conservative;  // |curl F_c|
  ResidualReport gauge;            // |grad V . grad U|
  ResidualReport curl_agreement;   // |curl F_nc - curl F|
  double scale = 0.0;
};

/// Checks the preconditions (|grad V| above floor, grad V . curl F within
/// tolerance) at every sample and reports the diagnostics. Curls of the
/// sampled parts use central differences.
DecompositionResult decompose3d(const VectorField& f, const ScalarField& v, const Region& region,
                                const DecomposeOptions& options = {});

/// |curl (F_nc^a - F_nc^b)|: two decompositions are equivalent when their
/// non-conservative parts differ by a gradient.
ResidualReport equivalence_residual(const Decomposition3d& a, const Decomposition3d& b,
                                    const Region& region);

/// Integrates dx/ds = curl F(x) from x0 over [0, s_max] and returns
/// max |V(x(s)) - V(x0)|. Throws DomainError when the curve leaves the domain.
double characteristic_deviation(const VectorField& f, const ScalarField& v,
                                const Eigen::VectorXd& x0, double s_max,
                                const OdeSettings& settings = {OdeMethod::dopri45, 1e-3, 1e-12,
                                                               1e-12});

}  // namespace curlforce
