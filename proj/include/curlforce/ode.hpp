#pragma once

#include <cstddef>
#include <functional>
#include <limits>

#include <Eigen/Core>

namespace curlforce {

enum class OdeMethod { rk4, dopri45 };

struct OdeSettings {
  OdeMethod method = OdeMethod::dopri45;
  double step = 1e-3;  // rk4 fixed step
  double atol = 1e-9;
  double rtol = 1e-9;
  double h_init = 0.0;  // 0 selects the step automatically
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 5'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
  bool stopped_early = false;
};

using OdeRhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

/// One accepted step and its continuous extension on [t0, t1].
class StepView {
 public:
  StepView(double t0, double t1, const Eigen::VectorXd& y0, const Eigen::VectorXd& y1,
           std::function<Eigen::VectorXd(double)> dense)
      : t0_(t0), t1_(t1), y0_(y0), y1_(y1), dense_(std::move(dense)) {}

  double t0() const { return t0_; }
  double t1() const { return t1_; }
  const Eigen::VectorXd& y0() const { return y0_; }
  const Eigen::VectorXd& y1() const { return y1_; }
  Eigen::VectorXd at(double t) const { return dense_(t); }

 private:
  double t0_, t1_;
  const Eigen::VectorXd& y0_;
  const Eigen::VectorXd& y1_;
  std::function<Eigen::VectorXd(double)> dense_;
};

enum class StepAction { proceed, stop };

using StepObserver = std::function<StepAction(const StepView&)>;

/// Integrates y' = f(t, y) from t0 to t_end, calling `observer` after every
/// accepted step. dopri45 uses embedded error control with its fourth-order
/// dense output; rk4 uses a fixed step with cubic Hermite interpolation.
///
/// For dopri45 a stage evaluation that throws curlforce::Error rejects the
/// step and retries with a smaller one. Throws NumericalError on step-size
/// underflow or when max_steps is exceeded.
OdeStats solve_ode(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0, double t_end,
                   const OdeSettings& settings, const StepObserver& observer);

}  // namespace curlforce
