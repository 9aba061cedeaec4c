#include "curlforce/ode.hpp"

#include <algorithm>
#include <cmath>

#include "curlforce/errors.hpp"

namespace curlforce {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output coefficients (Hairer, Norsett & Wanner).
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y0,
                  const Eigen::VectorXd& y1, double atol, double rtol) {
  const Eigen::ArrayXd sc = atol + rtol * y0.array().abs().max(y1.array().abs());
  return std::sqrt((err.array() / sc).square().mean());
}

void check_underflow(double h, double t) {
  if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
    throw NumericalError("step size underflow at t = " + std::to_string(t));
  }
}

double initial_step(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0,
                    const Eigen::VectorXd& f0, const OdeSettings& s, OdeStats& stats) {
  const Eigen::ArrayXd sc = s.atol + s.rtol * y0.array().abs();
  const double dy = std::sqrt((y0.array() / sc).square().mean());
  const double df = std::sqrt((f0.array() / sc).square().mean());
  double h0 = (dy < 1e-5 || df < 1e-5) ? 1e-6 : 0.01 * dy / df;
  h0 = std::min(h0, s.h_max);
  double d2 = 0.0;
  try {
    const Eigen::VectorXd f1 = rhs(t0 + h0, y0 + h0 * f0);
    ++stats.evaluations;
    d2 = std::sqrt(((f1 - f0).array() / sc).square().mean()) / h0;
  } catch (const Error&) {
    return h0 * 1e-3;
  }
  const double dmax = std::max(df, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
  return std::min({100.0 * h0, h1, s.h_max});
}

OdeStats solve_dopri(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0, double t_end,
                     const OdeSettings& s, const StepObserver& observer) {
  OdeStats stats;
  double t = t0;
  Eigen::VectorXd y = y0;
  Eigen::VectorXd k1 = rhs(t, y);
  ++stats.evaluations;
  double h = s.h_init > 0.0 ? std::min(s.h_init, s.h_max) : initial_step(rhs, t, y, k1, s, stats);
  bool last_rejected = false;

  while (t < t_end) {
    if (stats.accepted + stats.rejected >= s.max_steps) {
      throw NumericalError("maximum number of steps exceeded");
    }
    check_underflow(h, t);
    const bool final_step = t + h >= t_end;
    if (final_step) h = t_end - t;

    Eigen::VectorXd k2, k3, k4, k5, k6, k7, y1;
    try {
      k2 = rhs(t + c2 * h, y + h * (a21 * k1));
      k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      k7 = rhs(t + h, y1);
      stats.evaluations += 6;
    } catch (const Error&) {
      ++stats.rejected;
      h *= 0.25;
      last_rejected = true;
      continue;
    }

    const Eigen::VectorXd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, y, y1, s.atol, s.rtol);
    if (!std::isfinite(en) || en > 1.0) {
      ++stats.rejected;
      const double fac = std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.2;
      h *= fac;
      last_rejected = true;
      continue;
    }

    const double t1 = final_step ? t_end : t + h;
    const Eigen::VectorXd ydiff = y1 - y;
    const Eigen::VectorXd bspl = h * k1 - ydiff;
    const Eigen::VectorXd r3 = ydiff - h * k7 - bspl;
    const Eigen::VectorXd r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
    const double t_old = t;
    const double h_step = h;
    const Eigen::VectorXd& y_old = y;
    auto dense = [&, t_old, h_step](double tq) -> Eigen::VectorXd {
      const double th = (tq - t_old) / h_step;
      const double th1 = 1.0 - th;
      return y_old + th * (ydiff + th1 * (bspl + th * (r3 + th1 * r5)));
    };

    ++stats.accepted;
    const StepAction action = observer(StepView(t_old, t1, y_old, y1, dense));

    double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    if (last_rejected) fac = std::min(fac, 1.0);
    last_rejected = false;
    t = t1;
    y = y1;
    k1 = k7;
    if (action == StepAction::stop) {
      stats.stopped_early = t < t_end;
      if (stats.stopped_early) break;
    }
    h = std::min(h_step * fac, s.h_max);
  }
  return stats;
}

OdeStats solve_rk4(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0, double t_end,
                   const OdeSettings& s, const StepObserver& observer) {
  if (!(s.step > 0.0)) throw InputError("rk4 step must be positive");
  OdeStats stats;
  const auto n = static_cast<std::size_t>(std::ceil((t_end - t0) / s.step - 1e-9));
  if (n > s.max_steps) throw NumericalError("maximum number of steps exceeded");
  Eigen::VectorXd y = y0;
  Eigen::VectorXd k1 = rhs(t0, y);
  ++stats.evaluations;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * s.step;
    const double t1 = i + 1 == n ? t_end : t0 + static_cast<double>(i + 1) * s.step;
    const double h = t1 - t;
    const Eigen::VectorXd k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
    const Eigen::VectorXd k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
    const Eigen::VectorXd k4 = rhs(t + h, y + h * k3);
    const Eigen::VectorXd y1 = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const Eigen::VectorXd f1 = rhs(t1, y1);
    stats.evaluations += 4;
    auto dense = [&, t, h](double tq) -> Eigen::VectorXd {
      const double th = (tq - t) / h;
      const double th2 = th * th, th3 = th2 * th;
      return (2 * th3 - 3 * th2 + 1) * y + (th3 - 2 * th2 + th) * h * k1 +
             (-2 * th3 + 3 * th2) * y1 + (th3 - th2) * h * f1;
    };
    ++stats.accepted;
    const StepAction action = observer(StepView(t, t1, y, y1, dense));
    y = y1;
    k1 = f1;
    if (action == StepAction::stop) {
      stats.stopped_early = i + 1 < n;
      break;
    }
  }
  return stats;
}

}  // namespace

OdeStats solve_ode(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0, double t_end,
                   const OdeSettings& settings, const StepObserver& observer) {
  if (!(t_end > t0)) throw InputError("integration interval must have t_end > t0");
  if (!(settings.atol > 0.0) || !(settings.rtol > 0.0)) {
    throw InputError("integrator tolerances must be positive");
  }
  if (settings.method == OdeMethod::rk4) return solve_rk4(rhs, t0, y0, t_end, settings, observer);
  return solve_dopri(rhs, t0, y0, t_end, settings, observer);
}

}  // namespace curlforce
