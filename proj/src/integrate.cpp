#include "sqconv/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sqconv/models.hpp"

namespace sqconv {

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
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Step {
  VectorXd x;
  VectorXd fx;
  double error = 0.0;
};

Step dopri_step(const VectorField& f, const VectorXd& x, const VectorXd& k1, double h,
                const IntegratorConfig& cfg) {
  const VectorXd k2 = f(x + h * a21 * k1);
  const VectorXd k3 = f(x + h * (a31 * k1 + a32 * k2));
  const VectorXd k4 = f(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const VectorXd k5 = f(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const VectorXd k6 = f(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  Step s;
  s.x = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  s.fx = f(s.x);
  const VectorXd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * s.fx);
  const VectorXd scale =
      (cfg.abs_tol + cfg.rel_tol * x.cwiseAbs().cwiseMax(s.x.cwiseAbs()).array()).matrix();
  s.error = std::sqrt((err.array() / scale.array()).square().mean());
  return s;
}

Step rk4_step(const VectorField& f, const VectorXd& x, const VectorXd& k1, double h) {
  const VectorXd k2 = f(x + 0.5 * h * k1);
  const VectorXd k3 = f(x + 0.5 * h * k2);
  const VectorXd k4 = f(x + h * k3);
  Step s;
  s.x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  s.fx = f(s.x);
  return s;
}

// Drives the integration and reports (t, x, f(x)) either at every accepted
// step or exactly at the sorted targets.
template <typename Observer>
void drive(const VectorField& field, const VectorXd& x0, double t0, double t1,
           const IntegratorConfig& cfg, std::span<const double> targets, Observer&& observe) {
  cfg.validate();
  if (x0.size() != field.dim) throw InvalidArgument("initial state has the wrong dimension");
  if (!(t1 >= t0) || !std::isfinite(t0) || !std::isfinite(t1)) {
    throw InvalidArgument("integration interval must be finite with t1 >= t0");
  }
  std::vector<double> stops(targets.begin(), targets.end());
  std::erase_if(stops, [&](double t) { return t < t0 || t > t1; });
  std::sort(stops.begin(), stops.end());
  const bool every_step = targets.empty();
  std::size_t next = 0;

  double t = t0;
  VectorXd x = x0;
  VectorXd fx = field(x);
  auto emit_due = [&] {
    while (next < stops.size() && stops[next] <= t) {
      observe(stops[next], x, fx);
      ++next;
    }
  };
  if (every_step) {
    observe(t, x, fx);
  } else {
    emit_due();
  }

  double h = cfg.method == Method::RK4 ? cfg.initial_step : std::min(cfg.initial_step, cfg.max_step);
  long steps = 0;
  while (t < t1) {
    if (++steps > cfg.max_steps) {
      throw NumericalError(Failure::StepLimit, "integration exceeded the step limit");
    }
    double limit = t1;
    if (next < stops.size()) limit = std::min(limit, stops[next]);
    const bool clipped = t + h >= limit;
    double hs = clipped ? limit - t : h;
    if (hs <= 0.0) break;

    Step s;
    if (cfg.method == Method::RK4) {
      s = rk4_step(field, x, fx, hs);
    } else {
      s = dopri_step(field, x, fx, hs, cfg);
      if (!std::isfinite(s.error)) s.error = std::numeric_limits<double>::infinity();
      const double factor =
          s.error == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(s.error, -0.2), 0.2, 5.0);
      if (s.error > 1.0) {
        h = hs * std::max(factor, 0.1);
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
          throw NumericalError(Failure::StepUnderflow, "step size underflow");
        }
        continue;
      }
      if (!clipped) h = std::min(hs * factor, cfg.max_step);
      else h = std::min(std::max(h, hs * factor), cfg.max_step);
    }
    if (!s.x.allFinite()) throw NumericalError(Failure::StepUnderflow, "solution blew up");
    t = clipped ? limit : t + hs;
    x = std::move(s.x);
    fx = std::move(s.fx);
    if (every_step) {
      observe(t, x, fx);
    } else {
      emit_due();
    }
  }
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw InvalidArgument("tolerances must be positive");
  if (!(max_step > 0.0) || !(initial_step > 0.0)) throw InvalidArgument("step sizes must be positive");
  if (max_steps <= 0) throw InvalidArgument("max_steps must be positive");
}

IntegratorConfig IntegratorConfig::tight() {
  IntegratorConfig cfg;
  cfg.abs_tol = 1e-13;
  cfg.rel_tol = 1e-12;
  cfg.max_step = 0.5;
  return cfg;
}

VectorField make_field(Representation rep, const Parameters& params) {
  check_compatible(rep, params);
  VectorField field;
  field.dim = dimension(rep);
  field.f = [rep, params](const VectorXd& x) { return rhs(rep, x, params); };
  field.jac = [rep, params](const VectorXd& x) { return jacobian(rep, x, params); };
  return field;
}

Trajectory integrate(const VectorField& field, const VectorXd& x0, double t0, double t1,
                     const IntegratorConfig& cfg, std::span<const double> output_times) {
  Trajectory traj;
  drive(field, x0, t0, t1, cfg, output_times, [&](double t, const VectorXd& x, const VectorXd& fx) {
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.derivatives.push_back(fx);
  });
  return traj;
}

Trajectory integrate(Representation rep, const Parameters& params, const VectorXd& x0, double t0,
                     double t1, const IntegratorConfig& cfg, std::span<const double> output_times) {
  Trajectory traj = integrate(make_field(rep, params), x0, t0, t1, cfg, output_times);
  traj.rep = rep;
  traj.params = params;
  return traj;
}

VectorXd flow(const VectorField& field, const VectorXd& x0, double duration,
              const IntegratorConfig& cfg) {
  VectorXd end = x0;
  const double stop[] = {duration};
  drive(field, x0, 0.0, duration, cfg, stop, [&](double, const VectorXd& x, const VectorXd&) { end = x; });
  return end;
}

FlowSensitivity flow_with_sensitivity(const VectorField& field, const VectorXd& x0,
                                      double duration, const IntegratorConfig& cfg) {
  if (!field.jac) throw InvalidArgument("variational equations need an analytic Jacobian");
  const int n = field.dim;
  VectorField augmented;
  augmented.dim = n + n * n;
  augmented.f = [&field, n](const VectorXd& z) {
    VectorXd dz(z.size());
    const VectorXd x = z.head(n);
    dz.head(n) = field(x);
    const Eigen::Map<const MatrixXd> phi(z.data() + n, n, n);
    Eigen::Map<MatrixXd>(dz.data() + n, n, n) = field.jac(x) * phi;
    return dz;
  };
  VectorXd z0(augmented.dim);
  z0.head(n) = x0;
  Eigen::Map<MatrixXd>(z0.data() + n, n, n).setIdentity();
  const VectorXd z = flow(augmented, z0, duration, cfg);
  return {z.head(n), Eigen::Map<const MatrixXd>(z.data() + n, n, n)};
}

}  // namespace sqconv
