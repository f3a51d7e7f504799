#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "sqconv/types.hpp"

namespace sqconv {

/// Autonomous vector field x' = f(x) with optional analytic Jacobian.
struct VectorField {
  int dim = 0;
  std::function<VectorXd(const VectorXd&)> f;
  std::function<MatrixXd(const VectorXd&)> jac;

  VectorXd operator()(const VectorXd& x) const { return f(x); }
};

VectorField make_field(Representation rep, const Parameters& params);

enum class Method { RK4, DormandPrince };

// For RK4 the step is fixed at initial_step; tolerances apply to the
// embedded 5(4) pair only.
struct IntegratorConfig {
  Method method = Method::DormandPrince;
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double max_step = 1.0;
  double initial_step = 1e-3;
  long max_steps = 10'000'000;

  void validate() const;

  /// Tolerances used for shooting and monodromy computations.
  static IntegratorConfig tight();
};

struct Trajectory {
  std::vector<double> times;
  std::vector<VectorXd> states;
  std::vector<VectorXd> derivatives;  // f(state); may be empty for imported data
  Representation rep = Representation::Full;
  Parameters params = ModelParams{};

  std::size_t size() const { return times.size(); }
};

/// Integrates from t0 to t1 >= t0. With no output times every accepted step
/// is recorded; otherwise steps are clipped to land exactly on each output
/// time in [t0, t1] and only those are recorded.
Trajectory integrate(const VectorField& field, const VectorXd& x0, double t0, double t1,
                     const IntegratorConfig& cfg = {}, std::span<const double> output_times = {});

Trajectory integrate(Representation rep, const Parameters& params, const VectorXd& x0, double t0,
                     double t1, const IntegratorConfig& cfg = {},
                     std::span<const double> output_times = {});

/// End state after `duration`.
VectorXd flow(const VectorField& field, const VectorXd& x0, double duration,
              const IntegratorConfig& cfg = {});

struct FlowSensitivity {
  VectorXd state;
  MatrixXd jacobian;  // d(state)/d(x0), from the variational equations
};

FlowSensitivity flow_with_sensitivity(const VectorField& field, const VectorXd& x0,
                                      double duration, const IntegratorConfig& cfg = {});

}  // namespace sqconv
