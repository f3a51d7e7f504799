#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sqconv/classify.hpp"
#include "sqconv/orbit.hpp"
#include "sqconv/types.hpp"

namespace sqconv {

// Squares branch at one parameter value. `state` is in the core form of the
// swept model; eigenvalues are those of the core Jacobian.
struct SweepPoint {
  double value = 0.0;
  bool converged = false;
  std::string failure;  // solver message when !converged
  VectorXd state;
  double residual = 0.0;
  ComplexList eigenvalues;
  int unstable = 0;  // eigenvalues with Re > kUnstableThreshold
  BranchLabel label = BranchLabel::Unknown;
  bool amplitude_stable = false;  // within the amplitude equations alone
};

struct SweepResult {
  Representation model = Representation::Full;
  ModelParams base;
  std::string parameter;
  std::vector<SweepPoint> points;  // ordered by value
};

inline constexpr double kUnstableThreshold = 1e-13;

/// Continues the squares equilibrium over lo, lo+step, ..., hi (hi included),
/// each point seeded by the previous converged one. lo == hi gives one point.
SweepResult sweep_parameter(Representation model, const ModelParams& p0, const std::string& name,
                            double lo, double hi, double step);

enum class EventKind { Pitchfork, Hopf, TakensBogdanov };

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view text);

struct BifurcationEvent {
  EventKind kind = EventKind::Pitchfork;
  std::string parameter;
  double value = 0.0;
  ComplexList critical;  // eigenvalues nearest the imaginary axis at `value`
  double frequency = 0.0;  // |Im| of the critical pair (Hopf only)
  int unstable_before = 0;
  int unstable_after = 0;
};

struct DetectOptions {
  double parameter_tol = 1e-10;
  double hopf_imag = 1e-6;   // |Im| above this makes a crossing a Hopf
  double zero_radius = 1e-3;  // eigenvalues this small count towards a double zero
};

/// Brackets changes in the unstable count between consecutive converged
/// points and bisects each bracket by re-solving the equilibrium.
std::vector<BifurcationEvent> detect_bifurcations(const SweepResult& sweep, const DetectOptions& opts = {});

// Seed for leaving the squares branch at an event. An empty direction picks
// the x-shear direction (pitchfork) or the critical eigenvector restricted to
// the subspace (Hopf); amplitude <= 0 picks sqrt(step).
struct BranchSeed {
  VectorXd direction;
  MatrixXd subspace;  // invariant subspace basis for periodic branches; empty = whole core space
  double amplitude = 0.0;
};

struct BranchPoint {
  double value = 0.0;
  VectorXd state;  // equilibrium in core form, or the orbit's first sample
  std::optional<PeriodicOrbit> orbit;
  double amplitude = 0.0;  // max |shear| over the solution
  BranchLabel label = BranchLabel::Unknown;
  Stability stability = Stability::Marginal;
  ComplexList spectrum;  // core eigenvalues or full-space multipliers
};

struct BranchData {
  BifurcationEvent origin;
  std::vector<BranchPoint> points;
  bool completed = false;
  std::string stop_reason;
};

/// Natural-parameter continuation of the solution created at `event`.
/// Throws NumericalError if the first step cannot leave the squares branch.
BranchData follow_branch(Representation model, const ModelParams& p, const BifurcationEvent& event,
                         const BranchSeed& seed, bool increasing, int n_steps, double step);

}  // namespace sqconv
