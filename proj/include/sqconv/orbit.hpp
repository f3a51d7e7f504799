#pragma once

#include <optional>
#include <vector>

#include "sqconv/integrate.hpp"
#include "sqconv/symmetry.hpp"
#include "sqconv/types.hpp"

namespace sqconv {

/// Hyperplane x[coordinate] = offset; direction +1 upward, -1 downward, 0 both.
struct Section {
  int coordinate = 0;
  double offset = 0.0;
  int direction = 1;
};

/// c_x = 0 increasing for the magnetoconvection forms, Re v_x = 0 for the
/// Hopf normal form.
Section default_section(Representation rep);
/// The c_y (or Re v_y) section used when an orbit never leaves c_x = 0.
Section fallback_section(Representation rep);

struct Crossing {
  double t = 0.0;
  VectorXd state;
};

/// Crossings located by bisection on the cubic Hermite interpolant of each
/// bracketing step (slopes from the recorded derivatives, or from finite
/// differences when none were recorded).
std::vector<Crossing> section_crossings(const Trajectory& traj, const Section& section);

/// Mean spacing of the last `use` crossings, if at least two exist.
std::optional<double> estimate_period(const std::vector<Crossing>& crossings, int use = 4);

struct ShootingOptions {
  std::optional<Section> section;  // default_section() of the core form when unset
  MatrixXd subspace;  // orthonormal basis of an invariant linear subspace; empty = whole space
  Eigen::Index samples = 256;
  double tol = 1e-10;  // closure ||x(T) - x(0)||_inf
  int max_iter = 40;
  double min_amplitude = 1e-8;
  IntegratorConfig integrator = IntegratorConfig::tight();
};

/// Single shooting: Newton on (state on section, period) for x(T) = x(0).
/// Works on a generic field; `rep` only tags the result.
PeriodicOrbit find_periodic_orbit(const VectorField& field, Representation rep,
                                  const VectorXd& guess, double period_guess,
                                  const ShootingOptions& opts = {});

/// Shooting for a model: the guess is reduced to the model's core form and the
/// orbit is returned in that form (phases are slaved and excluded).
PeriodicOrbit find_periodic_orbit(Representation model, const Parameters& params,
                                  const VectorXd& guess, double period_guess,
                                  const ShootingOptions& opts = {});

MatrixXd monodromy(const VectorField& field, const VectorXd& x0, double period,
                   const IntegratorConfig& cfg = IntegratorConfig::tight());

/// Multipliers over one period from the orbit's first sample. With a subspace
/// basis P the restricted monodromy P^T M P is used.
ComplexList floquet_multipliers(const PeriodicOrbit& orbit, const Parameters& params,
                                const MatrixXd& subspace = {});

/// Drops the multiplier closest to 1 (the flow direction).
ComplexList nontrivial_multipliers(const ComplexList& multipliers);

enum class Stability { Stable, Unstable, Marginal };

std::string_view to_string(Stability s);

/// Verdict from the non-trivial multipliers: any |m| > 1 + tol is unstable,
/// all |m| < 1 - tol is stable, otherwise marginal.
Stability orbit_stability(const ComplexList& multipliers, double tol = 1e-6);

/// Orthonormal basis of the subspace fixed by a dihedral element.
MatrixXd fixed_subspace(Representation rep, Dihedral d);

struct HuntOptions {
  double transient = 200.0;
  double window = 150.0;
  IntegratorConfig integrator;
  ShootingOptions shooting;
};

/// Integrates past the transient, estimates the period from section
/// crossings and refines the orbit by shooting.
PeriodicOrbit orbit_from_transient(Representation model, const Parameters& params,
                                   const VectorXd& initial, const HuntOptions& opts = {});

}  // namespace sqconv
