#pragma once

#include <array>
#include <vector>

#include "sqconv/models.hpp"
#include "sqconv/symmetry.hpp"
#include "sqconv/types.hpp"

namespace sqconv {

// Isotropy label of a solution. Labels are reported up to conjugacy: the
// detected invariance group equals conjugator * canonical * conjugator^-1,
// and `generators` are the canonical generators conjugated accordingly.
//   TSq  <my>           DTSq <md>
//   PSq  <my, th*mx>    DPSq <md, th*mdp>    APW <tq*rq>
struct SolutionLabel {
  BranchLabel label = BranchLabel::Unknown;
  std::vector<SpatioTemporalSymmetry> generators;
  std::vector<SpatioTemporalSymmetry> isotropy;  // every detected element
  Dihedral conjugator = Dihedral::e;
  int circulation = 0;    // APW: +1 if tq*rq is present, -1 for the reverse circulation
  double residual = 0.0;  // equilibria: ||F||; orbits: worst relative defect of the detected elements
};

inline constexpr double kEquilibriumResidual = 1e-8;

/// Labels an equilibrium (relative equilibria such as travelling squares
/// included). Throws InvalidArgument if the core residual exceeds 1e-8.
SolutionLabel classify_equilibrium(Representation rep, const VectorXd& state, const Parameters& params,
                                   double tol = 1e-8);

/// Relative distance between g applied to the orbit and the orbit itself.
double symmetry_defect(const PeriodicOrbit& orbit, const SpatioTemporalSymmetry& g);

/// Labels a refined periodic orbit from its spatio-temporal invariance group.
SolutionLabel classify_orbit(const PeriodicOrbit& orbit, double tol = 1e-6);

/// Canonical isotropy group of a label (empty for labels without one).
std::vector<SpatioTemporalSymmetry> canonical_group(BranchLabel label);

struct DriftProfile {
  Eigen::Vector2d net = Eigen::Vector2d::Zero();                     // over one period
  std::array<Eigen::Vector2d, 4> quarters{};                         // from the first sample
  Eigen::Vector2d rate = Eigen::Vector2d::Zero();                    // mean drift velocity
  Eigen::Vector2d peak_excursion = Eigen::Vector2d::Zero();          // max |phi(t) - phi(0)|
  MatrixXd phases;  // 2 x N phase displacement at each sample time (orbits only)
};

/// Steady drift of an equilibrium.
DriftProfile drift_profile(Representation rep, const VectorXd& equilibrium, const Parameters& params);

/// Integrates the drift equations along a refined orbit.
DriftProfile drift_profile(const PeriodicOrbit& orbit, const Parameters& params);

/// Quarter-period displacements starting at sample `start` (needs a sample
/// count divisible by 4).
std::array<Eigen::Vector2d, 4> quarter_drifts(const DriftProfile& profile, Eigen::Index start);

struct DriftCycle {
  bool alternating = false;  // +x, +y, -x, -y up to conjugacy
  int circulation = 0;
  Eigen::Index start = 0;
  std::array<Eigen::Vector2d, 4> quarters{};
};

/// Picks the start maximising the first quarter's drift and checks that
/// successive quarters rotate by a quarter turn with one dominant axis each.
DriftCycle cyclic_drift_pattern(const DriftProfile& profile, double tol = 1e-6);

}  // namespace sqconv
