#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sqconv/classify.hpp"
#include "sqconv/orbit.hpp"
#include "sqconv/sweep.hpp"

namespace sqconv {

// End-to-end run at the oscillatory square-pattern parameters: Hopf onset from
// a sweep, attractors reached from random perturbations of squares, and the
// two symmetric orbits refined inside their fixed subspaces.
struct Figure2Options {
  ModelParams params;
  std::uint64_t seed = 42;
  int trials = 10;
  double perturbation = 0.1;
  double classify_tol = 1e-6;
  double sweep_lo = 0.1;
  double sweep_hi = 1.4;
  double sweep_step = 0.01;
};

struct OrbitReport {
  bool found = false;
  std::string failure;
  VectorXd initial;
  PeriodicOrbit orbit;
  SolutionLabel label;
  DriftProfile drift;
  Stability stability = Stability::Marginal;  // from the full-space multipliers
};

struct Figure2Report {
  std::vector<BifurcationEvent> events;
  std::vector<OrbitReport> trials;
  OrbitReport psq;   // refined in Fix(my)
  OrbitReport dpsq;  // refined in Fix(md)
};

Figure2Report reproduce_figure2(const Figure2Options& opts = {});

}  // namespace sqconv
