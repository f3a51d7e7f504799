#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sqconv/classify.hpp"
#include "sqconv/equilibrium.hpp"
#include "sqconv/integrate.hpp"
#include "sqconv/sweep.hpp"
#include "sqconv/types.hpp"

namespace sqconv {

using Json = nlohmann::ordered_json;

/// Shortest text that reads back to the same double: "%.17g".
std::string format_double(double x);

// Parameters as flat objects. Magnetoconvection keys: mu beta gamma Q zeta D k.
// Pitchfork normal form: lambda A B D. Hopf normal form: lambda omega A B C D,
// complex coefficients written as [re, im] (a bare number means im = 0).
// Missing keys keep their defaults; unknown keys are rejected.
Json to_json(const Parameters& params);
Parameters params_from_json(const Json& j, Representation model);
/// Inline JSON (text starting with '{') or the path of a JSON file.
Parameters load_params(const std::string& text_or_path, Representation model);

Json to_json(const ComplexList& values);  // [[re, im], ...]
ComplexList complex_list_from_json(const Json& j);
Json to_json(const VectorXd& v);
VectorXd vector_from_json(const Json& j);

// CSV: header "t,<fields>", one row per sample, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// The representation is recovered from the header.
Trajectory read_trajectory_csv(std::istream& is);

// {model, period, residual, multipliers, samples}; samples is a list of states.
Json orbit_to_json(const PeriodicOrbit& orbit);
PeriodicOrbit orbit_from_json(const Json& j);

Json to_json(const SpatioTemporalSymmetry& s);
Json to_json(const SolutionLabel& label);
Json to_json(const DriftProfile& drift);
Json to_json(const EquilibriumResult& eq);
Json to_json(const BifurcationEvent& ev);
BifurcationEvent event_from_json(const Json& j);
Json to_json(const BranchData& branch);

// Sweep CSV: value, core fields, leading eigenvalue (re, im), unstable count,
// label, converged.
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);
std::vector<std::vector<std::string>> read_csv(std::istream& is);

Json events_to_json(const std::vector<BifurcationEvent>& events);

// Everything a run depends on.
struct RunConfig {
  Representation model = Representation::Full;
  Parameters params = ModelParams{};
  IntegratorConfig integrator;
  std::uint64_t seed = 42;
  double t_end = 100.0;
  double dt_out = 0.1;
  double tol = 1e-6;
  std::string out;

  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

Json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const Json& j);

}  // namespace sqconv
