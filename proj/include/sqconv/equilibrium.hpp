#pragma once

#include <string_view>

#include "sqconv/integrate.hpp"
#include "sqconv/types.hpp"

namespace sqconv {

enum class SolveStatus { Converged, NotConverged, SingularJacobian };

std::string_view to_string(SolveStatus status);

struct NewtonOptions {
  double tol = 1e-12;  // on ||F||_inf
  int max_iter = 50;
  int max_halvings = 30;
};

struct NewtonResult {
  VectorXd x;
  double residual_norm = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::NotConverged;
};

/// Damped Newton iteration: the step is halved while the residual grows.
NewtonResult newton_solve(const VectorField& field, const VectorXd& guess,
                          const NewtonOptions& opts = {});

// Equilibria are computed in the translation-free core form, so states that
// drift uniformly along the group orbit (travelling squares) count as
// equilibria. The reported state is lifted back to the requested model, and
// the eigenvalues are those of the core Jacobian (phase directions excluded).
struct EquilibriumResult {
  Representation rep = Representation::ShearCore;
  VectorXd state;
  VectorXd core;
  double residual_norm = 0.0;
  ComplexList eigenvalues;
  bool converged = false;
  SolveStatus status = SolveStatus::NotConverged;
  int iterations = 0;
};

EquilibriumResult find_equilibrium(Representation model, const VectorXd& guess,
                                   const Parameters& params, const NewtonOptions& opts = {});

}  // namespace sqconv
