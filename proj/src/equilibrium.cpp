#include "sqconv/equilibrium.hpp"

#include <cmath>

#include <Eigen/LU>

#include "sqconv/linalg.hpp"
#include "sqconv/models.hpp"

namespace sqconv {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::NotConverged: return "not-converged";
    case SolveStatus::SingularJacobian: return "singular-jacobian";
  }
  return "not-converged";
}

NewtonResult newton_solve(const VectorField& field, const VectorXd& guess, const NewtonOptions& opts) {
  if (guess.size() != field.dim) throw InvalidArgument("guess has the wrong dimension");
  if (!field.jac) throw InvalidArgument("Newton iteration needs a Jacobian");
  NewtonResult out;
  out.x = guess;
  VectorXd fx = field(out.x);
  out.residual_norm = fx.lpNorm<Eigen::Infinity>();
  for (; out.iterations < opts.max_iter; ++out.iterations) {
    if (out.residual_norm <= opts.tol) {
      out.status = SolveStatus::Converged;
      return out;
    }
    const Eigen::FullPivLU<MatrixXd> lu(field.jac(out.x));
    if (!lu.isInvertible()) {
      out.status = SolveStatus::SingularJacobian;
      return out;
    }
    const VectorXd step = lu.solve(-fx);
    double scale = 1.0;
    VectorXd trial = out.x + step;
    VectorXd ftrial = field(trial);
    for (int h = 0; h < opts.max_halvings && !(ftrial.lpNorm<Eigen::Infinity>() < out.residual_norm); ++h) {
      scale *= 0.5;
      trial = out.x + scale * step;
      ftrial = field(trial);
    }
    if (!ftrial.allFinite()) break;
    out.x = std::move(trial);
    fx = std::move(ftrial);
    out.residual_norm = fx.lpNorm<Eigen::Infinity>();
  }
  out.status = out.residual_norm <= opts.tol ? SolveStatus::Converged : SolveStatus::NotConverged;
  return out;
}

EquilibriumResult find_equilibrium(Representation model, const VectorXd& guess,
                                   const Parameters& params, const NewtonOptions& opts) {
  check_compatible(model, params);
  const Representation core_rep = core_of(model);
  const NewtonResult solved = newton_solve(make_field(core_rep, params), reduce(model, guess), opts);

  EquilibriumResult out;
  out.rep = model;
  out.core = solved.x;
  // Radii are only defined up to sign; the sign is absorbed into the phase.
  if (core_rep == Representation::ShearCore) {
    out.core(0) = std::abs(out.core(0));
    out.core(3) = std::abs(out.core(3));
  } else if (core_rep == Representation::AmplitudeCore) {
    out.core = out.core.cwiseAbs();
  }
  out.state = lift(model, solved.x, guess);
  out.residual_norm = solved.residual_norm;
  out.iterations = solved.iterations;
  out.status = solved.status;
  out.converged = solved.status == SolveStatus::Converged;
  if (out.core.allFinite()) out.eigenvalues = eigenvalues(jacobian(core_rep, out.core, params));
  return out;
}

}  // namespace sqconv
