#include "sqconv/figure2.hpp"

#include "sqconv/models.hpp"
#include "sqconv/random.hpp"

namespace sqconv {

namespace {

void finish_report(OrbitReport& r, const ModelParams& p, double tol) {
  r.label = classify_orbit(r.orbit, tol);
  r.drift = drift_profile(r.orbit, p);
  r.stability = orbit_stability(nontrivial_multipliers(r.orbit.floquet_multipliers));
  r.found = true;
}

OrbitReport hunt(const ModelParams& p, const VectorXd& initial, const MatrixXd& subspace, double tol) {
  OrbitReport r;
  r.initial = initial;
  try {
    HuntOptions ho;
    ho.shooting.subspace = subspace;
    r.orbit = orbit_from_transient(Representation::ShearCore, p, initial, ho);
    finish_report(r, p, tol);
  } catch (const std::exception& e) {
    r.found = false;
    r.failure = e.what();
  }
  return r;
}

}  // namespace

Figure2Report reproduce_figure2(const Figure2Options& opts) {
  opts.params.validate();
  Figure2Report out;
  out.events = detect_bifurcations(
      sweep_parameter(Representation::Full, opts.params, "mu", opts.sweep_lo, opts.sweep_hi, opts.sweep_step));

  Rng rng(opts.seed);
  const VectorXd squares = squares_core(opts.params);
  auto perturbed = [&] {
    VectorXd x = squares;
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += uniform(rng, -opts.perturbation, opts.perturbation);
    return x;
  };
  for (int t = 0; t < opts.trials; ++t) out.trials.push_back(hunt(opts.params, perturbed(), {}, opts.classify_tol));
  out.psq = hunt(opts.params, perturbed(), fixed_subspace(Representation::ShearCore, Dihedral::my),
                 opts.classify_tol);
  out.dpsq = hunt(opts.params, perturbed(), fixed_subspace(Representation::ShearCore, Dihedral::md),
                  opts.classify_tol);
  return out;
}

}  // namespace sqconv
