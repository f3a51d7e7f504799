#include "sqconv/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "sqconv/equilibrium.hpp"
#include "sqconv/linalg.hpp"
#include "sqconv/models.hpp"

namespace sqconv {

namespace {

Representation model_core(Representation model) {
  const Representation core = core_of(model);
  if (core != Representation::ShearCore && core != Representation::AmplitudeCore)
    throw InvalidArgument("sweeps follow the squares branch of the convection models only");
  return core;
}

VectorXd squares_for(Representation core, const ModelParams& p) {
  const VectorXd sq = squares_core(p);
  if (core == Representation::AmplitudeCore) return Eigen::Vector2d(sq(0), sq(3));
  return sq;
}

double shear_size(Representation core, const VectorXd& s) {
  if (core != Representation::ShearCore) return 0.0;
  return std::max({std::abs(s(1)), std::abs(s(2)), std::abs(s(4)), std::abs(s(5))});
}

Stability equilibrium_stability(const ComplexList& eigs, double tol = 1e-9) {
  double top = -std::numeric_limits<double>::infinity();
  for (const Complex& z : eigs) top = std::max(top, z.real());
  if (top > tol) return Stability::Unstable;
  if (top < -tol) return Stability::Stable;
  return Stability::Marginal;
}

struct Solved {
  bool ok = false;
  std::string failure;
  VectorXd state;
  double residual = 0.0;
  ComplexList eigenvalues;
  int unstable = 0;
};

Solved solve_squares(Representation core, const ModelParams& p, const VectorXd& seed) {
  Solved out;
  try {
    p.validate();
    const EquilibriumResult r = find_equilibrium(core, seed, p);
    out.residual = r.residual_norm;
    if (!r.converged) {
      out.failure = "newton: " + std::string(to_string(r.status));
      return out;
    }
    out.ok = true;
    out.state = r.core;
    out.eigenvalues = r.eigenvalues;
    out.unstable = count_unstable(r.eigenvalues, kUnstableThreshold);
  } catch (const std::exception& e) {
    out.failure = e.what();
  }
  return out;
}

std::vector<double> grid(double lo, double hi, double step) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidArgument("sweep bounds must be finite");
  if (lo > hi) throw InvalidArgument("sweep needs lo <= hi");
  if (lo == hi) return {lo};
  if (!(step > 0.0)) throw InvalidArgument("sweep step must be positive");
  std::vector<double> values;
  const double slack = 1e-9 * step;
  for (long i = 0;; ++i) {
    const double v = lo + static_cast<double>(i) * step;
    if (v > hi + slack) break;
    values.push_back(std::min(v, hi));
  }
  if (values.back() < hi - slack) values.push_back(hi);
  return values;
}

}  // namespace

SweepResult sweep_parameter(Representation model, const ModelParams& p0, const std::string& name, double lo,
                            double hi, double step) {
  const Representation core = model_core(model);
  ModelParams p = p0;
  (void)p[name];  // rejects unknown names before any work
  SweepResult out;
  out.model = model;
  out.base = p0;
  out.parameter = name;

  std::optional<VectorXd> previous;
  for (double v : grid(lo, hi, step)) {
    p[name] = v;
    SweepPoint pt;
    pt.value = v;
    VectorXd seed;
    try {
      seed = previous ? *previous : squares_for(core, p);
    } catch (const std::exception& e) {
      pt.failure = e.what();
      out.points.push_back(std::move(pt));
      continue;
    }
    const Solved s = solve_squares(core, p, seed);
    pt.converged = s.ok;
    pt.failure = s.failure;
    pt.residual = s.residual;
    if (s.ok) {
      pt.state = s.state;
      pt.eigenvalues = s.eigenvalues;
      pt.unstable = s.unstable;
      try {
        pt.label = classify_equilibrium(core, s.state, p).label;
      } catch (const std::exception&) {
        pt.label = BranchLabel::Unknown;
      }
      const VectorXd radii = core == Representation::ShearCore ? VectorXd(Eigen::Vector2d(s.state(0), s.state(3)))
                                                               : s.state;
      pt.amplitude_stable =
          count_unstable(eigenvalues(jacobian(Representation::AmplitudeCore, radii, p)), 0.0) == 0 &&
          radii.minCoeff() > 0.0;
      previous = s.state;
    }
    out.points.push_back(std::move(pt));
  }
  return out;
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Pitchfork: return "pitchfork";
    case EventKind::Hopf: return "hopf";
    case EventKind::TakensBogdanov: return "takens-bogdanov";
  }
  return "?";
}

EventKind event_kind_from_string(std::string_view text) {
  for (EventKind k : {EventKind::Pitchfork, EventKind::Hopf, EventKind::TakensBogdanov})
    if (to_string(k) == text) return k;
  throw InvalidArgument("unknown event kind '" + std::string(text) + "'");
}

std::vector<BifurcationEvent> detect_bifurcations(const SweepResult& sweep, const DetectOptions& opts) {
  std::vector<BifurcationEvent> events;
  if (sweep.points.size() < 2) return events;
  const Representation core = model_core(sweep.model);
  ModelParams p = sweep.base;

  for (std::size_t i = 0; i + 1 < sweep.points.size(); ++i) {
    const SweepPoint& lo = sweep.points[i];
    const SweepPoint& hi = sweep.points[i + 1];
    if (!lo.converged || !hi.converged || lo.unstable == hi.unstable) continue;

    double a = lo.value, b = hi.value;
    VectorXd sa = lo.state, sb = hi.state;
    bool lost = false;
    while (std::abs(b - a) > opts.parameter_tol) {
      const double m = 0.5 * (a + b);
      p[sweep.parameter] = m;
      const Solved s = solve_squares(core, p, sa);
      if (!s.ok) {
        lost = true;
        break;
      }
      if (s.unstable == lo.unstable) {
        a = m;
        sa = s.state;
      } else {
        b = m;
        sb = s.state;
      }
    }
    if (lost) continue;

    BifurcationEvent ev;
    ev.parameter = sweep.parameter;
    ev.value = 0.5 * (a + b);
    ev.unstable_before = lo.unstable;
    ev.unstable_after = hi.unstable;
    p[sweep.parameter] = ev.value;
    const Solved at = solve_squares(core, p, sa);
    const ComplexList eigs = at.ok ? at.eigenvalues : lo.eigenvalues;

    int near_zero = 0;
    for (const Complex& z : eigs) {
      if (std::abs(z.real()) <= 1e-6) ev.critical.push_back(z);
      if (std::abs(z) < opts.zero_radius) ++near_zero;
    }
    for (const Complex& z : ev.critical) ev.frequency = std::max(ev.frequency, std::abs(z.imag()));
    const int change = std::abs(hi.unstable - lo.unstable);
    if (near_zero > change) {
      ev.kind = EventKind::TakensBogdanov;
      ev.frequency = 0.0;
    } else if (ev.frequency > opts.hopf_imag) {
      ev.kind = EventKind::Hopf;
    } else {
      ev.kind = EventKind::Pitchfork;
      ev.frequency = 0.0;
    }
    events.push_back(std::move(ev));
  }
  return events;
}

namespace {

BranchPoint equilibrium_point(Representation core, const ModelParams& p, double value, const VectorXd& state,
                              const ComplexList& eigs) {
  BranchPoint pt;
  pt.value = value;
  pt.state = state;
  pt.amplitude = shear_size(core, state);
  pt.spectrum = eigs;
  pt.stability = equilibrium_stability(eigs);
  try {
    pt.label = classify_equilibrium(core, state, p).label;
  } catch (const std::exception&) {
    pt.label = BranchLabel::Unknown;
  }
  return pt;
}

BranchPoint orbit_point(double value, PeriodicOrbit orbit) {
  BranchPoint pt;
  pt.value = value;
  pt.state = orbit.samples.col(0);
  for (Eigen::Index j = 0; j < orbit.size(); ++j)
    pt.amplitude = std::max(pt.amplitude, shear_size(orbit.rep, orbit.samples.col(j)));
  pt.spectrum = orbit.floquet_multipliers;
  pt.stability = orbit_stability(nontrivial_multipliers(orbit.floquet_multipliers));
  try {
    pt.label = classify_orbit(orbit).label;
  } catch (const std::exception&) {
    pt.label = BranchLabel::Unknown;
  }
  pt.orbit = std::move(orbit);
  return pt;
}

// Real part of the critical eigenvector (Im > 0, closest to the imaginary
// axis) of the Jacobian restricted to span(P), mapped back to the core space,
// with the frequency of that eigenvalue.
struct HopfMode {
  VectorXd direction;
  double frequency = 0.0;
};

HopfMode hopf_mode(const MatrixXd& J, const MatrixXd& P) {
  const Eigen::EigenSolver<MatrixXd> es(P.transpose() * J * P);
  Eigen::Index best = -1;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Complex z = es.eigenvalues()(i);
    if (z.imag() <= 1e-8) continue;
    if (best < 0 || std::abs(z.real()) < std::abs(es.eigenvalues()(best).real())) best = i;
  }
  if (best < 0) throw NumericalError(Failure::Degenerate, "no oscillatory eigenvalue in the subspace");
  VectorXd w = P * es.eigenvectors().col(best).real();
  if (w.lpNorm<Eigen::Infinity>() < 1e-12) w = P * es.eigenvectors().col(best).imag();
  return {w / w.lpNorm<Eigen::Infinity>(), es.eigenvalues()(best).imag()};
}

}  // namespace

BranchData follow_branch(Representation model, const ModelParams& p0, const BifurcationEvent& event,
                         const BranchSeed& seed, bool increasing, int n_steps, double step) {
  const Representation core = model_core(model);
  if (n_steps < 0) throw InvalidArgument("n_steps must be non-negative");
  if (!(step > 0.0)) throw InvalidArgument("step must be positive");
  BranchData out;
  out.origin = event;
  if (n_steps == 0) {
    out.completed = true;
    return out;
  }
  const double sign = increasing ? 1.0 : -1.0;
  const double amp = seed.amplitude > 0.0 ? seed.amplitude : std::sqrt(step);
  ModelParams p = p0;
  p[event.parameter] = event.value;
  const int n = dimension(core);

  if (event.kind != EventKind::Hopf) {
    VectorXd dir = seed.direction;
    if (dir.size() == 0) {
      if (core != Representation::ShearCore) throw InvalidArgument("a seed direction is required for this model");
      dir = VectorXd::Zero(n);
      dir(1) = dir(2) = 1.0;  // c_x = d_x: null vector of the shear block
    }
    if (dir.size() != n) throw InvalidArgument("seed direction has the wrong dimension");
    dir /= dir.lpNorm<Eigen::Infinity>();

    VectorXd previous;
    for (int i = 1; i <= n_steps; ++i) {
      const double v = event.value + sign * i * step;
      p[event.parameter] = v;
      const VectorXd squares = squares_for(core, p);
      const Solved s = solve_squares(core, p, i == 1 ? VectorXd(squares + amp * dir) : previous);
      std::string problem;
      if (!s.ok) problem = "solver failure: " + s.failure;
      else if ((s.state - squares).lpNorm<Eigen::Infinity>() <= 1e-8 * (1.0 + squares.lpNorm<Eigen::Infinity>()))
        problem = "continuation fell back onto squares";
      if (!problem.empty()) {
        if (i == 1)
          throw NumericalError(Failure::Degenerate, "no bifurcating branch in this direction (" + problem + ")");
        out.stop_reason = problem;
        return out;
      }
      out.points.push_back(equilibrium_point(core, p, v, s.state, s.eigenvalues));
      previous = s.state;
    }
    out.completed = true;
    return out;
  }

  const MatrixXd P = seed.subspace.size() ? seed.subspace : MatrixXd::Identity(n, n);
  if (P.rows() != n) throw InvalidArgument("subspace basis has the wrong dimension");
  const VectorField first_field = make_field(core, p);
  const VectorXd sq0 = squares_for(core, p);
  const HopfMode mode = hopf_mode(first_field.jac(sq0), P);
  VectorXd dir = seed.direction.size() ? VectorXd(seed.direction / seed.direction.lpNorm<Eigen::Infinity>())
                                       : mode.direction;
  if (dir.size() != n) throw InvalidArgument("seed direction has the wrong dimension");

  ShootingOptions so;
  so.subspace = seed.subspace;
  std::optional<PeriodicOrbit> previous;
  for (int i = 1; i <= n_steps; ++i) {
    const double v = event.value + sign * i * step;
    p[event.parameter] = v;
    const VectorField field = make_field(core, p);
    try {
      PeriodicOrbit orbit;
      if (!previous) {
        const double omega = event.frequency > 0.0 ? event.frequency : mode.frequency;
        orbit = find_periodic_orbit(field, core, squares_for(core, p) + amp * dir,
                                    2.0 * std::numbers::pi / omega, so);
      } else {
        orbit = find_periodic_orbit(field, core, previous->samples.col(0), previous->period, so);
      }
      out.points.push_back(orbit_point(v, orbit));
      previous = std::move(orbit);
    } catch (const NumericalError& e) {
      if (i == 1)
        throw NumericalError(Failure::Degenerate,
                             std::string("no bifurcating orbit in this direction (") + e.what() + ")");
      out.stop_reason = e.what();
      return out;
    }
  }
  out.completed = true;
  return out;
}

}  // namespace sqconv
