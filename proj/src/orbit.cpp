#include "sqconv/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/QR>

#include "sqconv/linalg.hpp"
#include "sqconv/models.hpp"

namespace sqconv {

namespace {

struct Hermite {
  double t0, h;
  const VectorXd &y0, &y1, &m0, &m1;

  VectorXd at(double s) const {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * m0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * h * m1;
  }
  double at(double s, int i) const {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0(i) + (s3 - 2 * s2 + s) * h * m0(i) + (-2 * s3 + 3 * s2) * y1(i) +
           (s3 - s2) * h * m1(i);
  }
};

std::vector<VectorXd> slopes(const Trajectory& traj) {
  if (traj.derivatives.size() == traj.size()) return traj.derivatives;
  const std::size_t n = traj.size();
  std::vector<VectorXd> m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? i : i + 1;
    m[i] = (traj.states[hi] - traj.states[lo]) / (traj.times[hi] - traj.times[lo]);
  }
  return m;
}

double closure_of(const VectorField& field, const MatrixXd& P, const VectorXd& y, double period,
                  const IntegratorConfig& cfg) {
  const VectorXd x = P * y;
  return (flow(field, x, period, cfg) - x).lpNorm<Eigen::Infinity>();
}

}  // namespace

Section default_section(Representation rep) {
  switch (rep) {
    case Representation::ShearCore: return {1, 0.0, 1};
    case Representation::Full:
    case Representation::Polar: return {2, 0.0, 1};
    default: return {0, 0.0, 1};
  }
}

Section fallback_section(Representation rep) {
  switch (rep) {
    case Representation::ShearCore: return {4, 0.0, 1};
    case Representation::Full:
    case Representation::Polar: return {6, 0.0, 1};
    case Representation::Hopf:
    case Representation::HopfCore: return {2, 0.0, 1};
    default: return {1, 0.0, 1};
  }
}

std::vector<Crossing> section_crossings(const Trajectory& traj, const Section& section) {
  std::vector<Crossing> out;
  if (traj.size() < 2) return out;
  const int idx = section.coordinate;
  if (idx < 0 || idx >= traj.states.front().size()) throw InvalidArgument("section coordinate out of range");
  const std::vector<VectorXd> m = slopes(traj);
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double g0 = traj.states[i](idx) - section.offset;
    const double g1 = traj.states[i + 1](idx) - section.offset;
    const bool up = g0 < 0.0 && g1 >= 0.0;
    const bool down = g0 > 0.0 && g1 <= 0.0;
    if (!((up && section.direction >= 0) || (down && section.direction <= 0))) continue;
    const Hermite hermite{traj.times[i], traj.times[i + 1] - traj.times[i], traj.states[i],
                          traj.states[i + 1], m[i], m[i + 1]};
    double lo = 0.0, hi = 1.0;
    double mid = 0.5;
    for (int it = 0; it < 200; ++it) {
      mid = 0.5 * (lo + hi);
      const double g = hermite.at(mid, idx) - section.offset;
      if (std::abs(g) <= 1e-13 && hi - lo < 1e-12) break;
      if ((g < 0.0) == (g0 < 0.0)) {
        lo = mid;
      } else {
        hi = mid;
      }
      if (hi - lo < 1e-16) break;
    }
    out.push_back({hermite.t0 + mid * hermite.h, hermite.at(mid)});
  }
  return out;
}

std::optional<double> estimate_period(const std::vector<Crossing>& crossings, int use) {
  if (crossings.size() < 2) return std::nullopt;
  const std::size_t n = std::min<std::size_t>(crossings.size(), static_cast<std::size_t>(use) + 1);
  const auto& last = crossings.back();
  const auto& first = crossings[crossings.size() - n];
  return (last.t - first.t) / static_cast<double>(n - 1);
}

PeriodicOrbit find_periodic_orbit(const VectorField& field, Representation rep, const VectorXd& guess,
                                  double period_guess, const ShootingOptions& opts) {
  if (!(period_guess > 0.0)) throw InvalidArgument("period guess must be positive");
  if (opts.samples < 8) throw InvalidArgument("orbits need at least 8 samples");
  if (guess.size() != field.dim) throw InvalidArgument("guess has the wrong dimension");
  const Section section = opts.section.value_or(default_section(rep));
  const int n = field.dim;
  const MatrixXd P = opts.subspace.size() ? opts.subspace : MatrixXd::Identity(n, n);
  if (P.rows() != n || P.cols() == 0) throw InvalidArgument("subspace basis has the wrong shape");
  const Eigen::Index m = P.cols();
  const IntegratorConfig& cfg = opts.integrator;

  VectorXd x = P * (P.transpose() * guess);
  if (std::abs(x(section.coordinate) - section.offset) > 1e-12 * (1.0 + x.lpNorm<Eigen::Infinity>())) {
    const Trajectory lead = integrate(field, x, 0.0, 2.5 * period_guess, cfg);
    const auto crossings = section_crossings(lead, section);
    if (crossings.empty()) {
      throw NumericalError(Failure::NotPeriodic, "not a periodic orbit: the guess never crosses the section");
    }
    x = P * (P.transpose() * crossings.front().state);
  }

  VectorXd y = P.transpose() * x;
  double period = period_guess;
  double closure = std::numeric_limits<double>::infinity();
  MatrixXd mono;
  bool converged = false;
  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    const FlowSensitivity fs = flow_with_sensitivity(field, P * y, period, cfg);
    const VectorXd r = fs.state - P * y;
    closure = r.lpNorm<Eigen::Infinity>();
    if (closure <= opts.tol) {
      mono = fs.jacobian;
      converged = true;
      break;
    }
    if (iter == opts.max_iter) break;
    MatrixXd J = MatrixXd::Zero(m + 1, m + 1);
    J.topLeftCorner(m, m) = P.transpose() * (fs.jacobian - MatrixXd::Identity(n, n)) * P;
    J.topRightCorner(m, 1) = P.transpose() * field(fs.state);
    J.bottomLeftCorner(1, m) = P.row(section.coordinate);
    VectorXd b(m + 1);
    b.head(m) = -(P.transpose() * r);
    b(m) = -((P * y)(section.coordinate) - section.offset);
    const VectorXd step = J.completeOrthogonalDecomposition().solve(b);

    double scale = 1.0;
    VectorXd y_next = y + step.head(m);
    double t_next = period + step(m);
    for (int h = 0; h < 10; ++h) {
      if (t_next > 0.0 && closure_of(field, P, y_next, t_next, cfg) < closure) break;
      scale *= 0.5;
      y_next = y + scale * step.head(m);
      t_next = period + scale * step(m);
    }
    if (!(t_next > 0.0) || !y_next.allFinite()) break;
    y = std::move(y_next);
    period = t_next;
  }
  if (!converged) {
    throw NumericalError(Failure::NotConverged, "shooting did not converge", closure);
  }

  PeriodicOrbit orbit;
  orbit.rep = rep;
  orbit.period = period;
  orbit.residual = closure;
  std::vector<double> times(static_cast<std::size_t>(opts.samples));
  for (Eigen::Index j = 0; j < opts.samples; ++j) {
    times[static_cast<std::size_t>(j)] = period * static_cast<double>(j) / static_cast<double>(opts.samples);
  }
  const Trajectory sampled = integrate(field, P * y, 0.0, period, cfg, times);
  orbit.samples.resize(n, opts.samples);
  for (Eigen::Index j = 0; j < opts.samples; ++j) orbit.samples.col(j) = sampled.states[static_cast<std::size_t>(j)];
  const double extent = (orbit.samples.rowwise().maxCoeff() - orbit.samples.rowwise().minCoeff()).maxCoeff();
  if (extent < opts.min_amplitude) {
    throw NumericalError(Failure::NotPeriodic, "not a periodic orbit: converged to an equilibrium");
  }
  orbit.floquet_multipliers = eigenvalues(mono);
  return orbit;
}

PeriodicOrbit find_periodic_orbit(Representation model, const Parameters& params, const VectorXd& guess,
                                  double period_guess, const ShootingOptions& opts) {
  check_compatible(model, params);
  const Representation core = core_of(model);
  return find_periodic_orbit(make_field(core, params), core, reduce(model, guess), period_guess, opts);
}

MatrixXd monodromy(const VectorField& field, const VectorXd& x0, double period, const IntegratorConfig& cfg) {
  return flow_with_sensitivity(field, x0, period, cfg).jacobian;
}

ComplexList floquet_multipliers(const PeriodicOrbit& orbit, const Parameters& params, const MatrixXd& subspace) {
  if (orbit.size() == 0 || !(orbit.period > 0.0)) throw InvalidArgument("orbit is not refined");
  const MatrixXd M = monodromy(make_field(orbit.rep, params), orbit.samples.col(0), orbit.period);
  if (subspace.size() == 0) return eigenvalues(M);
  if (subspace.rows() != M.rows()) throw InvalidArgument("subspace basis has the wrong shape");
  return eigenvalues(subspace.transpose() * M * subspace);
}

ComplexList nontrivial_multipliers(const ComplexList& multipliers) {
  ComplexList out = multipliers;
  if (out.empty()) return out;
  const auto trivial = std::min_element(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    return std::abs(a - 1.0) < std::abs(b - 1.0);
  });
  out.erase(trivial);
  return out;
}

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
  }
  return "marginal";
}

Stability orbit_stability(const ComplexList& multipliers, double tol) {
  const ComplexList rest = nontrivial_multipliers(multipliers);
  bool all_inside = true;
  for (const Complex& z : rest) {
    if (std::abs(z) > 1.0 + tol) return Stability::Unstable;
    if (!(std::abs(z) < 1.0 - tol)) all_inside = false;
  }
  return all_inside ? Stability::Stable : Stability::Marginal;
}

MatrixXd fixed_subspace(Representation rep, Dihedral d) {
  const int n = dimension(rep);
  MatrixXd A(n, n);
  for (int i = 0; i < n; ++i) A.col(i) = act_tangent(d, rep, VectorXd::Unit(n, i));
  const Eigen::FullPivLU<MatrixXd> lu(A - MatrixXd::Identity(n, n));
  if (lu.rank() == n) return MatrixXd(n, 0);
  const MatrixXd kernel = lu.kernel();
  const Eigen::HouseholderQR<MatrixXd> qr(kernel);
  return qr.householderQ() * MatrixXd::Identity(n, kernel.cols());
}

PeriodicOrbit orbit_from_transient(Representation model, const Parameters& params, const VectorXd& initial,
                                   const HuntOptions& opts) {
  check_compatible(model, params);
  const Representation core = core_of(model);
  const VectorField field = make_field(core, params);
  VectorXd x = reduce(model, initial);
  if (opts.shooting.subspace.size()) x = opts.shooting.subspace * (opts.shooting.subspace.transpose() * x);
  x = flow(field, x, opts.transient, opts.integrator);
  const Trajectory window = integrate(field, x, 0.0, opts.window, opts.integrator);

  Section section = opts.shooting.section.value_or(default_section(core));
  if (!opts.shooting.section) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : window.states) {
      lo = std::min(lo, s(section.coordinate));
      hi = std::max(hi, s(section.coordinate));
    }
    if (hi - lo < 1e-10) section = fallback_section(core);
  }
  const auto crossings = section_crossings(window, section);
  const auto period = estimate_period(crossings);
  if (!period) throw NumericalError(Failure::NotPeriodic, "no oscillation found after the transient");
  ShootingOptions shooting = opts.shooting;
  shooting.section = section;
  return find_periodic_orbit(field, core, crossings.back().state, *period, shooting);
}

}  // namespace sqconv
