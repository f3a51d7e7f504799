#include "sqconv/classify.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "sqconv/integrate.hpp"

namespace sqconv {

namespace {

using Sym = SpatioTemporalSymmetry;

Sym sym(Dihedral d, int quarters = 0) { return {GroupElement(d), TemporalShift(quarters, 4)}; }

Sym conjugate(Dihedral c, const Sym& s) {
  return {GroupElement(compose(compose(c, s.spatial.dihedral), inverse(c))), s.temporal};
}

bool contains(const std::vector<Sym>& set, const Sym& s) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

bool same_set(const std::vector<Sym>& a, const std::vector<Sym>& b) {
  if (a.size() != b.size()) return false;
  return std::all_of(a.begin(), a.end(), [&](const Sym& s) { return contains(b, s); });
}

// Drops elements until the set is closed under composition; the identity stays.
std::vector<Sym> close_group(std::vector<Sym> elements) {
  const Sym id = sym(Dihedral::e);
  if (!contains(elements, id)) elements.insert(elements.begin(), id);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < elements.size() && !changed; ++i) {
      for (std::size_t j = 0; j < elements.size() && !changed; ++j) {
        if (!contains(elements, compose(elements[i], elements[j]))) {
          const std::size_t drop = elements[i] == id ? j : i;
          elements.erase(elements.begin() + static_cast<std::ptrdiff_t>(drop));
          changed = true;
        }
      }
    }
  }
  return elements;
}

std::vector<Sym> canonical_generators(BranchLabel label) {
  switch (label) {
    case BranchLabel::TSq: return {sym(Dihedral::my)};
    case BranchLabel::DTSq: return {sym(Dihedral::md)};
    case BranchLabel::PSq: return {sym(Dihedral::my), sym(Dihedral::mx, 2)};
    case BranchLabel::DPSq: return {sym(Dihedral::md), sym(Dihedral::mdp, 2)};
    case BranchLabel::APW: return {sym(Dihedral::rq, 1)};
    case BranchLabel::Squares: return {sym(Dihedral::rq), sym(Dihedral::mx)};
    default: return {};
  }
}

// First conjugator c with c G c^-1 == detected.
std::optional<Dihedral> match_conjugate(const std::vector<Sym>& detected, BranchLabel label) {
  const auto group = canonical_group(label);
  if (group.empty()) return std::nullopt;
  for (Dihedral c : kDihedral) {
    std::vector<Sym> conj;
    for (const Sym& s : group) conj.push_back(conjugate(c, s));
    if (same_set(conj, detected)) return c;
  }
  return std::nullopt;
}

void label_as(SolutionLabel& out, BranchLabel label, Dihedral c) {
  out.label = label;
  out.conjugator = c;
  out.generators.clear();
  for (const Sym& g : canonical_generators(label)) out.generators.push_back(conjugate(c, g));
}

PeriodicOrbit core_orbit(const PeriodicOrbit& orbit) {
  if (is_core(orbit.rep)) return orbit;
  PeriodicOrbit out = orbit;
  out.rep = core_of(orbit.rep);
  out.samples.resize(dimension(out.rep), orbit.size());
  for (Eigen::Index j = 0; j < orbit.size(); ++j)
    out.samples.col(j) = reduce(orbit.rep, orbit.samples.col(j));
  return out;
}

double diameter(const MatrixXd& samples) {
  return (samples.rowwise().maxCoeff() - samples.rowwise().minCoeff()).maxCoeff();
}

bool radius_layout(Representation core) {
  return core == Representation::AmplitudeCore || core == Representation::ShearCore;
}

}  // namespace

std::vector<SpatioTemporalSymmetry> canonical_group(BranchLabel label) {
  const auto gens = canonical_generators(label);
  if (gens.empty()) return {};
  std::vector<Sym> group{sym(Dihedral::e)};
  bool grew = true;
  while (grew) {
    grew = false;
    const auto current = group;
    for (const Sym& a : current) {
      for (const Sym& g : gens) {
        const Sym p = compose(a, g);
        if (!contains(group, p)) {
          group.push_back(p);
          grew = true;
        }
      }
    }
  }
  return group;
}

SolutionLabel classify_equilibrium(Representation rep, const VectorXd& state, const Parameters& params,
                                   double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("classification tolerance must be positive");
  check_compatible(rep, params);
  const Representation core_rep = core_of(rep);
  const VectorXd core = reduce(rep, state);
  SolutionLabel out;
  out.residual = rhs(core_rep, core, params).lpNorm<Eigen::Infinity>();
  if (!(out.residual <= kEquilibriumResidual))
    throw InvalidArgument("state is not an equilibrium (residual " + std::to_string(out.residual) + ")");

  const double scale = 1.0 + core.lpNorm<Eigen::Infinity>();
  if (core.lpNorm<Eigen::Infinity>() <= tol) {
    out.label = BranchLabel::Trivial;
    for (Dihedral d : kDihedral) out.isotropy.push_back(sym(d));
    return out;
  }

  for (Dihedral d : isotropy_of_state(core_rep, core, tol)) out.isotropy.push_back(sym(d));

  if (radius_layout(core_rep)) {
    const Eigen::Index half = core.size() / 2;
    const double rx = core(0), ry = core(half);
    const double shear =
        half > 1 ? std::max(core.segment(1, half - 1).lpNorm<Eigen::Infinity>(),
                            core.segment(half + 1, half - 1).lpNorm<Eigen::Infinity>())
                 : 0.0;
    const bool x_zero = std::abs(rx) <= tol * scale, y_zero = std::abs(ry) <= tol * scale;
    if ((x_zero != y_zero) && shear <= tol * scale) {
      out.label = BranchLabel::Rolls;
      return out;
    }
  }

  if (out.isotropy.size() == 8) {
    label_as(out, BranchLabel::Squares, Dihedral::e);
    return out;
  }
  for (BranchLabel l : {BranchLabel::TSq, BranchLabel::DTSq}) {
    if (auto c = match_conjugate(out.isotropy, l)) {
      label_as(out, l, *c);
      return out;
    }
  }
  return out;
}

double symmetry_defect(const PeriodicOrbit& orbit, const SpatioTemporalSymmetry& g) {
  const PeriodicOrbit core = core_orbit(orbit);
  const double diam = diameter(core.samples);
  if (!(diam >= 1e-10)) throw InvalidArgument("degenerate orbit (diameter below 1e-10)");
  const PeriodicOrbit image = act_on_orbit(g, core);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < core.size(); ++j)
    worst = std::max(worst, state_distance(core.rep, image.samples.col(j), core.samples.col(j)));
  return worst / diam;
}

SolutionLabel classify_orbit(const PeriodicOrbit& orbit, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("classification tolerance must be positive");
  if (orbit.size() < 8 || !(orbit.period > 0.0)) throw InvalidArgument("orbit is not refined");
  const PeriodicOrbit core = core_orbit(orbit);
  const double diam = diameter(core.samples);
  if (!(diam >= 1e-10)) throw InvalidArgument("degenerate orbit (diameter below 1e-10)");

  std::vector<Sym> found;
  std::vector<double> defects;
  for (Dihedral d : kDihedral) {
    for (int q = 0; q < 4; ++q) {
      const Sym s = sym(d, q);
      const double defect = symmetry_defect(core, s);
      if (defect <= tol) {
        found.push_back(s);
        defects.push_back(defect);
      }
    }
  }

  SolutionLabel out;
  out.isotropy = close_group(found);
  for (std::size_t i = 0; i < found.size(); ++i)
    if (contains(out.isotropy, found[i])) out.residual = std::max(out.residual, defects[i]);

  for (BranchLabel l : {BranchLabel::PSq, BranchLabel::DPSq, BranchLabel::APW}) {
    if (auto c = match_conjugate(out.isotropy, l)) {
      label_as(out, l, *c);
      if (l == BranchLabel::APW) out.circulation = contains(out.isotropy, sym(Dihedral::rq, 1)) ? 1 : -1;
      return out;
    }
  }
  out.label = out.isotropy.size() > 1 && out.isotropy.size() < 4 ? BranchLabel::CrossRollLike
                                                                  : BranchLabel::Unknown;
  return out;
}

DriftProfile drift_profile(Representation rep, const VectorXd& equilibrium, const Parameters& params) {
  DriftProfile out;
  out.rate = drift_rate(rep, equilibrium, params);
  return out;
}

DriftProfile drift_profile(const PeriodicOrbit& orbit, const Parameters& params) {
  const PeriodicOrbit core = core_orbit(orbit);
  if (core.size() < 1 || !(core.period > 0.0)) throw InvalidArgument("orbit is not refined");
  const Representation rep = core.rep;
  const Eigen::Index n = core.size(), dim = core.samples.rows();
  const VectorField base = make_field(rep, params);

  // Core state plus the two phases, which are slaved to it.
  VectorField augmented;
  augmented.dim = static_cast<int>(dim) + 2;
  augmented.f = [&](const VectorXd& y) {
    VectorXd dy(dim + 2);
    dy.head(dim) = base.f(y.head(dim));
    dy.tail(2) = drift_rate(rep, y.head(dim), params);
    return dy;
  };

  std::vector<double> times(static_cast<std::size_t>(n) + 1);
  for (Eigen::Index j = 0; j <= n; ++j)
    times[static_cast<std::size_t>(j)] = core.period * static_cast<double>(j) / static_cast<double>(n);
  VectorXd y0 = VectorXd::Zero(dim + 2);
  y0.head(dim) = core.samples.col(0);
  const Trajectory traj = integrate(augmented, y0, 0.0, core.period, IntegratorConfig::tight(), times);

  DriftProfile out;
  out.phases.resize(2, n + 1);
  for (Eigen::Index j = 0; j <= n; ++j) out.phases.col(j) = traj.states[static_cast<std::size_t>(j)].tail(2);
  out.net = out.phases.col(n);
  out.rate = out.net / core.period;
  out.peak_excursion = out.phases.cwiseAbs().rowwise().maxCoeff();
  if (n % 4 == 0) out.quarters = quarter_drifts(out, 0);
  return out;
}

std::array<Eigen::Vector2d, 4> quarter_drifts(const DriftProfile& profile, Eigen::Index start) {
  const Eigen::Index n = profile.phases.cols() - 1;
  if (n < 4 || n % 4 != 0) throw InvalidArgument("quarter drifts need a sample count divisible by 4");
  // phi at sample index i >= 0, continued past one period using the net drift.
  auto phase = [&](Eigen::Index i) -> Eigen::Vector2d {
    return profile.phases.col(i % n) + static_cast<double>(i / n) * profile.net;
  };
  std::array<Eigen::Vector2d, 4> q;
  const Eigen::Index s = ((start % n) + n) % n;
  for (int k = 0; k < 4; ++k) q[static_cast<std::size_t>(k)] = phase(s + (k + 1) * n / 4) - phase(s + k * n / 4);
  return q;
}

DriftCycle cyclic_drift_pattern(const DriftProfile& profile, double tol) {
  const Eigen::Index n = profile.phases.cols() - 1;
  DriftCycle out;
  double best = -1.0;
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto q = quarter_drifts(profile, s);
    const double score = std::abs(q[0].x()) - std::abs(q[0].y());
    if (score > best) {
      best = score;
      out.start = s;
      out.quarters = q;
    }
  }
  auto& q = out.quarters;
  const double size = q[0].norm();
  if (!(size > 0.0)) return out;

  // Reflect onto the (+x, +y, ...) representative.
  if (q[0].x() < 0.0) for (auto& v : q) v.x() = -v.x();
  if (q[1].y() < 0.0) for (auto& v : q) v.y() = -v.y();
  // Every quarter turns the previous one by +90 degrees.
  bool ok = true;
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector2d& a = q[static_cast<std::size_t>(k)];
    const Eigen::Vector2d& b = q[static_cast<std::size_t>((k + 1) % 4)];
    ok = ok && (b - Eigen::Vector2d(-a.y(), a.x())).lpNorm<Eigen::Infinity>() <= tol * size;
  }
  const bool x_dominant = std::abs(q[0].x()) > std::abs(q[0].y());
  out.alternating = ok && x_dominant;
  // Circulation reported in the original frame.
  const auto o = quarter_drifts(profile, out.start);
  const double c = o[0].x() * o[1].y() - o[0].y() * o[1].x();
  out.circulation = c > 0.0 ? 1 : (c < 0.0 ? -1 : 0);
  return out;
}

}  // namespace sqconv
