#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sqconv/classify.hpp"
#include "sqconv/models.hpp"
#include "sqconv/orbit.hpp"

using namespace sqconv;

namespace {

constexpr double kPi = std::numbers::pi;
using Sym = SpatioTemporalSymmetry;

Sym sym(Dihedral d, int quarters = 0) { return {GroupElement(d), TemporalShift(quarters, 4)}; }

bool contains(const std::vector<Sym>& set, const Sym& s) {
  for (const Sym& x : set)
    if (x == s) return true;
  return false;
}

// r_x, r_y with half the period; x-shear antiperiodic; no y-shear.
PeriodicOrbit synthetic_psq(Eigen::Index n = 64) {
  PeriodicOrbit o;
  o.period = 2 * kPi;
  o.samples.resize(6, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double t = o.period * static_cast<double>(j) / static_cast<double>(n);
    o.samples.col(j) << 1 + 0.1 * std::cos(2 * t), 0.3 * std::sin(t), 0.2 * std::cos(t), 1 - 0.1 * std::cos(2 * t), 0, 0;
  }
  return o;
}

PeriodicOrbit hunt(Dihedral fixed, const VectorXd& kick) {
  ModelParams p;
  HuntOptions opts;
  if (fixed != Dihedral::e) opts.shooting.subspace = fixed_subspace(Representation::ShearCore, fixed);
  return orbit_from_transient(Representation::ShearCore, p, squares_core(p) + kick, opts);
}

const PeriodicOrbit& apw() {
  static const PeriodicOrbit o = hunt(Dihedral::e, (VectorXd(6) << 0.03, 0.08, -0.05, 0.02, -0.04, 0.06).finished());
  return o;
}
const PeriodicOrbit& psq() {
  static const PeriodicOrbit o = hunt(Dihedral::my, (VectorXd(6) << 0.03, 0.08, -0.05, 0.02, 0, 0).finished());
  return o;
}
const PeriodicOrbit& dpsq() {
  static const PeriodicOrbit o = hunt(Dihedral::md, (VectorXd(6) << 0.03, 0.08, -0.05, 0.03, 0.08, -0.05).finished());
  return o;
}

}  // namespace

TEST(EquilibriumLabels, PrimaryStates) {
  ModelParams p;
  p.mu = 0.8;
  EXPECT_EQ(classify_equilibrium(Representation::ShearCore, squares_core(p), p).label, BranchLabel::Squares);
  EXPECT_EQ(classify_equilibrium(Representation::ShearCore, VectorXd::Zero(6), p).label, BranchLabel::Trivial);
  const VectorXd rolls = (VectorXd(6) << std::sqrt(p.mu), 0, 0, 0, 0, 0).finished();
  EXPECT_EQ(classify_equilibrium(Representation::ShearCore, rolls, p).label, BranchLabel::Rolls);
  EXPECT_EQ(classify_equilibrium(Representation::Amplitude, Eigen::Vector4d(0, 0, 0, std::sqrt(p.mu)), p).label,
            BranchLabel::Rolls);
}

TEST(EquilibriumLabels, TravellingSquares) {
  ModelParams p;
  p.mu = 1.2;
  const SolutionLabel t = classify_equilibrium(Representation::ShearCore, tsq_branch(p).core, p);
  EXPECT_EQ(t.label, BranchLabel::TSq);
  ASSERT_EQ(t.generators.size(), 1u);
  EXPECT_EQ(t.generators[0], sym(Dihedral::my));
  EXPECT_EQ(t.isotropy.size(), 2u);
  EXPECT_LE(t.residual, 1e-12);
  EXPECT_EQ(classify_equilibrium(Representation::ShearCore, dtsq_branch(p).core, p).label, BranchLabel::DTSq);
}

TEST(EquilibriumLabels, RejectsNonEquilibria) {
  ModelParams p;
  EXPECT_THROW(classify_equilibrium(Representation::ShearCore, (VectorXd(6) << 1, 0.1, 0, 1, 0, 0).finished(), p),
               InvalidArgument);
  EXPECT_THROW(classify_equilibrium(Representation::ShearCore, squares_core(p), p, 0.0), InvalidArgument);
}

TEST(EquilibriumLabels, EquivariantUnderTheGroup) {
  ModelParams p;
  p.mu = 1.2;
  for (const VectorXd& s : {tsq_branch(p).core, dtsq_branch(p).core}) {
    const SolutionLabel base = classify_equilibrium(Representation::ShearCore, s, p);
    for (Dihedral g : kDihedral) {
      const VectorXd gs = act(g, Representation::ShearCore, s);
      const SolutionLabel l = classify_equilibrium(Representation::ShearCore, gs, p);
      EXPECT_EQ(l.label, base.label) << to_string(g);
      for (const Sym& gen : l.generators) {
        EXPECT_LE((act(gen.spatial, Representation::ShearCore, gs) - gs).lpNorm<Eigen::Infinity>(), 1e-12);
      }
    }
  }
}

TEST(OrbitLabels, SyntheticPulsatingSquares) {
  const PeriodicOrbit o = synthetic_psq();
  const SolutionLabel l = classify_orbit(o);
  EXPECT_EQ(l.label, BranchLabel::PSq);
  EXPECT_EQ(l.isotropy.size(), 4u);
  EXPECT_TRUE(contains(l.isotropy, sym(Dihedral::my)));
  EXPECT_TRUE(contains(l.isotropy, sym(Dihedral::mx, 2)));
  EXPECT_TRUE(contains(l.isotropy, sym(Dihedral::rq2, 2)));
  EXPECT_LE(symmetry_defect(o, sym(Dihedral::mx, 2)), 1e-14);
  EXPECT_GT(symmetry_defect(o, sym(Dihedral::mx)), 0.1);
}

TEST(OrbitLabels, ConstantOrbitIsDegenerate) {
  PeriodicOrbit o;
  o.period = 1.0;
  o.samples = MatrixXd::Ones(6, 16);
  EXPECT_THROW(classify_orbit(o), InvalidArgument);
  EXPECT_THROW(symmetry_defect(o, sym(Dihedral::mx)), InvalidArgument);
}

TEST(OrbitLabels, RefinedOrbits) {
  const SolutionLabel a = classify_orbit(apw());
  EXPECT_EQ(a.label, BranchLabel::APW);
  EXPECT_EQ(std::abs(a.circulation), 1);
  EXPECT_EQ(classify_orbit(psq()).label, BranchLabel::PSq);
  EXPECT_EQ(classify_orbit(dpsq()).label, BranchLabel::DPSq);
}

TEST(OrbitLabels, ReflectionReversesCirculation) {
  const SolutionLabel a = classify_orbit(apw());
  const SolutionLabel r = classify_orbit(act_on_orbit(sym(Dihedral::mx), apw()));
  EXPECT_EQ(r.label, BranchLabel::APW);
  EXPECT_EQ(r.circulation, -a.circulation);
  const SolutionLabel q = classify_orbit(act_on_orbit(sym(Dihedral::rq), apw()));
  EXPECT_EQ(q.circulation, a.circulation);
}

TEST(OrbitLabels, EquivariantUnderTheGroup) {
  for (const PeriodicOrbit* o : {&apw(), &psq(), &dpsq()}) {
    const BranchLabel base = classify_orbit(*o).label;
    for (Dihedral g : kDihedral) {
      for (int shift = 0; shift < 4; ++shift) {
        EXPECT_EQ(classify_orbit(act_on_orbit(sym(g, shift), *o)).label, base) << to_string(g);
      }
    }
  }
}

TEST(OrbitLabels, StableAcrossTolerances) {
  for (const PeriodicOrbit* o : {&apw(), &psq(), &dpsq(), static_cast<const PeriodicOrbit*>(nullptr)}) {
    const PeriodicOrbit orbit = o ? *o : synthetic_psq();
    const SolutionLabel ref = classify_orbit(orbit, 1e-6);
    for (double tol : {1e-7, 3e-7, 3e-6, 1e-5}) {
      const SolutionLabel l = classify_orbit(orbit, tol);
      EXPECT_EQ(l.label, ref.label) << tol;
      EXPECT_EQ(l.isotropy.size(), ref.isotropy.size()) << tol;
    }
  }
}

TEST(OrbitLabels, DetectedElementsFormAGroup) {
  for (const PeriodicOrbit* o : {&apw(), &psq(), &dpsq()}) {
    const SolutionLabel l = classify_orbit(*o);
    EXPECT_TRUE(contains(l.isotropy, sym(Dihedral::e)));
    for (const Sym& a : l.isotropy) {
      EXPECT_LE(symmetry_defect(*o, a), 1e-6);
      for (const Sym& b : l.isotropy) EXPECT_TRUE(contains(l.isotropy, compose(a, b)));
    }
  }
}

TEST(OrbitLabels, CanonicalGroups) {
  EXPECT_EQ(canonical_group(BranchLabel::PSq).size(), 4u);
  EXPECT_EQ(canonical_group(BranchLabel::DPSq).size(), 4u);
  const auto apw_group = canonical_group(BranchLabel::APW);
  ASSERT_EQ(apw_group.size(), 4u);
  EXPECT_TRUE(contains(apw_group, sym(Dihedral::rq, 1)));
  EXPECT_TRUE(contains(apw_group, sym(Dihedral::rq2, 2)));
  EXPECT_TRUE(canonical_group(BranchLabel::Unknown).empty());
}

TEST(Drift, TravellingSquaresRate) {
  ModelParams p;
  p.mu = 1.2;
  const DriftProfile d = drift_profile(Representation::ShearCore, tsq_branch(p).core, p);
  EXPECT_NEAR(d.rate.x(), std::sqrt(0.3), 1e-12);
  EXPECT_EQ(d.rate.y(), 0.0);
  EXPECT_EQ(drift_profile(Representation::ShearCore, squares_core(p), p).rate.norm(), 0.0);
}

TEST(Drift, QuarterDriftsSumToTheNetDrift) {
  ModelParams p;
  for (const PeriodicOrbit* o : {&apw(), &psq(), &dpsq()}) {
    const DriftProfile d = drift_profile(*o, p);
    for (Eigen::Index start : {Eigen::Index(0), o->size() / 8, o->size() / 3}) {
      const auto q = quarter_drifts(d, start);
      EXPECT_LE((q[0] + q[1] + q[2] + q[3] - d.net).norm(), 1e-12);
    }
    EXPECT_LE(d.net.norm(), 1e-8);
  }
}

TEST(Drift, AlternatingCycle) {
  ModelParams p;
  const DriftProfile d = drift_profile(apw(), p);
  const DriftCycle c = cyclic_drift_pattern(d);
  EXPECT_TRUE(c.alternating);
  EXPECT_EQ(c.circulation, classify_orbit(apw()).circulation);
  EXPECT_GT(c.quarters[0].x(), 1.0);
  // Quarters are reported on the +x/+y representative: each is the previous
  // one turned counter-clockwise by a quarter turn.
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d turned(-c.quarters[i].y(), c.quarters[i].x());
    EXPECT_LE((c.quarters[i + 1] - turned).norm(), 1e-6);
  }
  EXPECT_FALSE(cyclic_drift_pattern(drift_profile(psq(), p)).alternating);
}
