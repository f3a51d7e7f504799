#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sqconv/equilibrium.hpp"
#include "sqconv/integrate.hpp"
#include "sqconv/linalg.hpp"
#include "sqconv/models.hpp"
#include "sqconv/orbit.hpp"

using namespace sqconv;

namespace {

constexpr double kPi = std::numbers::pi;

VectorField linear_field(const MatrixXd& A) {
  return {static_cast<int>(A.rows()), [A](const VectorXd& x) -> VectorXd { return A * x; },
          [A](const VectorXd&) -> MatrixXd { return A; }};
}

double inf(const VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); }

// Stable alternating orbit of the shear core at the default parameters.
const PeriodicOrbit& apw_orbit() {
  static const PeriodicOrbit orbit = [] {
    ModelParams p;
    VectorXd x0 = squares_core(p);
    x0 += (VectorXd(6) << 0.03, 0.08, -0.05, 0.02, -0.04, 0.06).finished();
    return orbit_from_transient(Representation::ShearCore, p, x0);
  }();
  return orbit;
}

}  // namespace

TEST(Integrate, ExponentialDecay) {
  const VectorField f = linear_field(MatrixXd::Constant(1, 1, -1.0));
  const VectorXd x = flow(f, VectorXd::Ones(1), 1.0);
  EXPECT_NEAR(x(0), std::exp(-1.0), 1e-8);

  IntegratorConfig rk;
  rk.method = Method::RK4;
  rk.initial_step = 1e-3;
  EXPECT_NEAR(flow(f, VectorXd::Ones(1), 1.0, rk)(0), std::exp(-1.0), 1e-12);
}

TEST(Integrate, HarmonicOscillatorOverManyPeriods) {
  MatrixXd A(2, 2);
  A << 0, -1, 1, 0;
  const VectorXd x = flow(linear_field(A), Eigen::Vector2d(1, 0), 20 * kPi);
  EXPECT_LE(inf(x - Eigen::Vector2d(1, 0)), 1e-6);
}

TEST(Integrate, TighterToleranceIsMoreAccurate) {
  const VectorField f = linear_field(MatrixXd::Constant(1, 1, -1.0));
  double prev = 1.0;
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    IntegratorConfig c;
    c.abs_tol = tol;
    c.rel_tol = tol;
    const double err = std::abs(flow(f, VectorXd::Ones(1), 5.0, c)(0) - std::exp(-5.0));
    EXPECT_LT(err, prev);
    prev = err;
  }
}

TEST(Integrate, OutputTimesAreHitExactly) {
  ModelParams p;
  const double r = std::sqrt(2.0);
  const VectorXd sq = ModeState{r, 0, 0, r, 0, 0}.pack();
  const std::vector<double> times{0.0, 0.5, 1.0, 2.5};
  const Trajectory traj = integrate(Representation::Full, p, sq, 0.0, 2.5, {}, times);
  ASSERT_EQ(traj.size(), times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_EQ(traj.times[i], times[i]);
    EXPECT_LE(inf(traj.states[i] - sq), 1e-14);  // squares are invariant
  }
}

TEST(Integrate, AgreesWithFixedStepReference) {
  ModelParams p{1.1, -1.3, 0.8, 1.2, 0.3, 0.7, 1.0};
  Rng rng(5);
  for (int i = 0; i < 5; ++i) {
    const VectorXd x0 = 0.5 * random_state(Representation::Full, rng);
    const VectorXd ours = flow(make_field(Representation::Full, p), x0, 2.0, IntegratorConfig::tight());
    const VectorXd ref = oracle::rk4([&](const VectorXd& x) { return rhs(Representation::Full, x, p); }, x0, 2.0, 4000);
    EXPECT_LE(inf(ours - ref), 1e-9);
  }
}

TEST(Integrate, RejectsBadInput) {
  const VectorField f = linear_field(MatrixXd::Identity(2, 2));
  EXPECT_THROW(integrate(f, VectorXd::Ones(3), 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(integrate(f, VectorXd::Ones(2), 1.0, 0.0), InvalidArgument);
  IntegratorConfig c;
  c.max_steps = 3;
  EXPECT_THROW(integrate(f, VectorXd::Ones(2), 0.0, 10.0, c), NumericalError);
}

TEST(Newton, ConvergesOnSquares) {
  ModelParams p;
  p.mu = 0.8;
  const auto eq = find_equilibrium(Representation::Full, ModeState{1.0, 0.01, 0, 0.9, -0.01, 0}.pack(), p);
  ASSERT_TRUE(eq.converged);
  EXPECT_LE(eq.residual_norm, 1e-12);
  EXPECT_NEAR(eq.core(0), std::sqrt(1.6), 1e-12);
  EXPECT_NEAR(eq.core(3), std::sqrt(1.6), 1e-12);
  EXPECT_EQ(eq.eigenvalues.size(), 6u);
  EXPECT_EQ(count_unstable(eq.eigenvalues, 1e-13), 4);  // past the oscillatory instability, doubled pair

  p.mu = 0.5;
  const auto below = find_equilibrium(Representation::ShearCore, squares_core(p) * 1.05, p);
  ASSERT_TRUE(below.converged);
  EXPECT_EQ(count_unstable(below.eigenvalues, 1e-13), 0);
}

TEST(Newton, PerturbedSeedsReturnToTheBranch) {
  ModelParams p;
  p.mu = 1.2;
  const VectorXd branches[] = {squares_core(p), tsq_branch(p).core, dtsq_branch(p).core,
                               (VectorXd(6) << std::sqrt(p.mu), 0, 0, 0, 0, 0).finished()};
  Rng rng(11);
  for (const VectorXd& target : branches) {
    for (int i = 0; i < 20; ++i) {
      VectorXd guess = target;
      for (Eigen::Index j = 0; j < guess.size(); ++j) guess(j) += uniform(rng, -0.01, 0.01);
      if (target(3) == 0.0) guess(3) = 0.0;  // rolls: stay in the invariant plane
      const auto eq = find_equilibrium(Representation::ShearCore, guess, p);
      ASSERT_TRUE(eq.converged);
      EXPECT_LE(eq.residual_norm, 1e-12);
      EXPECT_LE(inf(eq.core - target), 1e-10);
    }
  }
}

TEST(Newton, ReportsFailure) {
  // x^2 + 1 has no real root.
  const VectorField f{1, [](const VectorXd& x) -> VectorXd { return (x.array().square() + 1.0).matrix(); },
                      [](const VectorXd& x) -> MatrixXd { return 2.0 * x.asDiagonal(); }};
  const auto r = newton_solve(f, VectorXd::Constant(1, 0.3));
  EXPECT_NE(r.status, SolveStatus::Converged);
}

TEST(Eigenvalues, Examples) {
  MatrixXd A(3, 3);
  A << 2, 0, 0, 0, 0, -3, 0, 3, 0;
  const ComplexList e = eigenvalues(A);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_NEAR(std::abs(e[0] - Complex(2, 0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(e[1] - Complex(0, 3)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(e[2] - Complex(0, -3)), 0.0, 1e-14);
  EXPECT_EQ(count_unstable(e), 1);
  EXPECT_LE(eigenpair_residual(A), 1e-14);
}

TEST(Eigenvalues, InvariantUnderPermutationSimilarity) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    MatrixXd A(6, 6);
    for (Eigen::Index j = 0; j < A.size(); ++j) A(j) = uniform(rng, -1, 1);
    Eigen::PermutationMatrix<Eigen::Dynamic> P(6);
    P.setIdentity();
    std::shuffle(P.indices().data(), P.indices().data() + 6, rng);
    const MatrixXd B = P * A * P.transpose();
    const ComplexList a = eigenvalues(A), b = eigenvalues(B);
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_LE(std::abs(a[j] - b[j]), 1e-12);
    EXPECT_LE(eigenpair_residual(A), 1e-12);
  }
}

TEST(Sections, SineCrossings) {
  Trajectory traj;
  traj.rep = Representation::AmplitudeCore;
  for (int i = 0; i <= 2000; ++i) {
    const double t = 0.01 * i;
    traj.times.push_back(t);
    traj.states.push_back(Eigen::Vector2d(std::sin(t), 0));
    traj.derivatives.push_back(Eigen::Vector2d(std::cos(t), 0));
  }
  const auto up = section_crossings(traj, Section{0, 0.0, 1});
  ASSERT_EQ(up.size(), 3u);  // 2 pi, 4 pi, 6 pi (t = 0 is a start, not a crossing)
  for (std::size_t i = 0; i < up.size(); ++i) EXPECT_NEAR(up[i].t, 2 * kPi * (i + 1), 1e-8);
  const auto down = section_crossings(traj, Section{0, 0.0, -1});
  ASSERT_EQ(down.size(), 3u);
  EXPECT_NEAR(down[0].t, kPi, 1e-8);
  EXPECT_NEAR(*estimate_period(up), 2 * kPi, 1e-8);

  Trajectory flat = traj;
  for (auto& s : flat.states) s.setConstant(0.5);
  EXPECT_TRUE(section_crossings(flat, Section{0, 0.0, 0}).empty());
  EXPECT_FALSE(estimate_period({}).has_value());
}

TEST(Shooting, HopfPulsatingSquares) {
  HopfParams p;
  p.lambda = 0.1;
  p.A = {-1.0, 0.2};
  p.B = {-1.0, 0.3};
  // |v|^2 = -lambda / Re(A + B); frequency omega + Im(A + B) |v|^2.
  const double amp2 = 0.05, omega = 1.0 + 0.5 * amp2;
  const PeriodicOrbit orbit =
      find_periodic_orbit(Representation::Hopf, p, (VectorXd(6) << 0.1, 0.2, 0, 0, 0, 0).finished(), 6.0);
  EXPECT_NEAR(orbit.period, 2 * kPi / omega, 1e-8);
  for (Eigen::Index j = 0; j < orbit.size(); ++j) {
    EXPECT_NEAR(orbit.samples.col(j).head<2>().squaredNorm(), amp2, 1e-9);
    EXPECT_LE(orbit.samples.col(j).tail<2>().norm(), 1e-12);
  }
  EXPECT_LE(orbit.residual, 1e-10);
}

TEST(Shooting, EquilibriumIsNotPeriodic) {
  ModelParams p;
  p.mu = 0.8;
  try {
    (void)find_periodic_orbit(Representation::ShearCore, p, squares_core(p), 10.0);
    FAIL() << "expected NotPeriodic";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), Failure::NotPeriodic);
  }
  EXPECT_THROW((void)find_periodic_orbit(Representation::ShearCore, p, squares_core(p), -1.0), InvalidArgument);
}

TEST(Monodromy, LinearSystemMatchesExponential) {
  const double w = 1.3, a = -0.2, T = 2.0;
  MatrixXd A = MatrixXd::Zero(3, 3);
  A << 0, -w, 0, w, 0, 0, 0, 0, a;
  MatrixXd expected = MatrixXd::Zero(3, 3);
  expected << std::cos(w * T), -std::sin(w * T), 0, std::sin(w * T), std::cos(w * T), 0, 0, 0, std::exp(a * T);
  EXPECT_LE((monodromy(linear_field(A), Eigen::Vector3d(1, 2, 3), T) - expected).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(Monodromy, VariationalAgreesWithFiniteDifferences) {
  const PeriodicOrbit& orbit = apw_orbit();
  ModelParams p;
  const VectorXd x0 = orbit.samples.col(0);
  const MatrixXd M = monodromy(make_field(Representation::ShearCore, p), x0, orbit.period);
  auto f = [&](const VectorXd& x) { return rhs(Representation::ShearCore, x, p); };
  const int steps = 40000;
  const MatrixXd fd = oracle::fd_jacobian([&](const VectorXd& x) { return oracle::rk4(f, x, orbit.period, steps); }, x0, 1e-5);
  EXPECT_LE((M - fd).lpNorm<Eigen::Infinity>(), 1e-6 * std::max(1.0, M.lpNorm<Eigen::Infinity>()));
}

TEST(Floquet, OneMultiplierAtUnity) {
  const PeriodicOrbit& orbit = apw_orbit();
  ModelParams p;
  const ComplexList m = floquet_multipliers(orbit, p);
  ASSERT_EQ(m.size(), 6u);
  const auto near_one = std::count_if(m.begin(), m.end(), [](Complex z) { return std::abs(z - 1.0) < 1e-6; });
  EXPECT_EQ(near_one, 1);
  EXPECT_EQ(orbit_stability(m), Stability::Stable);
  EXPECT_EQ(nontrivial_multipliers(m).size(), 5u);
}

TEST(Floquet, StabilityVerdicts) {
  EXPECT_EQ(orbit_stability({1.0, 0.5, Complex(0.2, 0.3)}), Stability::Stable);
  EXPECT_EQ(orbit_stability({1.0, 1.5, 0.5}), Stability::Unstable);
  EXPECT_EQ(orbit_stability({1.0, 1.0, 0.5}), Stability::Marginal);
}

TEST(FixedSubspace, IsInvariantUnderTheElement) {
  for (Dihedral d : kDihedral) {
    const MatrixXd P = fixed_subspace(Representation::ShearCore, d);
    EXPECT_LE((P.transpose() * P - MatrixXd::Identity(P.cols(), P.cols())).norm(), 1e-14);
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      EXPECT_LE(inf(act(d, Representation::ShearCore, P.col(j)) - P.col(j)), 1e-14);
    }
  }
  EXPECT_EQ(fixed_subspace(Representation::ShearCore, Dihedral::e).cols(), 6);
  EXPECT_EQ(fixed_subspace(Representation::ShearCore, Dihedral::md).cols(), 3);
}
