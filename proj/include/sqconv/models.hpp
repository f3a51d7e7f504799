#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sqconv/types.hpp"

namespace sqconv {

// Vector fields. Each right-hand side is templated on the scalar so the same
// expressions serve double evaluation and any Eigen-compatible scalar type.

/// Roll/square amplitude equations without shear.
template <typename Derived>
Vector<typename Derived::Scalar, 4> amplitude_rhs(const Eigen::MatrixBase<Derived>& s,
                                                  const ModelParams& p) {
  using Scalar = typename Derived::Scalar;
  const Scalar ax2 = s(0) * s(0) + s(1) * s(1);
  const Scalar ay2 = s(2) * s(2) + s(3) * s(3);
  const Scalar gx = Scalar(p.mu) - ax2 - Scalar(1.0 + p.beta) * ay2;
  const Scalar gy = Scalar(p.mu) - ay2 - Scalar(1.0 + p.beta) * ax2;
  Vector<Scalar, 4> out;
  out << gx * s(0), gx * s(1), gy * s(2), gy * s(3);
  return out;
}

/// Magnetoconvection model with shear and horizontal field, Cartesian form.
template <typename Derived>
Vector<typename Derived::Scalar, 8> full_rhs(const Eigen::MatrixBase<Derived>& s,
                                             const ModelParams& p) {
  using Scalar = typename Derived::Scalar;
  const Scalar ax2 = s(0) * s(0) + s(1) * s(1);
  const Scalar ay2 = s(4) * s(4) + s(5) * s(5);
  const Scalar cx = s(2), dx = s(3), cy = s(6), dy = s(7);
  const Scalar gx = Scalar(p.mu) - ax2 - Scalar(1.0 + p.beta) * ay2 - Scalar(p.gamma) * cx * cx;
  const Scalar gy = Scalar(p.mu) - ay2 - Scalar(1.0 + p.beta) * ax2 - Scalar(p.gamma) * cy * cy;
  const Scalar wx = Scalar(p.D) * cx;
  const Scalar wy = Scalar(p.D) * cy;
  Vector<Scalar, 8> out;
  out << gx * s(0) - wx * s(1), gx * s(1) + wx * s(0),
      -cx - Scalar(p.Q) * dx + ax2 * cx, Scalar(p.zeta) * (cx - dx),
      gy * s(4) - wy * s(5), gy * s(5) + wy * s(4),
      -cy - Scalar(p.Q) * dy + ay2 * cy, Scalar(p.zeta) * (cy - dy);
  return out;
}

/// Translation-free part of the model: [r_x, c_x, d_x, r_y, c_y, d_y].
template <typename Derived>
Vector<typename Derived::Scalar, 6> shear_core_rhs(const Eigen::MatrixBase<Derived>& s,
                                                   const ModelParams& p) {
  using Scalar = typename Derived::Scalar;
  const Scalar rx = s(0), cx = s(1), dx = s(2), ry = s(3), cy = s(4), dy = s(5);
  const Scalar rx2 = rx * rx, ry2 = ry * ry;
  Vector<Scalar, 6> out;
  out << rx * (Scalar(p.mu) - rx2 - Scalar(1.0 + p.beta) * ry2 - Scalar(p.gamma) * cx * cx),
      -cx - Scalar(p.Q) * dx + rx2 * cx, Scalar(p.zeta) * (cx - dx),
      ry * (Scalar(p.mu) - ry2 - Scalar(1.0 + p.beta) * rx2 - Scalar(p.gamma) * cy * cy),
      -cy - Scalar(p.Q) * dy + ry2 * cy, Scalar(p.zeta) * (cy - dy);
  return out;
}

/// Polar form: the core equations plus theta' = D c for each direction.
template <typename Derived>
Vector<typename Derived::Scalar, 8> polar_rhs(const Eigen::MatrixBase<Derived>& s,
                                              const ModelParams& p) {
  using Scalar = typename Derived::Scalar;
  Vector<Scalar, 6> core;
  core << s(0), s(2), s(3), s(4), s(6), s(7);
  const Vector<Scalar, 6> dc = shear_core_rhs(core, p);
  Vector<Scalar, 8> out;
  out << dc(0), Scalar(p.D) * s(2), dc(1), dc(2), dc(3), Scalar(p.D) * s(6), dc(4), dc(5);
  return out;
}

template <typename Derived>
Vector<typename Derived::Scalar, 2> amplitude_core_rhs(const Eigen::MatrixBase<Derived>& s,
                                                       const ModelParams& p) {
  using Scalar = typename Derived::Scalar;
  const Scalar rx2 = s(0) * s(0), ry2 = s(1) * s(1);
  Vector<Scalar, 2> out;
  out << s(0) * (Scalar(p.mu) - rx2 - Scalar(1.0 + p.beta) * ry2),
      s(1) * (Scalar(p.mu) - ry2 - Scalar(1.0 + p.beta) * rx2);
  return out;
}

template <typename Derived>
Vector<typename Derived::Scalar, 2> pitchfork_core_rhs(const Eigen::MatrixBase<Derived>& s,
                                                       const PitchforkParams& p) {
  using Scalar = typename Derived::Scalar;
  const Scalar vx = s(0), vy = s(1);
  Vector<Scalar, 2> out;
  out << Scalar(p.lambda) * vx + Scalar(p.A) * vx * vx * vx + Scalar(p.B) * vy * vy * vx,
      Scalar(p.lambda) * vy + Scalar(p.A) * vy * vy * vy + Scalar(p.B) * vx * vx * vy;
  return out;
}

/// Steady normal form with drift: [v_x, v_y, phi_x, phi_y].
template <typename Derived>
Vector<typename Derived::Scalar, 4> pitchfork_rhs(const Eigen::MatrixBase<Derived>& s,
                                                  const PitchforkParams& p) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar, 2> dv = pitchfork_core_rhs(s.template head<2>(), p);
  Vector<Scalar, 4> out;
  out << dv, Scalar(p.D) * s(0), Scalar(p.D) * s(1);
  return out;
}

template <typename Derived>
Vector<typename Derived::Scalar, 4> hopf_core_rhs(const Eigen::MatrixBase<Derived>& s,
                                                  const HopfParams& p) {
  using Scalar = typename Derived::Scalar;
  using C = std::complex<Scalar>;
  const C vx(s(0), s(1)), vy(s(2), s(3));
  const C A(Scalar(p.A.real()), Scalar(p.A.imag()));
  const C B(Scalar(p.B.real()), Scalar(p.B.imag()));
  const C Cc(Scalar(p.C.real()), Scalar(p.C.imag()));
  const C linear(Scalar(p.lambda), Scalar(p.omega));
  const Scalar nx = std::norm(vx), ny = std::norm(vy);
  const C dvx = (linear + A * (nx + ny) + B * nx) * vx + Cc * std::conj(vx) * vy * vy;
  const C dvy = (linear + A * (nx + ny) + B * ny) * vy + Cc * std::conj(vy) * vx * vx;
  Vector<Scalar, 4> out;
  out << dvx.real(), dvx.imag(), dvy.real(), dvy.imag();
  return out;
}

/// Oscillatory normal form with drift phi' = Re(D v).
template <typename Derived>
Vector<typename Derived::Scalar, 6> hopf_rhs(const Eigen::MatrixBase<Derived>& s,
                                             const HopfParams& p) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar, 4> dv = hopf_core_rhs(s.template head<4>(), p);
  const Scalar Dr(p.D.real()), Di(p.D.imag());
  Vector<Scalar, 6> out;
  out << dv, Dr * s(0) - Di * s(1), Dr * s(2) - Di * s(3);
  return out;
}

/// Dispatches to the right-hand side of `rep`.
VectorXd rhs(Representation rep, const VectorXd& state, const Parameters& params);

/// Analytic Jacobian in real coordinates.
MatrixXd jacobian(Representation rep, const VectorXd& state, const Parameters& params);

/// Drift velocity (phi_x', phi_y') or (theta_x', theta_y') implied by the
/// state; zero for the amplitude equations, which have no drift.
Eigen::Vector2d drift_rate(Representation rep, const VectorXd& state, const Parameters& params);

// Typed views of the model state.
struct ModeState {
  Complex ax;
  double cx = 0.0;
  double dx = 0.0;
  Complex ay;
  double cy = 0.0;
  double dy = 0.0;

  VectorXd pack() const;
  static ModeState unpack(const VectorXd& v);
};

struct PolarState {
  double rx = 0.0;
  double theta_x = 0.0;
  double cx = 0.0;
  double dx = 0.0;
  double ry = 0.0;
  double theta_y = 0.0;
  double cy = 0.0;
  double dy = 0.0;

  VectorXd pack() const;
  static PolarState unpack(const VectorXd& v);
};

struct PolarConversion {
  PolarState state;
  bool ambiguous_phase = false;  // some |a| < 1e-12; that phase was set to 0
};

PolarConversion to_polar(const ModeState& s);
ModeState to_cartesian(const PolarState& s);

/// Drops translation variables: maps a model state onto its core form.
VectorXd reduce(Representation rep, const VectorXd& state);

/// Inverse of reduce(): rebuilds a model state from a core state, taking the
/// phases from `reference` (a state of the same model).
VectorXd lift(Representation rep, const VectorXd& core, const VectorXd& reference);

// Closed-form solutions.

struct PrimaryBranches {
  double rolls_amplitude_sq = 0.0;
  double squares_amplitude_sq = 0.0;
  bool squares_exist = false;
  bool rolls_stable = false;
  bool squares_stable = false;
  ComplexList rolls_eigenvalues;
  ComplexList squares_eigenvalues;
};

/// Rolls and squares of the amplitude equations; stability from the
/// eigenvalues of the amplitude-core Jacobian on each branch.
PrimaryBranches primary_branches(const ModelParams& p);

struct Thresholds {
  double mu_pitchfork = 0.0;
  double mu_hopf = 0.0;
  bool hopf_exists = false;
  double omega_hopf = 0.0;
  double tb_mu = 0.0;
  double tb_Q = 0.0;
};

/// Shear instabilities of the squares branch.
Thresholds thresholds(const ModelParams& p);

/// Squares equilibrium (core form) r_x = r_y = sqrt(mu / (2 + beta)).
VectorXd squares_core(const ModelParams& p);

struct TravellingSquares {
  bool exists = false;
  std::string reason;
  double rx = 0.0;
  double ry = 0.0;
  double c = 0.0;  // shear = field amplitude along the travel direction
  VectorXd core;   // ShearCore form
  Eigen::Vector2d drift = Eigen::Vector2d::Zero();
};

/// Squares travelling along +x: r_x^2 = 1 + Q, r_y^2 = mu - (1 + beta)(1 + Q).
TravellingSquares tsq_branch(const ModelParams& p);
/// Squares travelling along the diagonal: r^2 = 1 + Q, c^2 = (mu - (1 + Q)(2 + beta)) / gamma.
TravellingSquares dtsq_branch(const ModelParams& p);

enum class BranchLabel { Trivial, Rolls, Squares, TSq, DTSq, PSq, DPSq, APW, CrossRollLike, Unknown };

std::string_view to_string(BranchLabel label);
BranchLabel branch_label_from_string(std::string_view text);

struct NormalFormBranch {
  BranchLabel label = BranchLabel::Unknown;
  double amplitude_sq = 0.0;
  std::optional<double> frequency;  // Hopf branches only
  bool exists = false;
  bool degenerate = false;  // vanishing denominator
  VectorXd core;            // representative state on the branch (empty if absent)
};

/// TSq and DTSq of the steady normal form.
std::vector<NormalFormBranch> nf_branches(const PitchforkParams& p);
/// PSq, DPSq and APW (v_x = i v_y orientation) of the oscillatory normal form.
std::vector<NormalFormBranch> nf_branches(const HopfParams& p);

}  // namespace sqconv
