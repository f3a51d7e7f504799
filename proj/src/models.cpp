#include "sqconv/models.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "sqconv/linalg.hpp"

namespace sqconv {

namespace {

constexpr double kPhaseFloor = 1e-12;

void check_size(Representation rep, const VectorXd& s) {
  if (s.size() != dimension(rep)) {
    throw InvalidArgument("state size " + std::to_string(s.size()) + " does not match model '" +
                          std::string(to_string(rep)) + "'");
  }
}

// Rows of one roll amplitude a = (re, im) under
//   a' = g a + i D c a,  g = mu - |a|^2 - (1 + beta)|b|^2 - gamma c^2.
// `c` < 0 means the direction carries no shear (amplitude equations).
void amplitude_rows(MatrixXd& J, const VectorXd& s, const ModelParams& p, int a, int b, int c) {
  const double x = s(a), y = s(a + 1), u = s(b), v = s(b + 1);
  const double shear = c >= 0 ? s(c) : 0.0;
  const double g = p.mu - (x * x + y * y) - (1.0 + p.beta) * (u * u + v * v) - p.gamma * shear * shear;
  const double w = p.D * shear;
  const double cross = -2.0 * (1.0 + p.beta);
  J(a, a) = g - 2.0 * x * x;
  J(a, a + 1) = -2.0 * x * y - w;
  J(a, b) = cross * x * u;
  J(a, b + 1) = cross * x * v;
  J(a + 1, a) = -2.0 * x * y + w;
  J(a + 1, a + 1) = g - 2.0 * y * y;
  J(a + 1, b) = cross * y * u;
  J(a + 1, b + 1) = cross * y * v;
  if (c >= 0) {
    J(a, c) = -2.0 * p.gamma * shear * x - p.D * y;
    J(a + 1, c) = -2.0 * p.gamma * shear * y + p.D * x;
  }
}

MatrixXd full_jacobian(const VectorXd& s, const ModelParams& p) {
  MatrixXd J = MatrixXd::Zero(8, 8);
  amplitude_rows(J, s, p, 0, 4, 2);
  amplitude_rows(J, s, p, 4, 0, 6);
  for (const auto& [a, c, d] : {std::array{0, 2, 3}, std::array{4, 6, 7}}) {
    const double x = s(a), y = s(a + 1), shear = s(c);
    J(c, a) = 2.0 * x * shear;
    J(c, a + 1) = 2.0 * y * shear;
    J(c, c) = -1.0 + x * x + y * y;
    J(c, d) = -p.Q;
    J(d, c) = p.zeta;
    J(d, d) = -p.zeta;
  }
  return J;
}

MatrixXd amplitude_jacobian(const VectorXd& s, const ModelParams& p) {
  MatrixXd J = MatrixXd::Zero(4, 4);
  amplitude_rows(J, s, p, 0, 2, -1);
  amplitude_rows(J, s, p, 2, 0, -1);
  return J;
}

MatrixXd shear_core_jacobian(const VectorXd& s, const ModelParams& p) {
  MatrixXd J = MatrixXd::Zero(6, 6);
  for (const auto& [r, c, d, other] : {std::array{0, 1, 2, 3}, std::array{3, 4, 5, 0}}) {
    const double rr = s(r), cc = s(c), ro = s(other);
    J(r, r) = p.mu - 3.0 * rr * rr - (1.0 + p.beta) * ro * ro - p.gamma * cc * cc;
    J(r, other) = -2.0 * (1.0 + p.beta) * rr * ro;
    J(r, c) = -2.0 * p.gamma * cc * rr;
    J(c, r) = 2.0 * rr * cc;
    J(c, c) = -1.0 + rr * rr;
    J(c, d) = -p.Q;
    J(d, c) = p.zeta;
    J(d, d) = -p.zeta;
  }
  return J;
}

MatrixXd polar_jacobian(const VectorXd& s, const ModelParams& p) {
  static constexpr std::array<int, 6> kCoreIndex = {0, 2, 3, 4, 6, 7};
  const VectorXd core = reduce(Representation::Polar, s);
  const MatrixXd Jc = shear_core_jacobian(core, p);
  MatrixXd J = MatrixXd::Zero(8, 8);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) J(kCoreIndex[i], kCoreIndex[j]) = Jc(i, j);
  }
  J(1, 2) = p.D;
  J(5, 6) = p.D;
  return J;
}

MatrixXd amplitude_core_jacobian(const VectorXd& s, const ModelParams& p) {
  MatrixXd J(2, 2);
  const double x = s(0), y = s(1);
  J << p.mu - 3.0 * x * x - (1.0 + p.beta) * y * y, -2.0 * (1.0 + p.beta) * x * y,
      -2.0 * (1.0 + p.beta) * x * y, p.mu - 3.0 * y * y - (1.0 + p.beta) * x * x;
  return J;
}

MatrixXd pitchfork_jacobian(const VectorXd& s, const PitchforkParams& p, bool with_phase) {
  const int n = with_phase ? 4 : 2;
  MatrixXd J = MatrixXd::Zero(n, n);
  const double vx = s(0), vy = s(1);
  J(0, 0) = p.lambda + 3.0 * p.A * vx * vx + p.B * vy * vy;
  J(0, 1) = 2.0 * p.B * vx * vy;
  J(1, 0) = 2.0 * p.B * vx * vy;
  J(1, 1) = p.lambda + 3.0 * p.A * vy * vy + p.B * vx * vx;
  if (with_phase) {
    J(2, 0) = p.D;
    J(3, 1) = p.D;
  }
  return J;
}

// Real Jacobian from Wirtinger derivatives f_z and f_zbar.
void put_complex(MatrixXd& J, int row, int col, Complex fz, Complex fzbar) {
  const Complex dx = fz + fzbar;
  const Complex dy = Complex(0.0, 1.0) * (fz - fzbar);
  J(row, col) = dx.real();
  J(row + 1, col) = dx.imag();
  J(row, col + 1) = dy.real();
  J(row + 1, col + 1) = dy.imag();
}

MatrixXd hopf_jacobian(const VectorXd& s, const HopfParams& p, bool with_phase) {
  const int n = with_phase ? 6 : 4;
  MatrixXd J = MatrixXd::Zero(n, n);
  const Complex vx(s(0), s(1)), vy(s(2), s(3));
  const Complex linear(p.lambda, p.omega);
  const double nx = std::norm(vx), ny = std::norm(vy);
  for (const auto& [self, other, row] : {std::tuple{vx, vy, 0}, std::tuple{vy, vx, 2}}) {
    const double ns = std::norm(self);
    const Complex P = linear + p.A * (nx + ny) + p.B * ns;
    const int col_self = row, col_other = 2 - row;
    put_complex(J, row, col_self, P + (p.A + p.B) * ns,
                (p.A + p.B) * self * self + p.C * other * other);
    put_complex(J, row, col_other, p.A * self * std::conj(other) + 2.0 * p.C * std::conj(self) * other,
                p.A * self * other);
  }
  if (with_phase) {
    J(4, 0) = p.D.real();
    J(4, 1) = -p.D.imag();
    J(5, 2) = p.D.real();
    J(5, 3) = -p.D.imag();
  }
  return J;
}

double phase_of(double re, double im) { return std::hypot(re, im) < kPhaseFloor ? 0.0 : std::atan2(im, re); }

void put_amplitude(VectorXd& s, int index, double r, double theta) {
  s(index) = r * std::cos(theta);
  s(index + 1) = r * std::sin(theta);
}

double clean(double v) { return v + 0.0; }

}  // namespace

VectorXd rhs(Representation rep, const VectorXd& s, const Parameters& params) {
  check_compatible(rep, params);
  check_size(rep, s);
  switch (rep) {
    case Representation::Amplitude: return amplitude_rhs(s, std::get<ModelParams>(params));
    case Representation::Full: return full_rhs(s, std::get<ModelParams>(params));
    case Representation::Polar: return polar_rhs(s, std::get<ModelParams>(params));
    case Representation::Pitchfork: return pitchfork_rhs(s, std::get<PitchforkParams>(params));
    case Representation::Hopf: return hopf_rhs(s, std::get<HopfParams>(params));
    case Representation::AmplitudeCore: return amplitude_core_rhs(s, std::get<ModelParams>(params));
    case Representation::ShearCore: return shear_core_rhs(s, std::get<ModelParams>(params));
    case Representation::PitchforkCore:
      return pitchfork_core_rhs(s, std::get<PitchforkParams>(params));
    case Representation::HopfCore: return hopf_core_rhs(s, std::get<HopfParams>(params));
  }
  return {};
}

MatrixXd jacobian(Representation rep, const VectorXd& s, const Parameters& params) {
  check_compatible(rep, params);
  check_size(rep, s);
  switch (rep) {
    case Representation::Amplitude: return amplitude_jacobian(s, std::get<ModelParams>(params));
    case Representation::Full: return full_jacobian(s, std::get<ModelParams>(params));
    case Representation::Polar: return polar_jacobian(s, std::get<ModelParams>(params));
    case Representation::Pitchfork:
      return pitchfork_jacobian(s, std::get<PitchforkParams>(params), true);
    case Representation::Hopf: return hopf_jacobian(s, std::get<HopfParams>(params), true);
    case Representation::AmplitudeCore:
      return amplitude_core_jacobian(s, std::get<ModelParams>(params));
    case Representation::ShearCore: return shear_core_jacobian(s, std::get<ModelParams>(params));
    case Representation::PitchforkCore:
      return pitchfork_jacobian(s, std::get<PitchforkParams>(params), false);
    case Representation::HopfCore: return hopf_jacobian(s, std::get<HopfParams>(params), false);
  }
  return {};
}

Eigen::Vector2d drift_rate(Representation rep, const VectorXd& s, const Parameters& params) {
  check_compatible(rep, params);
  check_size(rep, s);
  switch (rep) {
    case Representation::Full: {
      const double D = std::get<ModelParams>(params).D;
      return {D * s(2), D * s(6)};
    }
    case Representation::Polar: {
      const double D = std::get<ModelParams>(params).D;
      return {D * s(2), D * s(6)};
    }
    case Representation::ShearCore: {
      const double D = std::get<ModelParams>(params).D;
      return {D * s(1), D * s(4)};
    }
    case Representation::Pitchfork:
    case Representation::PitchforkCore: {
      const double D = std::get<PitchforkParams>(params).D;
      return {D * s(0), D * s(1)};
    }
    case Representation::Hopf:
    case Representation::HopfCore: {
      const Complex D = std::get<HopfParams>(params).D;
      return {(D * Complex(s(0), s(1))).real(), (D * Complex(s(2), s(3))).real()};
    }
    default:
      return Eigen::Vector2d::Zero();
  }
}

VectorXd ModeState::pack() const {
  VectorXd v(8);
  v << ax.real(), ax.imag(), cx, dx, ay.real(), ay.imag(), cy, dy;
  return v;
}

ModeState ModeState::unpack(const VectorXd& v) {
  check_size(Representation::Full, v);
  return {Complex(v(0), v(1)), v(2), v(3), Complex(v(4), v(5)), v(6), v(7)};
}

VectorXd PolarState::pack() const {
  VectorXd v(8);
  v << rx, theta_x, cx, dx, ry, theta_y, cy, dy;
  return v;
}

PolarState PolarState::unpack(const VectorXd& v) {
  check_size(Representation::Polar, v);
  return {v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7)};
}

PolarConversion to_polar(const ModeState& s) {
  PolarConversion out;
  out.ambiguous_phase = std::abs(s.ax) < kPhaseFloor || std::abs(s.ay) < kPhaseFloor;
  out.state = {std::abs(s.ax), phase_of(s.ax.real(), s.ax.imag()), s.cx, s.dx,
               std::abs(s.ay), phase_of(s.ay.real(), s.ay.imag()), s.cy, s.dy};
  return out;
}

ModeState to_cartesian(const PolarState& s) {
  return {std::polar(s.rx, s.theta_x), s.cx, s.dx, std::polar(s.ry, s.theta_y), s.cy, s.dy};
}

VectorXd reduce(Representation rep, const VectorXd& s) {
  check_size(rep, s);
  VectorXd core(dimension(core_of(rep)));
  switch (rep) {
    case Representation::Amplitude:
      core << std::hypot(s(0), s(1)), std::hypot(s(2), s(3));
      break;
    case Representation::Full:
      core << std::hypot(s(0), s(1)), s(2), s(3), std::hypot(s(4), s(5)), s(6), s(7);
      break;
    case Representation::Polar:
      core << s(0), s(2), s(3), s(4), s(6), s(7);
      break;
    case Representation::Pitchfork:
    case Representation::Hopf:
      core = s.head(core.size());
      break;
    default:
      core = s;
      break;
  }
  return core;
}

VectorXd lift(Representation rep, const VectorXd& core, const VectorXd& reference) {
  check_size(rep, reference);
  check_size(core_of(rep), core);
  VectorXd s = reference;
  switch (rep) {
    case Representation::Amplitude:
      put_amplitude(s, 0, core(0), phase_of(reference(0), reference(1)));
      put_amplitude(s, 2, core(1), phase_of(reference(2), reference(3)));
      break;
    case Representation::Full:
      put_amplitude(s, 0, core(0), phase_of(reference(0), reference(1)));
      put_amplitude(s, 4, core(3), phase_of(reference(4), reference(5)));
      s(2) = core(1);
      s(3) = core(2);
      s(6) = core(4);
      s(7) = core(5);
      break;
    case Representation::Polar:
      s << std::abs(core(0)), reference(1) + (core(0) < 0.0 ? std::numbers::pi : 0.0), core(1),
          core(2), std::abs(core(3)), reference(5) + (core(3) < 0.0 ? std::numbers::pi : 0.0),
          core(4), core(5);
      break;
    case Representation::Pitchfork:
    case Representation::Hopf:
      s.head(core.size()) = core;
      break;
    default:
      s = core;
      break;
  }
  return s;
}

PrimaryBranches primary_branches(const ModelParams& p) {
  p.validate();
  PrimaryBranches out;
  const double mu = std::max(p.mu, 0.0);
  out.rolls_amplitude_sq = mu;
  const VectorXd rolls = Eigen::Vector2d(std::sqrt(mu), 0.0);
  out.rolls_eigenvalues = eigenvalues(amplitude_core_jacobian(rolls, p));
  out.rolls_stable = p.mu > 0.0 && count_unstable(out.rolls_eigenvalues, -1e-14) == 0;

  out.squares_exist = p.beta > -2.0;
  if (!out.squares_exist) {
    out.squares_amplitude_sq = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.squares_amplitude_sq = mu / (2.0 + p.beta);
  const double r = std::sqrt(out.squares_amplitude_sq);
  out.squares_eigenvalues = eigenvalues(amplitude_core_jacobian(Eigen::Vector2d(r, r), p));
  out.squares_stable = p.mu > 0.0 && count_unstable(out.squares_eigenvalues, -1e-14) == 0;
  return out;
}

Thresholds thresholds(const ModelParams& p) {
  p.validate();
  Thresholds t;
  t.mu_pitchfork = (1.0 + p.Q) * (2.0 + p.beta);
  t.mu_hopf = (1.0 + p.zeta) * (2.0 + p.beta);
  t.hopf_exists = p.Q > p.zeta;
  t.omega_hopf = t.hopf_exists ? std::sqrt(p.zeta * (p.Q - p.zeta)) : 0.0;
  t.tb_mu = (1.0 + p.zeta) * (2.0 + p.beta);
  t.tb_Q = p.zeta;
  return t;
}

VectorXd squares_core(const ModelParams& p) {
  if (!(p.beta > -2.0)) throw InvalidArgument("squares do not exist for beta <= -2");
  const double r = std::sqrt(std::max(p.mu, 0.0) / (2.0 + p.beta));
  VectorXd core(6);
  core << r, 0.0, 0.0, r, 0.0, 0.0;
  return core;
}

namespace {

TravellingSquares finish_travelling(TravellingSquares out, double rx2, double ry2, double c2,
                                    const ModelParams& p, bool diagonal) {
  if (rx2 < 0.0 || ry2 < 0.0 || c2 < 0.0) {
    out.reason = "no real solution: squared amplitude negative";
    return out;
  }
  out.exists = true;
  out.rx = std::sqrt(rx2);
  out.ry = std::sqrt(ry2);
  out.c = std::sqrt(c2);
  const double cy = diagonal ? out.c : 0.0;
  out.core.resize(6);
  out.core << out.rx, out.c, out.c, out.ry, cy, cy;
  out.drift = Eigen::Vector2d(p.D * out.c, p.D * cy);
  return out;
}

}  // namespace

TravellingSquares tsq_branch(const ModelParams& p) {
  p.validate();
  TravellingSquares out;
  if (p.gamma == 0.0) {
    out.reason = "gamma = 0: shear amplitude undefined";
    return out;
  }
  const double rx2 = 1.0 + p.Q;
  const double ry2 = p.mu - (1.0 + p.beta) * rx2;
  const double c2 = (p.mu - rx2 - (1.0 + p.beta) * ry2) / p.gamma;
  return finish_travelling(out, rx2, ry2, c2, p, false);
}

TravellingSquares dtsq_branch(const ModelParams& p) {
  p.validate();
  TravellingSquares out;
  if (p.gamma == 0.0) {
    out.reason = "gamma = 0: shear amplitude undefined";
    return out;
  }
  const double r2 = 1.0 + p.Q;
  const double c2 = (p.mu - (2.0 + p.beta) * r2) / p.gamma;
  return finish_travelling(out, r2, r2, c2, p, true);
}

std::string_view to_string(BranchLabel label) {
  switch (label) {
    case BranchLabel::Trivial: return "Trivial";
    case BranchLabel::Rolls: return "Rolls";
    case BranchLabel::Squares: return "Squares";
    case BranchLabel::TSq: return "TSq";
    case BranchLabel::DTSq: return "DTSq";
    case BranchLabel::PSq: return "PSq";
    case BranchLabel::DPSq: return "DPSq";
    case BranchLabel::APW: return "APW";
    case BranchLabel::CrossRollLike: return "CrossRollLike";
    case BranchLabel::Unknown: return "Unknown";
  }
  return "Unknown";
}

BranchLabel branch_label_from_string(std::string_view text) {
  for (auto l : {BranchLabel::Trivial, BranchLabel::Rolls, BranchLabel::Squares, BranchLabel::TSq,
                 BranchLabel::DTSq, BranchLabel::PSq, BranchLabel::DPSq, BranchLabel::APW,
                 BranchLabel::CrossRollLike, BranchLabel::Unknown}) {
    if (to_string(l) == text) return l;
  }
  throw InvalidArgument("unknown solution label '" + std::string(text) + "'");
}

namespace {

NormalFormBranch make_branch(BranchLabel label, double lambda, double denominator) {
  NormalFormBranch b;
  b.label = label;
  if (denominator == 0.0) {
    b.degenerate = true;
    b.amplitude_sq = std::numeric_limits<double>::quiet_NaN();
    return b;
  }
  b.amplitude_sq = clean(-lambda / denominator);
  b.exists = b.amplitude_sq > 0.0;
  return b;
}

}  // namespace

std::vector<NormalFormBranch> nf_branches(const PitchforkParams& p) {
  std::vector<NormalFormBranch> out;
  out.push_back(make_branch(BranchLabel::TSq, p.lambda, p.A));
  out.push_back(make_branch(BranchLabel::DTSq, p.lambda, p.A + p.B));
  for (auto& b : out) {
    if (!b.exists) continue;
    const double v = std::sqrt(b.amplitude_sq);
    b.core = b.label == BranchLabel::TSq ? Eigen::Vector2d(v, 0.0) : Eigen::Vector2d(v, v);
  }
  return out;
}

std::vector<NormalFormBranch> nf_branches(const HopfParams& p) {
  const Complex psq = p.A + p.B;
  const Complex dpsq = 2.0 * p.A + p.B + p.C;
  const Complex apw = 2.0 * p.A + p.B - p.C;
  std::vector<NormalFormBranch> out;
  for (const auto& [label, coeff] : {std::pair{BranchLabel::PSq, psq}, std::pair{BranchLabel::DPSq, dpsq},
                                     std::pair{BranchLabel::APW, apw}}) {
    NormalFormBranch b = make_branch(label, p.lambda, coeff.real());
    if (!b.degenerate) b.frequency = p.omega + coeff.imag() * b.amplitude_sq;
    if (b.exists) {
      const double R = std::sqrt(b.amplitude_sq);
      b.core.resize(4);
      if (label == BranchLabel::PSq) b.core << R, 0.0, 0.0, 0.0;
      if (label == BranchLabel::DPSq) b.core << R, 0.0, R, 0.0;
      if (label == BranchLabel::APW) b.core << 0.0, R, R, 0.0;  // v_x = i v_y
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace sqconv
