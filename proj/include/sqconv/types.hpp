#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace sqconv {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Complex = std::complex<double>;
using ComplexList = std::vector<Complex>;

template <typename Scalar, int N>
using Vector = Eigen::Matrix<Scalar, N, 1>;

/// Thrown for malformed input: bad parameters, mismatched state sizes, parse errors.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Failure {
  StepLimit,
  StepUnderflow,
  NotConverged,
  SingularJacobian,
  NotPeriodic,
  Degenerate,
};

/// Thrown when a numerical procedure cannot deliver its result.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(Failure kind, const std::string& what, double last_residual = 0.0)
      : std::runtime_error(what), kind_(kind), last_residual_(last_residual) {}

  Failure kind() const noexcept { return kind_; }
  double last_residual() const noexcept { return last_residual_; }

 private:
  Failure kind_;
  double last_residual_;
};

// Parameters of the magnetoconvection model. Defaults are the illustrative
// values used for the square-pattern oscillations (mu = 1, Q = 1, zeta = 0.2,
// beta = -1.5, gamma = 1); the drift coefficient D only affects phases.
struct ModelParams {
  double mu = 1.0;
  double beta = -1.5;
  double gamma = 1.0;
  double Q = 1.0;
  double zeta = 0.2;
  double D = 1.0;
  double k = 1.0;

  void validate() const;
  double& operator[](std::string_view name);
  double operator[](std::string_view name) const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Steady (pitchfork) normal form coefficients; all real.
struct PitchforkParams {
  double lambda = 0.0;
  double A = -1.0;
  double B = -1.0;
  double D = 1.0;

  friend bool operator==(const PitchforkParams&, const PitchforkParams&) = default;
};

/// Oscillatory (Hopf) normal form coefficients.
struct HopfParams {
  double lambda = 0.0;
  double omega = 1.0;
  Complex A{-1.0, 0.0};
  Complex B{-1.0, 0.0};
  Complex C{0.0, 0.0};
  Complex D{1.0, 0.0};

  friend bool operator==(const HopfParams&, const HopfParams&) = default;
};

using Parameters = std::variant<ModelParams, PitchforkParams, HopfParams>;

// Real-coordinate layouts (complex fields are stored as re, im):
//   Amplitude      [Re a_x, Im a_x, Re a_y, Im a_y]
//   Full           [Re a_x, Im a_x, c_x, d_x, Re a_y, Im a_y, c_y, d_y]
//   Polar          [r_x, theta_x, c_x, d_x, r_y, theta_y, c_y, d_y]
//   Pitchfork      [v_x, v_y, phi_x, phi_y]
//   Hopf           [Re v_x, Im v_x, Re v_y, Im v_y, phi_x, phi_y]
// The *Core forms drop the translation variables (phases) and are what
// equilibria, periodic orbits and isotropy classification work with:
//   AmplitudeCore  [r_x, r_y]
//   ShearCore      [r_x, c_x, d_x, r_y, c_y, d_y]
//   PitchforkCore  [v_x, v_y]
//   HopfCore       [Re v_x, Im v_x, Re v_y, Im v_y]
enum class Representation {
  Amplitude,
  Full,
  Polar,
  Pitchfork,
  Hopf,
  AmplitudeCore,
  ShearCore,
  PitchforkCore,
  HopfCore,
};

inline constexpr Representation kModels[] = {
    Representation::Amplitude, Representation::Full, Representation::Polar,
    Representation::Pitchfork, Representation::Hopf};

int dimension(Representation rep);
bool is_core(Representation rep);
Representation core_of(Representation rep);
std::string_view to_string(Representation rep);
Representation representation_from_string(std::string_view name);
std::vector<std::string> field_names(Representation rep);

/// Throws InvalidArgument unless `params` holds the alternative used by `rep`.
void check_compatible(Representation rep, const Parameters& params);

/// Wavenumber used for translations (normal forms act on phases directly).
double wavenumber(const Parameters& params);

// One period of a closed orbit, sampled uniformly: column j is the state at
// t = j * period / samples.cols().
struct PeriodicOrbit {
  Representation rep = Representation::ShearCore;
  MatrixXd samples;
  double period = 0.0;
  double residual = 0.0;
  ComplexList floquet_multipliers;

  Eigen::Index size() const { return samples.cols(); }
};

}  // namespace sqconv
