#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sqconv/types.hpp"

namespace sqconv {

// Point symmetries of the square. mx sends x to -x, md exchanges x and y;
// rq = md*mx, my = md*mx*md, mdp = mx*md*mx.
enum class Dihedral : std::uint8_t { e, rq, rq2, rq3, mx, my, md, mdp };

inline constexpr std::array<Dihedral, 8> kDihedral = {
    Dihedral::e,  Dihedral::rq, Dihedral::rq2, Dihedral::rq3,
    Dihedral::mx, Dihedral::my, Dihedral::md,  Dihedral::mdp};

/// Signed permutation matrix of the element acting on horizontal vectors
/// (shears, fields, translations, phases).
Eigen::Matrix2i matrix(Dihedral d);
Dihedral dihedral_from_matrix(const Eigen::Matrix2i& m);
Dihedral compose(Dihedral a, Dihedral b);
Dihedral inverse(Dihedral d);
int order(Dihedral d);
bool is_reflection(Dihedral d);

// Element tau(translation) * dihedral of D4 x T^2: the dihedral part acts
// first. Translations are kept unwrapped.
struct GroupElement {
  Dihedral dihedral = Dihedral::e;
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();

  GroupElement() = default;
  GroupElement(Dihedral d) : dihedral(d) {}  // NOLINT(google-explicit-constructor)
  GroupElement(Dihedral d, const Eigen::Vector2d& shift) : dihedral(d), translation(shift) {}

  static GroupElement translate(double dx, double dy) {
    return {Dihedral::e, Eigen::Vector2d(dx, dy)};
  }
};

GroupElement compose(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& g);
/// Equality with translations compared modulo 2*pi/k.
bool approx_equal(const GroupElement& a, const GroupElement& b, double k, double tol = 1e-12);

/// Advance of time by numerator/denominator of a period; denominator in {1, 2, 4}.
struct TemporalShift {
  int numerator = 0;
  int denominator = 1;

  TemporalShift() = default;
  TemporalShift(int num, int den);

  static TemporalShift half() { return {1, 2}; }
  static TemporalShift quarter() { return {1, 4}; }

  /// Shift in quarter periods, 0..3.
  int quarters() const { return (numerator * (4 / denominator)) % 4; }
  double fraction() const { return static_cast<double>(numerator) / denominator; }

  friend bool operator==(const TemporalShift& a, const TemporalShift& b) {
    return a.quarters() == b.quarters();
  }
};

TemporalShift compose(TemporalShift a, TemporalShift b);

struct SpatioTemporalSymmetry {
  GroupElement spatial;
  TemporalShift temporal;
};

SpatioTemporalSymmetry compose(const SpatioTemporalSymmetry& a, const SpatioTemporalSymmetry& b);
bool operator==(const SpatioTemporalSymmetry& a, const SpatioTemporalSymmetry& b);

std::string to_string(Dihedral d);
std::string to_string(const GroupElement& g);
std::string to_string(const SpatioTemporalSymmetry& s);
Dihedral parse_dihedral(std::string_view text);
GroupElement parse_group_element(std::string_view text);
SpatioTemporalSymmetry parse_symmetry(std::string_view text);

/// Applies g to a state in the given representation. k is the wavenumber
/// converting translations into phase shifts of roll amplitudes.
VectorXd act(const GroupElement& g, Representation rep, const VectorXd& state, double k = 1.0);

/// Action on tangent vectors (derivatives): the linear part of act().
VectorXd act_tangent(const GroupElement& g, Representation rep, const VectorXd& tangent,
                     double k = 1.0);

/// Max-norm distance that compares phase coordinates modulo their period.
double state_distance(Representation rep, const VectorXd& a, const VectorXd& b, double k = 1.0);

/// ||F(g s) - g F(s)||_inf for the vector field of `rep`.
double verify_equivariance(Representation rep, const GroupElement& g, const VectorXd& state,
                           const Parameters& params);

/// Dihedral elements fixing `state` within tol * (1 + ||state||_inf); always a subgroup.
std::vector<Dihedral> isotropy_of_state(Representation rep, const VectorXd& state, double tol,
                                        double k = 1.0);

/// Reduces a set containing the identity to a subgroup by discarding elements
/// whose products leave the set.
std::vector<Dihedral> close_subgroup(std::vector<Dihedral> elements);

/// Applies the spatial part to every sample and advances time by the shift
/// (linear interpolation when the shift is not a whole number of samples).
PeriodicOrbit act_on_orbit(const SpatioTemporalSymmetry& g, const PeriodicOrbit& orbit,
                           double k = 1.0);

}  // namespace sqconv
