#include "sqconv/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>

#include <Eigen/LU>

#include "sqconv/models.hpp"

namespace sqconv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Matrix2i make(int a, int b, int c, int d) {
  Eigen::Matrix2i m;
  m << a, b, c, d;
  return m;
}

double wrap(double value, double period) { return value - period * std::round(value / period); }

// The signed permutation acts on pairs of horizontal quantities in three ways.
void act_vector(const Eigen::Matrix2i& m, double& x, double& y) {
  const double nx = m(0, 0) * x + m(0, 1) * y;
  const double ny = m(1, 0) * x + m(1, 1) * y;
  x = nx;
  y = ny;
}

void act_radius(const Eigen::Matrix2i& m, double& x, double& y) {
  if (m(0, 0) == 0) std::swap(x, y);
}

// Roll amplitudes: a reflected direction conjugates the amplitude.
void act_amplitude(const Eigen::Matrix2i& m, Complex& x, Complex& y) {
  const Complex src[2] = {x, y};
  Complex dst[2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (m(i, j) > 0) dst[i] = src[j];
      if (m(i, j) < 0) dst[i] = std::conj(src[j]);
    }
  }
  x = dst[0];
  y = dst[1];
}

void act_complex_vector(const Eigen::Matrix2i& m, Complex& x, Complex& y) {
  const Complex nx = double(m(0, 0)) * x + double(m(0, 1)) * y;
  const Complex ny = double(m(1, 0)) * x + double(m(1, 1)) * y;
  x = nx;
  y = ny;
}

void act_complex_pair(const Eigen::Matrix2i& m, VectorXd& s, int ix, int iy, bool conjugating) {
  Complex x(s(ix), s(ix + 1)), y(s(iy), s(iy + 1));
  if (conjugating) {
    act_amplitude(m, x, y);
  } else {
    act_complex_vector(m, x, y);
  }
  s(ix) = x.real();
  s(ix + 1) = x.imag();
  s(iy) = y.real();
  s(iy + 1) = y.imag();
}

void rotate_amplitude(VectorXd& s, int index, double angle) {
  const Complex a = Complex(s(index), s(index + 1)) * std::polar(1.0, angle);
  s(index) = a.real();
  s(index + 1) = a.imag();
}

VectorXd apply_dihedral(Dihedral d, Representation rep, VectorXd s) {
  const Eigen::Matrix2i m = matrix(d);
  switch (rep) {
    case Representation::Amplitude:
      act_complex_pair(m, s, 0, 2, true);
      break;
    case Representation::Full:
      act_complex_pair(m, s, 0, 4, true);
      act_vector(m, s(2), s(6));
      act_vector(m, s(3), s(7));
      break;
    case Representation::Polar:
      act_radius(m, s(0), s(4));
      act_vector(m, s(1), s(5));
      act_vector(m, s(2), s(6));
      act_vector(m, s(3), s(7));
      break;
    case Representation::Pitchfork:
      act_vector(m, s(0), s(1));
      act_vector(m, s(2), s(3));
      break;
    case Representation::Hopf:
      act_complex_pair(m, s, 0, 2, false);
      act_vector(m, s(4), s(5));
      break;
    case Representation::AmplitudeCore:
      act_radius(m, s(0), s(1));
      break;
    case Representation::ShearCore:
      act_radius(m, s(0), s(3));
      act_vector(m, s(1), s(4));
      act_vector(m, s(2), s(5));
      break;
    case Representation::PitchforkCore:
      act_vector(m, s(0), s(1));
      break;
    case Representation::HopfCore:
      act_complex_pair(m, s, 0, 2, false);
      break;
  }
  return s;
}

VectorXd apply_translation(const Eigen::Vector2d& t, Representation rep, VectorXd s, double k) {
  if (t.isZero(0.0)) return s;
  switch (rep) {
    case Representation::Amplitude:
      rotate_amplitude(s, 0, k * t.x());
      rotate_amplitude(s, 2, k * t.y());
      break;
    case Representation::Full:
      rotate_amplitude(s, 0, k * t.x());
      rotate_amplitude(s, 4, k * t.y());
      break;
    case Representation::Polar:
      s(1) += k * t.x();
      s(5) += k * t.y();
      break;
    case Representation::Pitchfork:
      s(2) += t.x();
      s(3) += t.y();
      break;
    case Representation::Hopf:
      s(4) += t.x();
      s(5) += t.y();
      break;
    default:
      break;  // core forms carry no translation variables
  }
  return s;
}

void check_size(Representation rep, const VectorXd& s) {
  if (s.size() != dimension(rep)) {
    throw InvalidArgument("state size " + std::to_string(s.size()) + " does not match model '" +
                          std::string(to_string(rep)) + "'");
  }
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_product(std::string_view text) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')') --depth;
    if (text[i] == '*' && depth == 0) {
      parts.push_back(trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  parts.push_back(trim(text.substr(start)));
  return parts;
}

std::optional<TemporalShift> parse_shift(std::string_view token) {
  if (token == "th") return TemporalShift::half();
  if (token == "tq") return TemporalShift::quarter();
  if (token == "tq2") return TemporalShift(2, 4);
  if (token == "tq3") return TemporalShift(3, 4);
  return std::nullopt;
}

GroupElement parse_spatial_token(std::string_view token) {
  if (token.size() > 3 && token.substr(0, 2) == "t(" && token.back() == ')') {
    const std::string inner(token.substr(2, token.size() - 3));
    const auto comma = inner.find(',');
    if (comma == std::string::npos) throw InvalidArgument("malformed translation '" + inner + "'");
    try {
      std::size_t used = 0;
      const std::string xs = inner.substr(0, comma), ys = inner.substr(comma + 1);
      const double dx = std::stod(xs, &used);
      if (trim(std::string_view(xs).substr(used)).size()) throw std::invalid_argument(xs);
      const double dy = std::stod(ys, &used);
      if (trim(std::string_view(ys).substr(used)).size()) throw std::invalid_argument(ys);
      return GroupElement::translate(dx, dy);
    } catch (const std::exception&) {
      throw InvalidArgument("malformed translation '" + inner + "'");
    }
  }
  return parse_dihedral(token);
}

}  // namespace

Eigen::Matrix2i matrix(Dihedral d) {
  switch (d) {
    case Dihedral::e: return make(1, 0, 0, 1);
    case Dihedral::rq: return make(0, 1, -1, 0);
    case Dihedral::rq2: return make(-1, 0, 0, -1);
    case Dihedral::rq3: return make(0, -1, 1, 0);
    case Dihedral::mx: return make(-1, 0, 0, 1);
    case Dihedral::my: return make(1, 0, 0, -1);
    case Dihedral::md: return make(0, 1, 1, 0);
    case Dihedral::mdp: return make(0, -1, -1, 0);
  }
  return make(1, 0, 0, 1);
}

Dihedral dihedral_from_matrix(const Eigen::Matrix2i& m) {
  for (Dihedral d : kDihedral) {
    if (matrix(d) == m) return d;
  }
  throw InvalidArgument("matrix is not an element of D4");
}

Dihedral compose(Dihedral a, Dihedral b) { return dihedral_from_matrix(matrix(a) * matrix(b)); }

Dihedral inverse(Dihedral d) { return dihedral_from_matrix(matrix(d).transpose()); }

int order(Dihedral d) {
  int n = 1;
  for (Dihedral p = d; p != Dihedral::e; p = compose(p, d)) ++n;
  return n;
}

bool is_reflection(Dihedral d) { return matrix(d).determinant() < 0; }

GroupElement compose(const GroupElement& a, const GroupElement& b) {
  const Eigen::Vector2d shifted = matrix(a.dihedral).cast<double>() * b.translation;
  return {compose(a.dihedral, b.dihedral), a.translation + shifted};
}

GroupElement inverse(const GroupElement& g) {
  const Dihedral inv = inverse(g.dihedral);
  return {inv, -(matrix(inv).cast<double>() * g.translation)};
}

bool approx_equal(const GroupElement& a, const GroupElement& b, double k, double tol) {
  if (a.dihedral != b.dihedral) return false;
  const double period = kTwoPi / k;
  const Eigen::Vector2d diff = a.translation - b.translation;
  return std::abs(wrap(diff.x(), period)) <= tol && std::abs(wrap(diff.y(), period)) <= tol;
}

TemporalShift::TemporalShift(int num, int den) : numerator(num), denominator(den) {
  if (den != 1 && den != 2 && den != 4) {
    throw InvalidArgument("temporal shift denominator must be 1, 2 or 4");
  }
  numerator = ((num % den) + den) % den;
}

TemporalShift compose(TemporalShift a, TemporalShift b) {
  const int q = (a.quarters() + b.quarters()) % 4;
  if (q == 0) return {0, 1};
  if (q == 2) return {1, 2};
  return {q, 4};
}

SpatioTemporalSymmetry compose(const SpatioTemporalSymmetry& a, const SpatioTemporalSymmetry& b) {
  return {compose(a.spatial, b.spatial), compose(a.temporal, b.temporal)};
}

bool operator==(const SpatioTemporalSymmetry& a, const SpatioTemporalSymmetry& b) {
  return a.temporal == b.temporal && a.spatial.dihedral == b.spatial.dihedral &&
         a.spatial.translation == b.spatial.translation;
}

std::string to_string(Dihedral d) {
  switch (d) {
    case Dihedral::e: return "e";
    case Dihedral::rq: return "rq";
    case Dihedral::rq2: return "rq2";
    case Dihedral::rq3: return "rq3";
    case Dihedral::mx: return "mx";
    case Dihedral::my: return "my";
    case Dihedral::md: return "md";
    case Dihedral::mdp: return "mdp";
  }
  return "?";
}

std::string to_string(const GroupElement& g) {
  const bool translated = !g.translation.isZero(0.0);
  if (!translated) return to_string(g.dihedral);
  std::string out = "t(" + format_real(g.translation.x()) + "," + format_real(g.translation.y()) + ")";
  if (g.dihedral != Dihedral::e) out += "*" + to_string(g.dihedral);
  return out;
}

std::string to_string(const SpatioTemporalSymmetry& s) {
  static constexpr const char* kShift[] = {"", "tq", "th", "tq3"};
  const int q = s.temporal.quarters();
  if (q == 0) return to_string(s.spatial);
  if (s.spatial.dihedral == Dihedral::e && s.spatial.translation.isZero(0.0)) return kShift[q];
  return std::string(kShift[q]) + "*" + to_string(s.spatial);
}

Dihedral parse_dihedral(std::string_view text) {
  text = trim(text);
  for (Dihedral d : kDihedral) {
    if (to_string(d) == text) return d;
  }
  throw InvalidArgument("unknown group element '" + std::string(text) + "'");
}

GroupElement parse_group_element(std::string_view text) {
  GroupElement g;
  for (auto token : split_product(text)) g = compose(g, parse_spatial_token(token));
  return g;
}

SpatioTemporalSymmetry parse_symmetry(std::string_view text) {
  SpatioTemporalSymmetry s;
  for (auto token : split_product(text)) {
    if (auto shift = parse_shift(token)) {
      s.temporal = compose(s.temporal, *shift);
    } else {
      s.spatial = compose(s.spatial, parse_spatial_token(token));
    }
  }
  return s;
}

VectorXd act(const GroupElement& g, Representation rep, const VectorXd& state, double k) {
  check_size(rep, state);
  return apply_translation(g.translation, rep, apply_dihedral(g.dihedral, rep, state), k);
}

VectorXd act_tangent(const GroupElement& g, Representation rep, const VectorXd& tangent, double k) {
  check_size(rep, tangent);
  VectorXd out = apply_dihedral(g.dihedral, rep, tangent);
  // Roll amplitudes transform linearly under translations; phases only shift.
  if (rep == Representation::Amplitude || rep == Representation::Full) {
    out = apply_translation(g.translation, rep, out, k);
  }
  return out;
}

double state_distance(Representation rep, const VectorXd& a, const VectorXd& b, double k) {
  check_size(rep, a);
  check_size(rep, b);
  VectorXd diff = a - b;
  switch (rep) {
    case Representation::Polar:
      diff(1) = wrap(diff(1), kTwoPi);
      diff(5) = wrap(diff(5), kTwoPi);
      break;
    case Representation::Pitchfork:
      diff(2) = wrap(diff(2), kTwoPi / k);
      diff(3) = wrap(diff(3), kTwoPi / k);
      break;
    case Representation::Hopf:
      diff(4) = wrap(diff(4), kTwoPi / k);
      diff(5) = wrap(diff(5), kTwoPi / k);
      break;
    default:
      break;
  }
  return diff.lpNorm<Eigen::Infinity>();
}

double verify_equivariance(Representation rep, const GroupElement& g, const VectorXd& state,
                           const Parameters& params) {
  check_compatible(rep, params);
  const double k = wavenumber(params);
  const VectorXd lhs = rhs(rep, act(g, rep, state, k), params);
  const VectorXd rhs_side = act_tangent(g, rep, rhs(rep, state, params), k);
  return (lhs - rhs_side).lpNorm<Eigen::Infinity>();
}

std::vector<Dihedral> close_subgroup(std::vector<Dihedral> elements) {
  auto contains = [&](Dihedral d) {
    return std::find(elements.begin(), elements.end(), d) != elements.end();
  };
  if (!contains(Dihedral::e)) elements.insert(elements.begin(), Dihedral::e);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < elements.size() && !changed; ++i) {
      for (std::size_t j = 0; j < elements.size() && !changed; ++j) {
        if (!contains(compose(elements[i], elements[j]))) {
          const std::size_t drop = elements[i] == Dihedral::e ? j : i;
          elements.erase(elements.begin() + static_cast<std::ptrdiff_t>(drop));
          changed = true;
        }
      }
    }
  }
  std::sort(elements.begin(), elements.end());
  return elements;
}

std::vector<Dihedral> isotropy_of_state(Representation rep, const VectorXd& state, double tol,
                                        double k) {
  if (!(tol > 0.0)) throw InvalidArgument("isotropy tolerance must be positive");
  check_size(rep, state);
  const double threshold = tol * (1.0 + state.lpNorm<Eigen::Infinity>());
  std::vector<Dihedral> found;
  for (Dihedral d : kDihedral) {
    if (state_distance(rep, act(d, rep, state, k), state, k) <= threshold) found.push_back(d);
  }
  return close_subgroup(std::move(found));
}

PeriodicOrbit act_on_orbit(const SpatioTemporalSymmetry& g, const PeriodicOrbit& orbit, double k) {
  const Eigen::Index n = orbit.size();
  if (n < 8) throw InvalidArgument("orbit needs at least 8 samples");
  if (!(orbit.period > 0.0)) throw InvalidArgument("orbit period must be positive");
  PeriodicOrbit out = orbit;
  const double shift = g.temporal.fraction() * static_cast<double>(n);
  const auto whole = static_cast<Eigen::Index>(std::floor(shift));
  const double frac = shift - static_cast<double>(whole);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index i0 = (j + whole) % n;
    VectorXd v = orbit.samples.col(i0);
    if (frac > 0.0) v = (1.0 - frac) * v + frac * orbit.samples.col((i0 + 1) % n);
    out.samples.col(j) = act(g.spatial, orbit.rep, v, k);
  }
  return out;
}

}  // namespace sqconv
