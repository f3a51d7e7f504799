#include "sqconv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sqconv/models.hpp"
#include "sqconv/symmetry.hpp"

namespace sqconv {

VectorXd random_state(Representation rep, Rng& rng, double scale) {
  VectorXd s(dimension(rep));
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = uniform(rng, -scale, scale);
  if (rep == Representation::Polar) {
    for (Eigen::Index i : {0, 4}) s(i) = uniform(rng, 0.1, scale);
    for (Eigen::Index i : {1, 5}) s(i) = uniform(rng, -std::numbers::pi, std::numbers::pi);
  }
  return s;
}

namespace {

CheckResult finish(std::string name, double worst, double tol, std::size_t cases) {
  return {std::move(name), worst, tol, cases, worst <= tol};
}

MatrixXd central_differences(Representation rep, const VectorXd& s, const Parameters& params, double h) {
  MatrixXd J(s.size(), s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    VectorXd up = s, down = s;
    up(i) += h;
    down(i) -= h;
    J.col(i) = (rhs(rep, up, params) - rhs(rep, down, params)) / (2.0 * h);
  }
  return J;
}

// Time derivative of the Cartesian state induced by a polar derivative.
VectorXd polar_to_cartesian_rate(const VectorXd& polar, const VectorXd& rate) {
  VectorXd out(8);
  for (int b : {0, 4}) {
    const double r = polar(b), th = polar(b + 1);
    const Complex a_dot = (rate(b) + Complex(0.0, r * rate(b + 1))) * std::polar(1.0, th);
    out(b) = a_dot.real();
    out(b + 1) = a_dot.imag();
    out(b + 2) = rate(b + 2);
    out(b + 3) = rate(b + 3);
  }
  return out;
}

}  // namespace

std::vector<CheckResult> run_verification(Representation model, const Parameters& params,
                                          const VerifyOptions& opts) {
  check_compatible(model, params);
  Rng rng(opts.seed);
  std::vector<CheckResult> out;

  std::vector<GroupElement> generators(kDihedral.begin(), kDihedral.end());
  generators.push_back(GroupElement::translate(0.7, 0.3));
  double worst = 0.0;
  for (std::size_t i = 0; i < opts.samples; ++i) {
    const VectorXd s = random_state(model, rng);
    for (const auto& g : generators) worst = std::max(worst, verify_equivariance(model, g, s, params));
  }
  out.push_back(finish("equivariance", worst, opts.tol, opts.samples * generators.size()));

  worst = 0.0;
  for (std::size_t i = 0; i < opts.jacobian_samples; ++i) {
    const VectorXd s = random_state(model, rng);
    const MatrixXd J = jacobian(model, s, params);
    const MatrixXd fd = central_differences(model, s, params, 1e-6);
    worst = std::max(worst, (J - fd).lpNorm<Eigen::Infinity>() / std::max(1.0, J.lpNorm<Eigen::Infinity>()));
  }
  out.push_back(finish("jacobian", worst, opts.jacobian_tol, opts.jacobian_samples));

  if (model == Representation::Full || model == Representation::Polar) {
    worst = 0.0;
    for (std::size_t i = 0; i < opts.samples; ++i) {
      const VectorXd polar = random_state(Representation::Polar, rng);
      const VectorXd cart = to_cartesian(PolarState::unpack(polar)).pack();
      const VectorXd expected = polar_to_cartesian_rate(polar, rhs(Representation::Polar, polar, params));
      worst = std::max(worst, (rhs(Representation::Full, cart, params) - expected).lpNorm<Eigen::Infinity>());
    }
    out.push_back(finish("polar-cartesian", worst, opts.tol, opts.samples));
  }
  return out;
}

}  // namespace sqconv
