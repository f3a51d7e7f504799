#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sqconv/random.hpp"
#include "sqconv/types.hpp"

namespace sqconv {

struct CheckResult {
  std::string name;
  double worst = 0.0;
  double tol = 0.0;
  std::size_t cases = 0;
  bool pass = false;
};

struct VerifyOptions {
  std::size_t samples = 1000;     // states for the equivariance check
  std::size_t jacobian_samples = 100;
  double tol = 1e-12;             // equivariance and polar/Cartesian agreement
  double jacobian_tol = 1e-6;     // relative, against central differences
  std::uint64_t seed = 42;
};

/// Equivariance under every element of D4 and a translation, analytic
/// Jacobian against finite differences, and (full/polar) agreement of the two
/// forms under the change of variables.
std::vector<CheckResult> run_verification(Representation model, const Parameters& params,
                                          const VerifyOptions& opts = {});

}  // namespace sqconv
