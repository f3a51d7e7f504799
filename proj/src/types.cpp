#include "sqconv/types.hpp"

#include <array>
#include <cmath>

namespace sqconv {

namespace {

struct RepInfo {
  Representation rep;
  std::string_view name;
  int dim;
  Representation core;
};

constexpr std::array<RepInfo, 9> kReps = {{
    {Representation::Amplitude, "amplitude", 4, Representation::AmplitudeCore},
    {Representation::Full, "full", 8, Representation::ShearCore},
    {Representation::Polar, "polar", 8, Representation::ShearCore},
    {Representation::Pitchfork, "pitchfork", 4, Representation::PitchforkCore},
    {Representation::Hopf, "hopf", 6, Representation::HopfCore},
    {Representation::AmplitudeCore, "amplitude-core", 2, Representation::AmplitudeCore},
    {Representation::ShearCore, "shear-core", 6, Representation::ShearCore},
    {Representation::PitchforkCore, "pitchfork-core", 2, Representation::PitchforkCore},
    {Representation::HopfCore, "hopf-core", 4, Representation::HopfCore},
}};

const RepInfo& info(Representation rep) {
  for (const auto& i : kReps) {
    if (i.rep == rep) return i;
  }
  throw InvalidArgument("unknown representation");
}

}  // namespace

void ModelParams::validate() const {
  if (!(zeta > 0.0)) throw InvalidArgument("zeta must be positive");
  if (!(k > 0.0)) throw InvalidArgument("k must be positive");
  for (double v : {mu, beta, gamma, Q, zeta, D, k}) {
    if (!std::isfinite(v)) throw InvalidArgument("model parameters must be finite");
  }
}

double& ModelParams::operator[](std::string_view name) {
  if (name == "mu") return mu;
  if (name == "beta") return beta;
  if (name == "gamma") return gamma;
  if (name == "Q") return Q;
  if (name == "zeta") return zeta;
  if (name == "D") return D;
  if (name == "k") return k;
  throw InvalidArgument("unknown model parameter '" + std::string(name) + "'");
}

double ModelParams::operator[](std::string_view name) const {
  return const_cast<ModelParams&>(*this)[name];
}

int dimension(Representation rep) { return info(rep).dim; }

bool is_core(Representation rep) { return info(rep).core == rep; }

Representation core_of(Representation rep) { return info(rep).core; }

std::string_view to_string(Representation rep) { return info(rep).name; }

Representation representation_from_string(std::string_view name) {
  for (const auto& i : kReps) {
    if (i.name == name) return i.rep;
  }
  if (name == "cartesian") return Representation::Full;
  throw InvalidArgument("unknown model '" + std::string(name) + "'");
}

std::vector<std::string> field_names(Representation rep) {
  switch (rep) {
    case Representation::Amplitude:
      return {"ax_re", "ax_im", "ay_re", "ay_im"};
    case Representation::Full:
      return {"ax_re", "ax_im", "cx", "dx", "ay_re", "ay_im", "cy", "dy"};
    case Representation::Polar:
      return {"rx", "theta_x", "cx", "dx", "ry", "theta_y", "cy", "dy"};
    case Representation::Pitchfork:
      return {"vx", "vy", "phi_x", "phi_y"};
    case Representation::Hopf:
      return {"vx_re", "vx_im", "vy_re", "vy_im", "phi_x", "phi_y"};
    case Representation::AmplitudeCore:
      return {"rx", "ry"};
    case Representation::ShearCore:
      return {"rx", "cx", "dx", "ry", "cy", "dy"};
    case Representation::PitchforkCore:
      return {"vx", "vy"};
    case Representation::HopfCore:
      return {"vx_re", "vx_im", "vy_re", "vy_im"};
  }
  return {};
}

void check_compatible(Representation rep, const Parameters& params) {
  bool ok = false;
  switch (rep) {
    case Representation::Pitchfork:
    case Representation::PitchforkCore:
      ok = std::holds_alternative<PitchforkParams>(params);
      break;
    case Representation::Hopf:
    case Representation::HopfCore:
      ok = std::holds_alternative<HopfParams>(params);
      break;
    default:
      ok = std::holds_alternative<ModelParams>(params);
      if (ok) std::get<ModelParams>(params).validate();
      break;
  }
  if (!ok) {
    throw InvalidArgument("parameters do not match model '" + std::string(to_string(rep)) + "'");
  }
}

double wavenumber(const Parameters& params) {
  if (const auto* p = std::get_if<ModelParams>(&params)) return p->k;
  return 1.0;
}

}  // namespace sqconv
