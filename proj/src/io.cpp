#include "sqconv/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace sqconv {

namespace {

double parse_number(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

double number(const Json& j, const std::string& key) {
  if (!j.is_number()) throw InvalidArgument("'" + key + "' must be a number");
  return j.get<double>();
}

Complex complex_value(const Json& j, const std::string& key) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw InvalidArgument("'" + key + "' must be a number or [re, im]");
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

void require_object(const Json& j, const char* what) {
  if (!j.is_object()) throw InvalidArgument(std::string(what) + " must be a JSON object");
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const char* what) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) throw InvalidArgument(std::string("unknown ") + what + " key '" + key + "'");
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string_view method_name(Method m) { return m == Method::RK4 ? "rk4" : "dopri5"; }

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json to_json(const Parameters& params) {
  return std::visit(
      [](const auto& p) -> Json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ModelParams>) {
          return {{"mu", p.mu}, {"beta", p.beta}, {"gamma", p.gamma}, {"Q", p.Q},
                  {"zeta", p.zeta}, {"D", p.D}, {"k", p.k}};
        } else if constexpr (std::is_same_v<T, PitchforkParams>) {
          return {{"lambda", p.lambda}, {"A", p.A}, {"B", p.B}, {"D", p.D}};
        } else {
          return {{"lambda", p.lambda}, {"omega", p.omega}, {"A", complex_json(p.A)},
                  {"B", complex_json(p.B)}, {"C", complex_json(p.C)}, {"D", complex_json(p.D)}};
        }
      },
      params);
}

Parameters params_from_json(const Json& j, Representation model) {
  require_object(j, "parameters");
  switch (core_of(model)) {
    case Representation::PitchforkCore: {
      reject_unknown(j, {"lambda", "A", "B", "D"}, "parameter");
      PitchforkParams p;
      if (j.contains("lambda")) p.lambda = number(j["lambda"], "lambda");
      if (j.contains("A")) p.A = number(j["A"], "A");
      if (j.contains("B")) p.B = number(j["B"], "B");
      if (j.contains("D")) p.D = number(j["D"], "D");
      return p;
    }
    case Representation::HopfCore: {
      reject_unknown(j, {"lambda", "omega", "A", "B", "C", "D"}, "parameter");
      HopfParams p;
      if (j.contains("lambda")) p.lambda = number(j["lambda"], "lambda");
      if (j.contains("omega")) p.omega = number(j["omega"], "omega");
      if (j.contains("A")) p.A = complex_value(j["A"], "A");
      if (j.contains("B")) p.B = complex_value(j["B"], "B");
      if (j.contains("C")) p.C = complex_value(j["C"], "C");
      if (j.contains("D")) p.D = complex_value(j["D"], "D");
      return p;
    }
    default: {
      reject_unknown(j, {"mu", "beta", "gamma", "Q", "zeta", "D", "k"}, "parameter");
      ModelParams p;
      for (const auto& [key, value] : j.items()) p[key] = number(value, key);
      p.validate();
      return p;
    }
  }
}

Parameters load_params(const std::string& text_or_path, Representation model) {
  std::string text = text_or_path;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') {
    std::ifstream in(text_or_path);
    if (!in) throw InvalidArgument("cannot read parameter file '" + text_or_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(std::string("malformed parameter JSON: ") + e.what());
  }
  return params_from_json(j, model);
}

Json to_json(const ComplexList& values) {
  Json out = Json::array();
  for (const Complex& z : values) out.push_back(complex_json(z));
  return out;
}

ComplexList complex_list_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("expected a list of [re, im] pairs");
  ComplexList out;
  for (const auto& z : j) out.push_back(complex_value(z, "multiplier"));
  return out;
}

Json to_json(const VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("expected a list of numbers");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], "state entry");
  return v;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  for (const auto& f : field_names(traj.rep)) os << ',' << f;
  os << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << format_double(traj.times[i]);
    for (Eigen::Index c = 0; c < traj.states[i].size(); ++c) os << ',' << format_double(traj.states[i](c));
    os << '\n';
  }
}

std::vector<std::vector<std::string>> read_csv(std::istream& is) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split(line, ','));
  }
  return rows;
}

Trajectory read_trajectory_csv(std::istream& is) {
  const auto rows = read_csv(is);
  if (rows.empty() || rows[0].empty() || rows[0][0] != "t") throw InvalidArgument("trajectory CSV needs a 't,...' header");
  const std::vector<std::string> fields(rows[0].begin() + 1, rows[0].end());
  std::optional<Representation> rep;
  for (Representation r : {Representation::Amplitude, Representation::Full, Representation::Polar,
                           Representation::Pitchfork, Representation::Hopf, Representation::AmplitudeCore,
                           Representation::ShearCore, Representation::PitchforkCore, Representation::HopfCore}) {
    if (field_names(r) == fields) rep = r;
  }
  if (!rep) throw InvalidArgument("trajectory CSV header matches no state layout");
  Trajectory traj;
  traj.rep = *rep;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != fields.size() + 1) throw InvalidArgument("ragged trajectory CSV row " + std::to_string(i));
    traj.times.push_back(parse_number(rows[i][0]));
    VectorXd s(static_cast<Eigen::Index>(fields.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) s(static_cast<Eigen::Index>(c)) = parse_number(rows[i][c + 1]);
    traj.states.push_back(std::move(s));
  }
  for (std::size_t i = 1; i < traj.times.size(); ++i)
    if (!(traj.times[i] > traj.times[i - 1])) throw InvalidArgument("trajectory times must increase");
  return traj;
}

Json orbit_to_json(const PeriodicOrbit& orbit) {
  Json samples = Json::array();
  for (Eigen::Index j = 0; j < orbit.size(); ++j) samples.push_back(to_json(VectorXd(orbit.samples.col(j))));
  return {{"model", std::string(to_string(orbit.rep))},
          {"period", orbit.period},
          {"residual", orbit.residual},
          {"multipliers", to_json(orbit.floquet_multipliers)},
          {"samples", samples}};
}

PeriodicOrbit orbit_from_json(const Json& j) {
  require_object(j, "orbit");
  for (const char* key : {"period", "samples"})
    if (!j.contains(key)) throw InvalidArgument(std::string("orbit JSON lacks '") + key + "'");
  PeriodicOrbit orbit;
  if (j.contains("model")) orbit.rep = representation_from_string(j["model"].get<std::string>());
  orbit.period = number(j["period"], "period");
  if (j.contains("residual")) orbit.residual = number(j["residual"], "residual");
  if (j.contains("multipliers")) orbit.floquet_multipliers = complex_list_from_json(j["multipliers"]);
  const Json& samples = j["samples"];
  if (!samples.is_array() || samples.empty()) throw InvalidArgument("orbit samples must be a non-empty list");
  const Eigen::Index dim = dimension(orbit.rep);
  orbit.samples.resize(dim, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t c = 0; c < samples.size(); ++c) {
    const VectorXd s = vector_from_json(samples[c]);
    if (s.size() != dim) throw InvalidArgument("orbit sample has the wrong dimension");
    orbit.samples.col(static_cast<Eigen::Index>(c)) = s;
  }
  return orbit;
}

Json to_json(const SpatioTemporalSymmetry& s) { return to_string(s); }

Json to_json(const SolutionLabel& label) {
  Json gens = Json::array(), iso = Json::array();
  for (const auto& g : label.generators) gens.push_back(to_string(g));
  for (const auto& g : label.isotropy) iso.push_back(to_string(g));
  Json out = {{"label", std::string(to_string(label.label))},
              {"generators", gens},
              {"isotropy", iso},
              {"conjugator", to_string(label.conjugator)},
              {"residual", label.residual}};
  if (label.label == BranchLabel::APW) out["circulation"] = label.circulation;
  return out;
}

Json to_json(const DriftProfile& drift) {
  Json quarters = Json::array();
  for (const auto& q : drift.quarters) quarters.push_back({q.x(), q.y()});
  return {{"net", {drift.net.x(), drift.net.y()}},
          {"rate", {drift.rate.x(), drift.rate.y()}},
          {"quarters", quarters},
          {"peak_excursion", {drift.peak_excursion.x(), drift.peak_excursion.y()}}};
}

Json to_json(const EquilibriumResult& eq) {
  return {{"model", std::string(to_string(eq.rep))},
          {"state", to_json(eq.state)},
          {"core", to_json(eq.core)},
          {"converged", eq.converged},
          {"status", std::string(to_string(eq.status))},
          {"residual", eq.residual_norm},
          {"eigenvalues", to_json(eq.eigenvalues)}};
}

Json to_json(const BifurcationEvent& ev) {
  return {{"kind", std::string(to_string(ev.kind))},
          {"parameter", ev.parameter},
          {"value", ev.value},
          {"frequency", ev.frequency},
          {"critical", to_json(ev.critical)},
          {"unstable_before", ev.unstable_before},
          {"unstable_after", ev.unstable_after}};
}

BifurcationEvent event_from_json(const Json& j) {
  require_object(j, "event");
  reject_unknown(j, {"kind", "parameter", "value", "frequency", "critical", "unstable_before", "unstable_after"},
                 "event");
  BifurcationEvent ev;
  ev.kind = event_kind_from_string(j.at("kind").get<std::string>());
  ev.parameter = j.at("parameter").get<std::string>();
  ev.value = number(j.at("value"), "value");
  if (j.contains("frequency")) ev.frequency = number(j["frequency"], "frequency");
  if (j.contains("critical")) ev.critical = complex_list_from_json(j["critical"]);
  if (j.contains("unstable_before")) ev.unstable_before = j["unstable_before"].get<int>();
  if (j.contains("unstable_after")) ev.unstable_after = j["unstable_after"].get<int>();
  return ev;
}

Json events_to_json(const std::vector<BifurcationEvent>& events) {
  Json out = Json::array();
  for (const auto& ev : events) out.push_back(to_json(ev));
  return out;
}

Json to_json(const BranchData& branch) {
  Json points = Json::array();
  for (const auto& pt : branch.points) {
    Json p = {{"value", pt.value},
              {"amplitude", pt.amplitude},
              {"label", std::string(to_string(pt.label))},
              {"stability", std::string(to_string(pt.stability))},
              {"state", to_json(pt.state)},
              {"spectrum", to_json(pt.spectrum)}};
    if (pt.orbit) p["period"] = pt.orbit->period;
    points.push_back(std::move(p));
  }
  return {{"origin", to_json(branch.origin)},
          {"completed", branch.completed},
          {"stop_reason", branch.stop_reason},
          {"points", points}};
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  const auto fields = field_names(core_of(sweep.model));
  os << sweep.parameter;
  for (const auto& f : fields) os << ',' << f;
  os << ",lead_re,lead_im,unstable,label,converged\n";
  for (const auto& pt : sweep.points) {
    os << format_double(pt.value);
    for (std::size_t i = 0; i < fields.size(); ++i)
      os << ',' << (pt.converged ? format_double(pt.state(static_cast<Eigen::Index>(i))) : "nan");
    const Complex lead = pt.eigenvalues.empty() ? Complex(std::nan(""), std::nan("")) : pt.eigenvalues.front();
    os << ',' << format_double(lead.real()) << ',' << format_double(lead.imag()) << ',' << pt.unstable << ','
       << (pt.converged ? to_string(pt.label) : "none") << ',' << (pt.converged ? 1 : 0) << '\n';
  }
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  const auto& x = a.integrator;
  const auto& y = b.integrator;
  return a.model == b.model && a.params == b.params && x.method == y.method && x.abs_tol == y.abs_tol &&
         x.rel_tol == y.rel_tol && x.max_step == y.max_step && x.initial_step == y.initial_step &&
         x.max_steps == y.max_steps && a.seed == b.seed && a.t_end == b.t_end && a.dt_out == b.dt_out &&
         a.tol == b.tol && a.out == b.out;
}

Json to_json(const RunConfig& cfg) {
  const auto& ic = cfg.integrator;
  return {{"model", std::string(to_string(cfg.model))},
          {"params", to_json(cfg.params)},
          {"integrator",
           {{"method", std::string(method_name(ic.method))},
            {"abs_tol", ic.abs_tol},
            {"rel_tol", ic.rel_tol},
            {"max_step", ic.max_step},
            {"initial_step", ic.initial_step},
            {"max_steps", ic.max_steps}}},
          {"seed", cfg.seed},
          {"t_end", cfg.t_end},
          {"dt_out", cfg.dt_out},
          {"tol", cfg.tol},
          {"out", cfg.out}};
}

RunConfig run_config_from_json(const Json& j) {
  require_object(j, "run config");
  reject_unknown(j, {"model", "params", "integrator", "seed", "t_end", "dt_out", "tol", "out"}, "run config");
  RunConfig cfg;
  if (j.contains("model")) cfg.model = representation_from_string(j["model"].get<std::string>());
  cfg.params = j.contains("params") ? params_from_json(j["params"], cfg.model)
                                    : params_from_json(Json::object(), cfg.model);
  if (j.contains("integrator")) {
    const Json& ij = j["integrator"];
    require_object(ij, "integrator");
    reject_unknown(ij, {"method", "abs_tol", "rel_tol", "max_step", "initial_step", "max_steps"}, "integrator");
    auto& ic = cfg.integrator;
    if (ij.contains("method")) {
      const auto m = ij["method"].get<std::string>();
      if (m == "rk4") ic.method = Method::RK4;
      else if (m == "dopri5") ic.method = Method::DormandPrince;
      else throw InvalidArgument("unknown integrator method '" + m + "'");
    }
    if (ij.contains("abs_tol")) ic.abs_tol = number(ij["abs_tol"], "abs_tol");
    if (ij.contains("rel_tol")) ic.rel_tol = number(ij["rel_tol"], "rel_tol");
    if (ij.contains("max_step")) ic.max_step = number(ij["max_step"], "max_step");
    if (ij.contains("initial_step")) ic.initial_step = number(ij["initial_step"], "initial_step");
    if (ij.contains("max_steps")) ic.max_steps = ij["max_steps"].get<long>();
    ic.validate();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) throw InvalidArgument("seed must be an integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("t_end")) cfg.t_end = number(j["t_end"], "t_end");
  if (j.contains("dt_out")) cfg.dt_out = number(j["dt_out"], "dt_out");
  if (j.contains("tol")) cfg.tol = number(j["tol"], "tol");
  if (j.contains("out")) cfg.out = j["out"].get<std::string>();
  return cfg;
}

}  // namespace sqconv
