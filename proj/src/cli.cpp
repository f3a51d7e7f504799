#include "sqconv/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "sqconv/classify.hpp"
#include "sqconv/equilibrium.hpp"
#include "sqconv/figure2.hpp"
#include "sqconv/io.hpp"
#include "sqconv/models.hpp"
#include "sqconv/orbit.hpp"
#include "sqconv/random.hpp"
#include "sqconv/sweep.hpp"
#include "sqconv/verify.hpp"

namespace sqconv {

namespace {

struct Options {
  std::string model = "full";
  std::string params;
  std::string config;
  std::uint64_t seed = 42;
  double t_end = 100.0;
  double dt_out = 0.1;
  std::string out;
  std::string form;
  double tol = 0.0;  // 0 = command default
  std::size_t samples = 1000;
  std::string initial = "perturbed";
  std::string subspace = "none";
  double transient = 200.0;
  std::string input;
  std::string name = "mu";
  double lo = 0.1, hi = 1.4, step = 0.01;
  std::string events;
  int trials = 10;
};

Representation model_of(const Options& o) {
  Representation rep = representation_from_string(o.model);
  if (!o.form.empty()) {
    if (rep != Representation::Full && rep != Representation::Polar)
      throw InvalidArgument("--form applies to the full/polar model only");
    if (o.form == "cartesian") rep = Representation::Full;
    else if (o.form == "polar") rep = Representation::Polar;
    else throw InvalidArgument("--form must be cartesian or polar");
  }
  if (is_core(rep)) throw InvalidArgument("--model must be one of amplitude, full, polar, pitchfork, hopf");
  return rep;
}

Parameters params_of(const Options& o, Representation rep) {
  if (!o.params.empty()) return load_params(o.params, rep);
  return params_from_json(Json::object(), rep);
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write '" + path + "'");
  f << content;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// Initial condition: a JSON array (full model state), a named closed-form
// state, or "perturbed" (uniform +-0.1 on the core around squares, or
// around the origin for the normal forms).
VectorXd initial_state(const std::string& spec, Representation rep, const Parameters& params, Rng& rng) {
  const auto first = spec.find_first_not_of(" \t");
  if (first != std::string::npos && spec[first] == '[') {
    const VectorXd s = vector_from_json(Json::parse(spec));
    if (s.size() != dimension(rep)) throw InvalidArgument("--initial has the wrong dimension for this model");
    return s;
  }
  const bool convection = std::holds_alternative<ModelParams>(params);
  const Representation core = core_of(rep);
  VectorXd base = VectorXd::Zero(dimension(core));
  if (spec == "zero") return VectorXd::Zero(dimension(rep));
  if (convection) {
    const auto& p = std::get<ModelParams>(params);
    VectorXd shear;
    if (spec == "squares" || spec == "perturbed") shear = squares_core(p);
    else if (spec == "tsq" || spec == "dtsq") {
      const auto t = spec == "tsq" ? tsq_branch(p) : dtsq_branch(p);
      if (!t.exists) throw InvalidArgument(spec + " does not exist: " + t.reason);
      shear = t.core;
    } else {
      throw InvalidArgument("unknown --initial '" + spec + "'");
    }
    base = core == Representation::AmplitudeCore ? VectorXd(Eigen::Vector2d(shear(0), shear(3))) : shear;
  } else if (spec != "perturbed") {
    const auto branches = std::holds_alternative<PitchforkParams>(params)
                              ? nf_branches(std::get<PitchforkParams>(params))
                              : nf_branches(std::get<HopfParams>(params));
    const BranchLabel want = branch_label_from_string(spec);
    auto it = std::find_if(branches.begin(), branches.end(), [&](const auto& b) { return b.label == want; });
    if (it == branches.end() || !it->exists) throw InvalidArgument("no " + spec + " branch at these parameters");
    base = it->core;
  }
  if (spec == "perturbed")
    for (Eigen::Index i = 0; i < base.size(); ++i) base(i) += uniform(rng, -0.1, 0.1);
  return lift(rep, base, VectorXd::Zero(dimension(rep)));
}

std::vector<double> output_grid(double t_end, double dt) {
  if (!(t_end >= 0.0)) throw InvalidArgument("--t-end must be non-negative");
  if (!(dt > 0.0)) throw InvalidArgument("--dt-out must be positive");
  std::vector<double> times;
  for (long i = 0;; ++i) {
    const double t = static_cast<double>(i) * dt;
    if (t > t_end * (1.0 + 1e-12)) break;
    times.push_back(std::min(t, t_end));
  }
  if (times.back() < t_end) times.push_back(t_end);
  return times;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  RunConfig cfg;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw InvalidArgument("cannot read config '" + o.config + "'");
    cfg = run_config_from_json(Json::parse(in));
  } else {
    cfg.model = model_of(o);
    cfg.params = params_of(o, cfg.model);
    cfg.seed = o.seed;
    cfg.t_end = o.t_end;
    cfg.dt_out = o.dt_out;
    cfg.out = o.out;
  }
  Rng rng(cfg.seed);
  const VectorXd x0 = initial_state(o.initial, cfg.model, cfg.params, rng);
  const auto times = output_grid(cfg.t_end, cfg.dt_out);
  const Trajectory traj = integrate(cfg.model, cfg.params, x0, 0.0, cfg.t_end, cfg.integrator, times);
  std::ostringstream ss;
  write_trajectory_csv(ss, traj);
  emit(cfg.out, ss.str(), out);
  return kExitOk;
}

int cmd_equilibria(const Options& o, std::ostream& out) {
  const Representation rep = model_of(o);
  const Parameters params = params_of(o, rep);
  std::vector<std::pair<std::string, VectorXd>> seeds;
  const Representation core = core_of(rep);
  seeds.emplace_back("trivial", VectorXd::Zero(dimension(core)));
  if (const auto* p = std::get_if<ModelParams>(&params)) {
    auto to_core = [&](const VectorXd& shear) {
      return core == Representation::AmplitudeCore ? VectorXd(Eigen::Vector2d(shear(0), shear(3))) : shear;
    };
    if (p->mu > 0.0) {
      VectorXd rolls = VectorXd::Zero(6);
      rolls(0) = std::sqrt(p->mu);
      seeds.emplace_back("rolls", to_core(rolls));
      if (p->beta > -2.0) seeds.emplace_back("squares", to_core(squares_core(*p)));
    }
    if (core == Representation::ShearCore) {
      if (const auto t = tsq_branch(*p); t.exists) seeds.emplace_back("tsq", t.core);
      if (const auto t = dtsq_branch(*p); t.exists) seeds.emplace_back("dtsq", t.core);
    }
  } else if (const auto* p = std::get_if<PitchforkParams>(&params)) {
    for (const auto& b : nf_branches(*p))
      if (b.exists) seeds.emplace_back(std::string(to_string(b.label)), b.core);
  }
  Json list = Json::array();
  bool any_failure = false;
  for (const auto& [name, seed] : seeds) {
    const VectorXd guess = lift(rep, seed, VectorXd::Zero(dimension(rep)));
    const EquilibriumResult eq = find_equilibrium(rep, guess, params);
    Json j = {{"seed", name}};
    j.update(to_json(eq));
    if (eq.converged) {
      j["classification"] = to_json(classify_equilibrium(rep, eq.state, params));
      const Eigen::Vector2d rate = drift_rate(rep, eq.state, params);
      j["drift_rate"] = {rate.x(), rate.y()};
    } else {
      any_failure = true;
    }
    list.push_back(std::move(j));
  }
  emit(o.out, dump(list), out);
  return any_failure ? kExitNumerical : kExitOk;
}

MatrixXd subspace_of(const std::string& name, Representation core) {
  if (name == "none" || name.empty()) return {};
  return fixed_subspace(core, parse_dihedral(name));
}

Json orbit_report(const PeriodicOrbit& orbit, const Parameters& params, double tol) {
  const SolutionLabel label = classify_orbit(orbit, tol);
  const DriftProfile drift = drift_profile(orbit, params);
  Json j = {{"classification", to_json(label)},
            {"drift", to_json(drift)},
            {"stability", std::string(to_string(orbit_stability(nontrivial_multipliers(orbit.floquet_multipliers))))}};
  if (drift.phases.cols() > 4 && (drift.phases.cols() - 1) % 4 == 0) {
    const DriftCycle cycle = cyclic_drift_pattern(drift);
    j["drift_cycle"] = {{"alternating", cycle.alternating}, {"circulation", cycle.circulation}};
  }
  j["orbit"] = orbit_to_json(orbit);
  return j;
}

int cmd_orbit(const Options& o, std::ostream& out) {
  const Representation rep = model_of(o);
  const Parameters params = params_of(o, rep);
  Rng rng(o.seed);
  const VectorXd x0 = initial_state(o.initial, rep, params, rng);
  HuntOptions ho;
  ho.transient = o.transient;
  ho.shooting.subspace = subspace_of(o.subspace, core_of(rep));
  const PeriodicOrbit orbit = orbit_from_transient(rep, params, x0, ho);
  emit(o.out, dump(orbit_report(orbit, params, o.tol > 0.0 ? o.tol : 1e-6)), out);
  return kExitOk;
}

int cmd_classify(const Options& o, std::ostream& out) {
  if (o.input.empty()) throw InvalidArgument("classify needs --input <trajectory.csv|orbit.json>");
  std::ifstream in(o.input);
  if (!in) throw InvalidArgument("cannot read '" + o.input + "'");
  const double tol = o.tol > 0.0 ? o.tol : 1e-6;
  Json report;
  if (o.input.size() >= 4 && o.input.substr(o.input.size() - 4) == ".csv") {
    const Trajectory traj = read_trajectory_csv(in);
    if (traj.size() == 0) throw InvalidArgument("empty trajectory");
    const Representation rep = traj.rep;
    const Parameters params = params_of(o, rep);
    const VectorXd last = traj.states.back();
    const double residual = rhs(core_of(rep), reduce(rep, last), params).lpNorm<Eigen::Infinity>();
    if (residual <= kEquilibriumResidual) {
      report = {{"kind", "equilibrium"}, {"classification", to_json(classify_equilibrium(rep, last, params, 1e-8))}};
      const Eigen::Vector2d rate = drift_rate(rep, last, params);
      report["drift_rate"] = {rate.x(), rate.y()};
    } else {
      HuntOptions ho;
      ho.transient = 0.0;
      report = orbit_report(orbit_from_transient(rep, params, last, ho), params, tol);
      report["kind"] = "orbit";
    }
  } else {
    Json j = Json::parse(in);
    const PeriodicOrbit orbit = orbit_from_json(j.contains("orbit") ? j["orbit"] : j);
    const Parameters params = params_of(o, orbit.rep);
    report = orbit_report(orbit, params, tol);
    report["kind"] = "orbit";
  }
  emit(o.out, dump(report), out);
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const Representation rep = model_of(o);
  const Parameters params = params_of(o, rep);
  if (!std::holds_alternative<ModelParams>(params)) throw InvalidArgument("sweep follows the convection models only");
  const SweepResult sweep = sweep_parameter(rep, std::get<ModelParams>(params), o.name, o.lo, o.hi, o.step);
  std::ostringstream csv;
  write_sweep_csv(csv, sweep);
  emit(o.out, csv.str(), out);
  const auto events = sweep.points.size() >= 2 ? detect_bifurcations(sweep) : std::vector<BifurcationEvent>{};
  emit(o.events, dump(events_to_json(events)), out);
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  std::vector<Representation> models;
  if (o.model == "all") models.assign(std::begin(kModels), std::end(kModels));
  else models.push_back(model_of(o));
  VerifyOptions vo;
  vo.samples = o.samples;
  vo.seed = o.seed;
  if (o.tol > 0.0) vo.tol = o.tol;
  bool ok = true;
  std::ostringstream report;
  for (Representation rep : models) {
    const Parameters params = params_of(o, rep);
    for (const auto& c : run_verification(rep, params, vo)) {
      ok = ok && c.pass;
      report << (c.pass ? "PASS " : "FAIL ") << to_string(rep) << ' ' << c.name << " worst=" << format_double(c.worst)
             << " tol=" << format_double(c.tol) << " cases=" << c.cases << '\n';
    }
  }
  emit(o.out, report.str(), out);
  return ok ? kExitOk : kExitNumerical;
}

int cmd_branches(const Options& o, std::ostream& out) {
  const Representation rep = model_of(o);
  const Parameters params = params_of(o, rep);
  Json j = {{"model", std::string(to_string(rep))}, {"params", to_json(params)}};
  if (const auto* p = std::get_if<ModelParams>(&params)) {
    const Thresholds t = thresholds(*p);
    j["thresholds"] = {{"mu_pitchfork", t.mu_pitchfork},
                       {"mu_hopf", t.hopf_exists ? Json(t.mu_hopf) : Json(nullptr)},
                       {"hopf_exists", t.hopf_exists},
                       {"omega_hopf", t.hopf_exists ? Json(t.omega_hopf) : Json(nullptr)},
                       {"takens_bogdanov", {{"mu", t.tb_mu}, {"Q", t.tb_Q}}}};
    const PrimaryBranches pb = primary_branches(*p);
    j["primary"] = {{"rolls", {{"amplitude_sq", pb.rolls_amplitude_sq}, {"stable", pb.rolls_stable}}},
                    {"squares",
                     {{"exists", pb.squares_exist},
                      {"amplitude_sq", pb.squares_exist ? Json(pb.squares_amplitude_sq) : Json(nullptr)},
                      {"stable", pb.squares_stable}}}};
    auto travelling = [](const TravellingSquares& t) {
      Json b = {{"exists", t.exists}};
      if (t.exists) {
        b["rx"] = t.rx;
        b["ry"] = t.ry;
        b["c"] = t.c;
        b["drift"] = {t.drift.x(), t.drift.y()};
      } else {
        b["reason"] = t.reason;
      }
      return b;
    };
    j["tsq"] = travelling(tsq_branch(*p));
    j["dtsq"] = travelling(dtsq_branch(*p));
  } else {
    const auto branches = std::holds_alternative<PitchforkParams>(params)
                              ? nf_branches(std::get<PitchforkParams>(params))
                              : nf_branches(std::get<HopfParams>(params));
    Json list = Json::array();
    for (const auto& b : branches) {
      Json e = {{"label", std::string(to_string(b.label))},
                {"exists", b.exists},
                {"degenerate", b.degenerate},
                {"amplitude_sq", b.degenerate ? Json(nullptr) : Json(b.amplitude_sq)}};
      if (b.frequency) e["frequency"] = *b.frequency;
      list.push_back(std::move(e));
    }
    j["branches"] = list;
  }
  emit(o.out, dump(j), out);
  return kExitOk;
}

Json orbit_summary(const OrbitReport& r) {
  if (!r.found) return {{"found", false}, {"failure", r.failure}};
  double top = 0.0;
  for (const Complex& m : nontrivial_multipliers(r.orbit.floquet_multipliers)) top = std::max(top, std::abs(m));
  Json j = {{"found", true},
            {"period", r.orbit.period},
            {"residual", r.orbit.residual},
            {"classification", to_json(r.label)},
            {"stability", std::string(to_string(r.stability))},
            {"max_nontrivial_multiplier", top},
            {"drift", to_json(r.drift)}};
  return j;
}

int cmd_figure2(const Options& o, std::ostream& out) {
  Figure2Options fo;
  if (!o.params.empty()) fo.params = std::get<ModelParams>(load_params(o.params, Representation::Full));
  fo.seed = o.seed;
  fo.trials = o.trials;
  if (o.tol > 0.0) fo.classify_tol = o.tol;
  const Figure2Report r = reproduce_figure2(fo);
  Json trials = Json::array();
  for (const auto& t : r.trials) trials.push_back(orbit_summary(t));
  const Json j = {{"params", to_json(Parameters(fo.params))},
                  {"seed", fo.seed},
                  {"events", events_to_json(r.events)},
                  {"trials", trials},
                  {"psq", orbit_summary(r.psq)},
                  {"dpsq", orbit_summary(r.dpsq)}};
  emit(o.out, dump(j), out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Square-pattern convection: simulation, symmetry classification and bifurcation sweeps", "sqconv"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--params", o.params, "parameters: inline JSON or a JSON file");
    sub->add_option("--model", o.model, "amplitude | full | polar | pitchfork | hopf");
    sub->add_option("--seed", o.seed, "seed of the 64-bit Mersenne Twister");
    sub->add_option("--out", o.out, "output file (default: stdout)");
    sub->add_option("--tol", o.tol, "tolerance");
  };
  auto* simulate = app.add_subcommand("simulate", "integrate and write a trajectory CSV");
  common(simulate);
  simulate->add_option("--t-end", o.t_end, "final time");
  simulate->add_option("--dt-out", o.dt_out, "output spacing");
  simulate->add_option("--form", o.form, "cartesian | polar");
  simulate->add_option("--initial", o.initial, "state as JSON array, or zero|squares|tsq|dtsq|perturbed|<nf label>");
  simulate->add_option("--config", o.config, "run configuration JSON (replaces the other flags)");

  auto* equilibria = app.add_subcommand("equilibria", "refine and classify the closed-form equilibria");
  common(equilibria);
  equilibria->add_option("--form", o.form, "cartesian | polar");

  auto* orbit = app.add_subcommand("orbit", "find, refine and classify a periodic orbit");
  common(orbit);
  orbit->add_option("--form", o.form, "cartesian | polar");
  orbit->add_option("--initial", o.initial, "initial state (see simulate)");
  orbit->add_option("--subspace", o.subspace, "none, or the reflection whose fixed subspace is used (my, md, ...)");
  orbit->add_option("--transient", o.transient, "time discarded before the period estimate");

  auto* classify = app.add_subcommand("classify", "label a stored trajectory (CSV) or orbit (JSON)");
  common(classify);
  classify->add_option("--input", o.input, "trajectory CSV or orbit JSON")->required();

  auto* sweep = app.add_subcommand("sweep", "continue squares over a parameter range and detect bifurcations");
  common(sweep);
  sweep->add_option("--name", o.name, "parameter to vary");
  sweep->add_option("--lo", o.lo, "first value");
  sweep->add_option("--hi", o.hi, "last value");
  sweep->add_option("--step", o.step, "spacing");
  sweep->add_option("--events", o.events, "bifurcation report JSON (default: stdout)");

  auto* verify = app.add_subcommand("verify", "equivariance, Jacobian and change-of-variables checks");
  common(verify);
  verify->add_option("--samples", o.samples, "random states for the equivariance check");

  auto* branches = app.add_subcommand("branches", "closed-form thresholds and branch table");
  common(branches);

  auto* figure2 = app.add_subcommand("figure2", "reproduce the oscillatory square-pattern scenario");
  common(figure2);
  figure2->add_option("--trials", o.trials, "random initial conditions");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (equilibria->parsed()) return cmd_equilibria(o, out);
    if (orbit->parsed()) return cmd_orbit(o, out);
    if (classify->parsed()) return cmd_classify(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
    if (branches->parsed()) return cmd_branches(o, out);
    if (figure2->parsed()) return cmd_figure2(o, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace sqconv
