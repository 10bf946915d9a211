#include "curvflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "curvflow/errors.hpp"

namespace curvflow {

const char* to_string(RunMode m) {
  return m == RunMode::flow ? "flow" : "solve";
}

namespace {

using nlohmann::json;

// Strict object view: every key must be consumed exactly once; finish()
// rejects anything left over, naming the full path.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  const std::string& path() const { return path_; }

  const json* take(const char* key) {
    seen_.push_back(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  bool has(const char* key) const { return j_.contains(key); }

  double number(const char* key, double fallback) {
    const json* v = take(key);
    return v ? as_number(*v, key) : fallback;
  }

  double require_number(const char* key) {
    const json* v = take(key);
    if (!v) throw ConfigError(path_ + ": missing required key \"" + key + "\"");
    return as_number(*v, key);
  }

  long integer(const char* key, long fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_number_integer())
      throw ConfigError(path_ + "." + key + ": expected an integer");
    return v->get<long>();
  }

  bool boolean(const char* key, bool fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_boolean())
      throw ConfigError(path_ + "." + key + ": expected true/false");
    return v->get<bool>();
  }

  std::string text(const char* key, const std::string& fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    return as_text(*v, key);
  }

  std::string require_text(const char* key) {
    const json* v = take(key);
    if (!v) throw ConfigError(path_ + ": missing required key \"" + key + "\"");
    return as_text(*v, key);
  }

  void finish() {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
        throw ConfigError(path_ + ": unknown key \"" + it.key() + "\"");
  }

  double as_number(const json& v, const char* key) const {
    if (!v.is_number())
      throw ConfigError(path_ + "." + key + ": expected a number");
    return v.get<double>();
  }

  std::string as_text(const json& v, const char* key) const {
    if (!v.is_string())
      throw ConfigError(path_ + "." + key + ": expected a string");
    return v.get<std::string>();
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

std::array<double, 3> parse_vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() < 2 || v.size() > 3)
    throw ConfigError(path + ": expected an array of 2 or 3 numbers");
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      throw ConfigError(path + ": expected an array of numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

ShapeSpec parse_shape(const json& j, const std::string& path) {
  Obj o(j, path);
  ShapeSpec sp;
  const std::string kind = o.require_text("kind");
  if (kind == "sphere") {
    sp.kind = ShapeSpec::Kind::ball;
    sp.radius = o.require_number("radius");
  } else if (kind == "offset_ball") {
    sp.kind = ShapeSpec::Kind::offset_ball;
    sp.radius = o.require_number("radius");
    const json* c = o.take("center");
    if (!c) throw ConfigError(path + ": offset_ball needs \"center\"");
    sp.center = parse_vec3(*c, path + ".center");
  } else if (kind == "ellipsoid") {
    sp.kind = ShapeSpec::Kind::ellipsoid;
    const json* ax = o.take("semi_axes");
    if (!ax) throw ConfigError(path + ": ellipsoid needs \"semi_axes\"");
    const std::array<double, 3> v = parse_vec3(*ax, path + ".semi_axes");
    sp.semi_axes = {v[0], v[1], v[2] == 0.0 ? 1.0 : v[2]};
  } else if (kind == "radial_perturbation") {
    sp.radius = o.require_number("radius");
    sp.c = o.require_number("amplitude");
    const json* dir = o.take("direction");
    const json* zm = o.take("zonal_mode");
    if ((dir == nullptr) == (zm == nullptr))
      throw ConfigError(path +
                        ": radial_perturbation needs exactly one of "
                        "\"direction\" or \"zonal_mode\"");
    if (dir) {
      sp.kind = ShapeSpec::Kind::radial_graph;
      sp.axis = parse_vec3(*dir, path + ".direction");
    } else {
      sp.kind = ShapeSpec::Kind::zonal_mode;
      if (!zm->is_number_integer())
        throw ConfigError(path + ".zonal_mode: expected an integer");
      sp.mode = zm->get<int>();
    }
  } else {
    throw ConfigError(path + ".kind: \"" + kind +
                      "\" is not one of sphere, offset_ball, ellipsoid, "
                      "radial_perturbation");
  }
  o.finish();
  return sp;
}

PsiSpec parse_psi(const json& j, const std::string& path) {
  Obj o(j, path);
  PsiSpec psi;
  const std::string form = o.text("form", "constant");
  psi.value = o.number("value", 1.0);
  psi.power = o.number("power", 1.0);
  if (form == "constant") {
    psi.kind = PsiSpec::Kind::constant;
  } else if (form == "linear") {
    psi.kind = PsiSpec::Kind::linear;
    psi.c = o.require_number("c");
    const json* ax = o.take("axis");
    if (ax) psi.axis = parse_vec3(*ax, path + ".axis");
  } else if (form == "quadratic") {
    psi.kind = PsiSpec::Kind::quadratic;
    const json* terms = o.take("terms");
    if (!terms) throw ConfigError(path + ": quadratic form needs \"terms\"");
    if (!terms->is_array())
      throw ConfigError(path + ".terms: expected an array");
    int idx = 0;
    for (const json& t : *terms) {
      const std::string tp = path + ".terms[" + std::to_string(idx++) + "]";
      Obj to(t, tp);
      PsiSpec::QuadTerm term;
      term.a = to.require_number("a");
      const json* ax = to.take("axis");
      if (ax) term.axis = parse_vec3(*ax, tp + ".axis");
      to.finish();
      psi.terms.push_back(term);
    }
  } else {
    throw ConfigError(path + ".form: \"" + form +
                      "\" is not one of constant, linear, quadratic");
  }
  o.finish();
  return psi;
}

CurvatureSpec parse_curvature(const json& j, const std::string& path,
                              CurvatureArgument default_arg) {
  Obj o(j, path);
  CurvatureSpec cs;
  cs.argument = default_arg;
  const std::string kind = o.text("kind", "sigma_k_root");
  if (kind == "sigma_k_root") {
    cs.kind = CurvatureKind::sigma_k_root;
  } else if (kind == "quotient") {
    cs.kind = CurvatureKind::quotient;
  } else if (kind == "power_mean") {
    cs.kind = CurvatureKind::power_mean;
  } else {
    throw ConfigError(path + ".kind: \"" + kind +
                      "\" is not one of sigma_k_root, quotient, power_mean");
  }
  cs.k = int(o.integer("k", cs.k));
  cs.l = int(o.integer("l", cs.l));
  cs.m = o.number("m", cs.m);
  const json* arg = o.take("argument");
  if (arg) {
    const std::string a = o.as_text(*arg, "argument");
    if (a == "principal_curvatures") {
      cs.argument = CurvatureArgument::principal_curvatures;
    } else if (a == "principal_radii") {
      cs.argument = CurvatureArgument::principal_radii;
    } else {
      throw ConfigError(path + ".argument: \"" + a +
                        "\" is not one of principal_curvatures, "
                        "principal_radii");
    }
  }
  o.finish();
  return cs;
}

FlowVariant parse_variant(const std::string& s, const std::string& path) {
  for (FlowVariant v :
       {FlowVariant::radial_original, FlowVariant::radial_normalized,
        FlowVariant::support_original, FlowVariant::support_normalized_sigma_k,
        FlowVariant::support_normalized_gauss})
    if (s == to_string(v)) return v;
  throw ConfigError(path + ".variant: unknown variant \"" + s + "\"");
}

EquationKind parse_equation(const std::string& s, const std::string& path) {
  for (EquationKind e :
       {EquationKind::lp_minkowski, EquationKind::lp_cm,
        EquationKind::lp_dual_minkowski, EquationKind::lp_dual_cm,
        EquationKind::soliton})
    if (s == to_string(e)) return e;
  // long-form aliases
  if (s == "lp_christoffel_minkowski") return EquationKind::lp_cm;
  if (s == "lp_dual_christoffel_minkowski") return EquationKind::lp_dual_cm;
  throw ConfigError(path + ".equation: unknown equation \"" + s + "\"");
}

void check_mode_key(Obj& o, RunMode expected) {
  const json* m = o.take("mode");
  if (!m) return;
  const std::string s = o.as_text(*m, "mode");
  if (s != to_string(expected))
    throw ConfigError("config has mode \"" + s +
                      "\" but was passed to the " +
                      std::string(to_string(expected)) + " command");
}

std::uint64_t parse_seed(Obj& o) {
  const json* v = o.take("random_seed");
  if (!v) return 0;
  if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<long long>() < 0))
    throw ConfigError(o.path() + ".random_seed: expected a non-negative integer");
  return v->get<std::uint64_t>();
}

RunConfig parse_flow_config(const json& j) {
  RunConfig cfg;
  cfg.mode = RunMode::flow;
  Obj o(j, "config");
  check_mode_key(o, RunMode::flow);

  FlowParams& P = cfg.flow;
  P.variant = parse_variant(o.require_text("variant"), "config");
  P.n = int(o.integer("n", 2));
  P.n_theta = int(o.integer("n_theta", P.n_theta));
  P.n_phi = int(o.integer("n_phi", P.n_phi));
  P.alpha = o.number("alpha", 0.0);
  P.delta = o.number("delta", 0.0);
  P.beta = o.number("beta", 1.0);

  const CurvatureArgument def_arg = is_radial(P.variant)
                                        ? CurvatureArgument::principal_curvatures
                                        : CurvatureArgument::principal_radii;
  P.curvature.argument = def_arg;
  if (const json* c = o.take("curvature"))
    P.curvature = parse_curvature(*c, "config.curvature", def_arg);
  if (const json* p = o.take("psi")) P.psi = parse_psi(*p, "config.psi");

  const json* shape = o.take("initial_shape");
  if (!shape) throw ConfigError("config: missing required key \"initial_shape\"");
  P.initial = parse_shape(*shape, "config.initial_shape");

  P.time.dt_safety = o.number("dt_safety", P.time.dt_safety);
  P.time.dt_fixed = o.number("dt_fixed", P.time.dt_fixed);
  if (o.has("t_end")) P.time.t_end = o.require_number("t_end");
  P.time.max_steps = o.integer("max_steps", P.time.max_steps);
  P.time.record_every = int(o.integer("record_every", P.time.record_every));
  P.stop.osc_tol = o.number("stop_osc_tol", P.stop.osc_tol);
  P.stop.residual_tol = o.number("stop_residual_tol", P.stop.residual_tol);
  P.stop.blow_up_factor = o.number("blow_up_factor", P.stop.blow_up_factor);
  P.prescale = o.boolean("prescale", P.prescale);
  P.symmetrize = o.boolean("symmetrize", P.symmetrize);

  cfg.output_dir = o.text("output_dir", cfg.output_dir);
  cfg.snapshot_stride = int(o.integer("snapshot_stride", cfg.snapshot_stride));
  if (cfg.snapshot_stride < 0)
    throw ConfigError("config.snapshot_stride: must be >= 0");
  cfg.random_seed = parse_seed(o);
  o.finish();

  P.validate();
  return cfg;
}

RunConfig parse_solve_config(const json& j) {
  RunConfig cfg;
  cfg.mode = RunMode::solve;
  Obj o(j, "config");
  check_mode_key(o, RunMode::solve);

  MinkowskiProblem& prob = cfg.problem;
  prob.equation = parse_equation(o.require_text("equation"), "config");
  prob.n = int(o.integer("n", 2));
  prob.k = int(o.integer("k", prob.equation == EquationKind::lp_cm ||
                                  prob.equation == EquationKind::lp_dual_cm
                              ? 1
                              : prob.n));
  prob.p = o.number("p", prob.p);
  prob.q = o.number("q", prob.q);
  prob.alpha = o.number("alpha", prob.alpha);
  prob.delta = o.number("delta", prob.delta);
  prob.beta = o.number("beta", prob.beta);
  if (const json* p = o.take("psi")) prob.psi = parse_psi(*p, "config.psi");

  SolveOptions& opt = cfg.solve;
  opt.n_theta = int(o.integer("n_theta", opt.n_theta));
  opt.n_phi = int(o.integer("n_phi", opt.n_phi));
  opt.residual_tol = o.number("residual_tol", opt.residual_tol);
  opt.max_steps = o.integer("max_steps", opt.max_steps);
  opt.max_rounds = int(o.integer("max_rounds", opt.max_rounds));
  opt.dt_safety = o.number("dt_safety", opt.dt_safety);
  if (const json* shape = o.take("initial_shape"))
    opt.initial = parse_shape(*shape, "config.initial_shape");

  if (const json* pr = o.take("uniqueness_probe")) {
    Obj po(*pr, "config.uniqueness_probe");
    const json* a = po.take("start_a");
    const json* b = po.take("start_b");
    if (!a || !b)
      throw ConfigError(
          "config.uniqueness_probe: needs \"start_a\" and \"start_b\"");
    cfg.probe.enabled = true;
    cfg.probe.start_a = parse_shape(*a, "config.uniqueness_probe.start_a");
    cfg.probe.start_b = parse_shape(*b, "config.uniqueness_probe.start_b");
    po.finish();
  }

  cfg.output_dir = o.text("output_dir", cfg.output_dir);
  cfg.random_seed = parse_seed(o);
  o.finish();

  prob.validate();
  if (!(opt.residual_tol > 0.0))
    throw ConfigError("config.residual_tol: must be positive");
  if (opt.max_rounds < 1)
    throw ConfigError("config.max_rounds: must be >= 1");
  if (opt.max_steps < 1)
    throw ConfigError("config.max_steps: must be >= 1");
  return cfg;
}

json shape_json(const ShapeSpec& sp) {
  json j;
  switch (sp.kind) {
    case ShapeSpec::Kind::ball:
      j["kind"] = "sphere";
      j["radius"] = sp.radius;
      break;
    case ShapeSpec::Kind::offset_ball:
      j["kind"] = "offset_ball";
      j["radius"] = sp.radius;
      j["center"] = {sp.center[0], sp.center[1], sp.center[2]};
      break;
    case ShapeSpec::Kind::ellipsoid:
      j["kind"] = "ellipsoid";
      j["semi_axes"] = {sp.semi_axes[0], sp.semi_axes[1], sp.semi_axes[2]};
      break;
    case ShapeSpec::Kind::radial_graph:
      j["kind"] = "radial_perturbation";
      j["radius"] = sp.radius;
      j["amplitude"] = sp.c;
      j["direction"] = {sp.axis[0], sp.axis[1], sp.axis[2]};
      break;
    case ShapeSpec::Kind::zonal_mode:
      j["kind"] = "radial_perturbation";
      j["radius"] = sp.radius;
      j["amplitude"] = sp.c;
      j["zonal_mode"] = sp.mode;
      break;
  }
  return j;
}

json psi_json(const PsiSpec& psi) {
  json j;
  switch (psi.kind) {
    case PsiSpec::Kind::constant:
      j["form"] = "constant";
      break;
    case PsiSpec::Kind::linear:
      j["form"] = "linear";
      j["c"] = psi.c;
      j["axis"] = {psi.axis[0], psi.axis[1], psi.axis[2]};
      break;
    case PsiSpec::Kind::quadratic: {
      j["form"] = "quadratic";
      json terms = json::array();
      for (const PsiSpec::QuadTerm& t : psi.terms)
        terms.push_back(
            json{{"a", t.a}, {"axis", {t.axis[0], t.axis[1], t.axis[2]}}});
      j["terms"] = std::move(terms);
      break;
    }
  }
  j["value"] = psi.value;
  j["power"] = psi.power;
  return j;
}

json curvature_json(const CurvatureSpec& cs) {
  json j;
  switch (cs.kind) {
    case CurvatureKind::sigma_k_root:
      j["kind"] = "sigma_k_root";
      j["k"] = cs.k;
      break;
    case CurvatureKind::quotient:
      j["kind"] = "quotient";
      j["k"] = cs.k;
      j["l"] = cs.l;
      break;
    case CurvatureKind::power_mean:
      j["kind"] = "power_mean";
      j["m"] = cs.m;
      break;
  }
  j["argument"] = cs.argument == CurvatureArgument::principal_curvatures
                      ? "principal_curvatures"
                      : "principal_radii";
  return j;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, RunMode expected) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  try {
    return expected == RunMode::flow ? parse_flow_config(j)
                                     : parse_solve_config(j);
  } catch (const json::exception& e) {
    // any stray type mishap from the JSON layer is still a config error
    throw ConfigError(std::string("config error: ") + e.what());
  }
}

RunConfig load_run_config(const std::string& path, RunMode expected) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), expected);
}

std::string resolved_config_json(const RunConfig& cfg) {
  json j;
  j["mode"] = to_string(cfg.mode);
  if (cfg.mode == RunMode::flow) {
    const FlowParams& P = cfg.flow;
    j["variant"] = to_string(P.variant);
    j["n"] = P.n;
    j["n_theta"] = P.n_theta;
    j["n_phi"] = P.n_phi;
    j["alpha"] = P.alpha;
    j["delta"] = P.delta;
    j["beta"] = P.beta;
    j["curvature"] = curvature_json(P.curvature);
    j["psi"] = psi_json(P.psi);
    j["initial_shape"] = shape_json(P.initial);
    j["dt_safety"] = P.time.dt_safety;
    j["dt_fixed"] = P.time.dt_fixed;
    if (std::isfinite(P.time.t_end)) j["t_end"] = P.time.t_end;
    j["max_steps"] = P.time.max_steps;
    j["record_every"] = P.time.record_every;
    j["stop_osc_tol"] = P.stop.osc_tol;
    j["stop_residual_tol"] = P.stop.residual_tol;
    j["blow_up_factor"] = P.stop.blow_up_factor;
    j["prescale"] = P.prescale;
    j["symmetrize"] = P.symmetrize;
    j["snapshot_stride"] = cfg.snapshot_stride;
  } else {
    const MinkowskiProblem& prob = cfg.problem;
    j["equation"] = to_string(prob.equation);
    j["n"] = prob.n;
    j["k"] = prob.k;
    j["p"] = prob.p;
    j["q"] = prob.q;
    j["alpha"] = prob.alpha;
    j["delta"] = prob.delta;
    j["beta"] = prob.beta;
    j["psi"] = psi_json(prob.psi);
    j["n_theta"] = cfg.solve.n_theta;
    j["n_phi"] = cfg.solve.n_phi;
    j["residual_tol"] = cfg.solve.residual_tol;
    j["max_steps"] = cfg.solve.max_steps;
    j["max_rounds"] = cfg.solve.max_rounds;
    j["dt_safety"] = cfg.solve.dt_safety;
    j["initial_shape"] = shape_json(cfg.solve.initial);
    if (cfg.probe.enabled)
      j["uniqueness_probe"] = json{{"start_a", shape_json(cfg.probe.start_a)},
                                   {"start_b", shape_json(cfg.probe.start_b)}};
  }
  j["output_dir"] = cfg.output_dir;
  j["random_seed"] = cfg.random_seed;
  return j.dump(2);
}

}  // namespace curvflow
