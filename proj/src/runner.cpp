#include "tauforge/runner.hpp"

#include <fftw3.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "tauforge/birkhoff.hpp"
#include "tauforge/ernst.hpp"
#include "tauforge/errors.hpp"
#include "tauforge/kdv.hpp"
#include "tauforge/loop_io.hpp"
#include "tauforge/parallel.hpp"
#include "tauforge/random_loops.hpp"
#include "tauforge/selftest.hpp"

namespace tauforge {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': not a number: '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': not an integer: '" + v + "'");
  }
}

struct Preset {
  std::string name;
  std::map<std::string, double> params;
};

// "name" or "name:k=v,k=v"; only the listed keys are accepted.
Preset parse_preset(const std::string& spec, const std::map<std::string, double>& defaults) {
  Preset p;
  const auto colon = spec.find(':');
  p.name = trim(spec.substr(0, colon));
  p.params = defaults;
  if (colon == std::string::npos) return p;
  std::stringstream ss(spec.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("preset parameter '" + item + "' is not key=value");
    const std::string k = trim(item.substr(0, eq));
    if (!defaults.count(k)) throw ConfigError("preset '" + p.name + "' has no parameter '" + k + "'");
    p.params[k] = parse_double(k, trim(item.substr(eq + 1)));
  }
  return p;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json num_json(double v) { return std::isfinite(v) ? json(v) : json(num(v)); }

struct Check {
  std::string name;
  double value;
  double threshold;
  std::string relation;
  bool passed;
};

Check check_le(const std::string& name, double v, double thr) { return {name, v, thr, "<=", v <= thr}; }

struct Outcome {
  int code = kExitOk;
  std::string error;
  std::string seed_description;
  json seed_loop = nullptr;
  json grid = nullptr;
  json summary = json::object();
  std::vector<Check> checks;
  std::vector<std::string> outputs;
};

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

json axis_json(const GridAxis& a) { return {{"min", a.min}, {"max", a.max}, {"count", a.count}}; }

const char* status_name(int code) {
  switch (code) {
    case kExitOk: return "ok";
    case kExitCheckFailed: return "check_failed";
    case kExitConfig: return "config_error";
    case kExitBigCell: return "big_cell_error";
    default: return "unknown";
  }
}

void write_manifest(const ExperimentConfig& cfg, const Outcome& o) {
  json m;
  m["tool"] = "tau-forge";
  m["version"] = kVersion;
  m["libraries"] = {{"eigen", eigen_version()}, {"fftw", std::string(fftw_version)}};
  m["pipeline"] = cfg.pipeline;
  m["preset"] = cfg.preset;
  m["seed_description"] = o.seed_description;
  m["seed_file"] = cfg.seed_file.empty() ? json(nullptr) : json(cfg.seed_file);
  m["seed_loop"] = o.seed_loop;
  m["N"] = cfg.N;
  m["M"] = cfg.M;
  m["grid"] = o.grid;
  m["tolerances"] = json::object();
  for (const auto& [k, v] : cfg.tol) m["tolerances"][k] = v;
  m["threads"] = cfg.threads;
  m["outputs"] = o.outputs;
  m["summary"] = o.summary;
  m["checks"] = json::array();
  for (const Check& c : o.checks)
    m["checks"].push_back({{"name", c.name},
                           {"value", num_json(c.value)},
                           {"relation", c.relation},
                           {"threshold", c.threshold},
                           {"passed", c.passed}});
  m["status"] = status_name(o.code);
  m["exit_code"] = o.code;
  m["error"] = o.error.empty() ? json(nullptr) : json(o.error);
  std::ofstream f(std::filesystem::path(cfg.out_dir) / "manifest.json");
  if (!f) throw ConfigError("cannot write manifest.json in '" + cfg.out_dir + "'");
  f << m.dump(2) << "\n";
}

// Records the check outcome and downgrades the exit code on failure.
void settle(Outcome& o, std::ostream& log) {
  for (const Check& c : o.checks) {
    log << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << c.value << " " << c.relation << " "
        << c.threshold << "\n";
    if (!c.passed && o.code == kExitOk) {
      o.code = kExitCheckFailed;
      o.error = "invariant violated: " + c.name;
    }
  }
}

std::ofstream open_csv(const ExperimentConfig& cfg, const std::string& name, Outcome& o) {
  std::ofstream f(std::filesystem::path(cfg.out_dir) / name);
  if (!f) throw ConfigError("cannot write " + name + " in '" + cfg.out_dir + "'");
  o.outputs.push_back(name);
  return f;
}

// ---- kdv ----

KdVSeed kdv_seed(const ExperimentConfig& cfg, Outcome& o) {
  if (!cfg.seed_file.empty()) {
    const MatrixLoop p0 = read_loop_file(cfg.seed_file);
    if (p0.n() != 2) throw ConfigError("KdV seed loop must be 2x2");
    if (!p0.satisfies(kUnimodular)) throw ConfigError("KdV seed loop is not unimodular on the circle");
    o.seed_loop = json::parse(loop_to_json(p0));
    return KdVSeed::from_loop(p0, "loop file " + cfg.seed_file);
  }
  const Preset p = parse_preset(cfg.preset, cfg.preset.rfind("one-pole", 0) == 0
                                                ? std::map<std::string, double>{{"a", 0.2}, {"c", 0.5}, {"s", 0.5}}
                                                : std::map<std::string, double>{});
  if (p.name == "vacuum") return KdVSeed::vacuum();
  if (p.name == "one-pole") {
    const double a = p.params.at("a");
    if (std::abs(std::abs(a) - 1.0) < 1e-3) throw ConfigError("one-pole: the pole must stay off the unit circle");
    return KdVSeed::one_pole(a, p.params.at("c"), p.params.at("s"));
  }
  throw ConfigError("unknown kdv preset '" + p.name + "' (vacuum, one-pole[:a=,c=,s=])");
}

void run_kdv(const ExperimentConfig& cfg, Outcome& o, std::ostream& log) {
  const KdVSeed seed = kdv_seed(cfg, o);
  o.seed_description = seed.description;
  o.grid = {{"x", axis_json(cfg.axis1)}, {"t", axis_json(cfg.axis2)}, {"v", 0.0}};
  KdVConfig kc;
  kc.N = cfg.N;
  kc.M = cfg.M;
  kc.factor.tol = cfg.tol.at("factor");
  kc.factor.tail_threshold = cfg.tol.at("tail");
  kc.path_tol = cfg.tol.at("path");
  kc.threads = cfg.threads;

  try {
    factorize(pullback_patching(seed, {0.0, 0.0, 0.0}, kc), kc.factor);
  } catch (const BigCellError& e) {
    o.code = kExitBigCell;
    o.error = std::string("base point (0, 0) outside the big cell: ") + e.what();
    return;
  }
  const std::vector<double> xs = linspace(cfg.axis1.min, cfg.axis1.max, cfg.axis1.count);
  const std::vector<double> ts = linspace(cfg.axis2.min, cfg.axis2.max, cfg.axis2.count);
  log << "kdv: " << seed.description << ", " << xs.size() << "x" << ts.size() << " grid\n";
  const TauGrid g = tau_grid(seed, xs, ts, kc, TauGridOptions{true, false, true});

  {
    std::ofstream f = open_csv(cfg, "kdv.csv", o);
    f << "x,t,re_log_tau,im_log_tau,re_q,re_u,bigcell\n";
    for (int ix = 0; ix < g.nx(); ++ix)
      for (int it = 0; it < g.nt(); ++it) {
        const KdVNode& n = g.at(ix, it);
        const bool ok = n.bigcell && n.path_ok;
        f << num(xs[ix]) << ',' << num(ts[it]) << ',' << num(ok ? n.log_tau.real() : NAN) << ','
          << num(ok ? n.log_tau.imag() : NAN) << ',' << num(n.bigcell ? n.q.real() : NAN) << ','
          << num(n.bigcell ? n.u.real() : NAN) << ',' << (n.bigcell ? 1 : 0) << '\n';
      }
  }

  int path_failures = 0;
  for (const KdVNode& n : g.nodes) path_failures += (n.bigcell && !n.path_ok) ? 1 : 0;
  double residual = NAN;
  try {
    residual = kdv_residual(g);
  } catch (const std::invalid_argument&) {
  }
  double origin = 0.0;
  for (int ix = 0; ix < g.nx(); ++ix)
    for (int it = 0; it < g.nt(); ++it)
      if (xs[ix] == 0.0 && ts[it] == 0.0) origin = std::abs(g.at(ix, it).log_tau);

  o.summary = {{"nodes", g.nodes.size()},
               {"bad_nodes", bad_node_count(g)},
               {"path_failures", path_failures},
               {"path_evaluations", g.path_evaluations},
               {"max_abs_q", num_json(max_abs_q(g))},
               {"max_abs_log_tau", num_json(max_abs_logtau(g))},
               {"max_formula_gap", num_json(max_formula_gap(g))},
               {"max_dx_logtau_minus_q", num_json(max_dx_logtau_mismatch(g))},
               {"max_dt_logtau_mismatch", num_json(max_dt_logtau_mismatch(g))},
               {"max_ordering_gap", num_json(max_ordering_gap(g))},
               {"kdv_residual", num_json(residual)}};
  o.checks.push_back(check_le("formula_agreement", max_formula_gap(g), cfg.tol.at("formula")));
  o.checks.push_back(check_le("dx_logtau_equals_q", max_dx_logtau_mismatch(g), cfg.tol.at("dx")));
  o.checks.push_back(check_le("dt_logtau_consistency", max_dt_logtau_mismatch(g), cfg.tol.at("dt")));
  o.checks.push_back(check_le("closedness", max_ordering_gap(g), cfg.tol.at("closed")));
  o.checks.push_back(check_le("log_tau_origin_zero", origin, 0.0));
  o.checks.push_back(check_le("kdv_residual", residual, cfg.tol.at("residual")));
  if (seed.description == KdVSeed::vacuum().description) {
    o.checks.push_back(check_le("vacuum_q_zero", max_abs_q(g), cfg.tol.at("vacuum_q")));
    o.checks.push_back(check_le("vacuum_residual", residual, cfg.tol.at("vacuum_residual")));
  }
  if (path_failures > 0) {
    o.code = kExitBigCell;
    o.error = std::to_string(path_failures) + " node(s) reachable only through non-big-cell points";
  }
}

// ---- ernst ----

Preset ernst_preset(const std::string& spec) {
  const std::string name = trim(spec.substr(0, spec.find(':')));
  if (name == "kasner") return parse_preset(spec, {{"a", 0.7}});
  if (name == "point") return parse_preset(spec, {{"a", 0.8}, {"z0", 0.0}});
  return parse_preset(spec, {});
}

ErnstSolution ernst_solution(const Preset& p) {
  if (p.name == "flat") return ErnstSolution::flat();
  if (p.name == "kasner") return ErnstSolution::kasner(p.params.at("a"));
  if (p.name == "point") return ErnstSolution::point_source(p.params.at("a"), p.params.at("z0"));
  if (p.name == "linear") return ErnstSolution::linear_r();
  if (p.name == "product-rz") return ErnstSolution::product_rz();
  throw ConfigError("unknown ernst preset '" + p.name + "' (flat, kasner:a=, point:a=,z0=, linear, product-rz)");
}

void run_ernst(const ExperimentConfig& cfg, Outcome& o, std::ostream& log) {
  if (!cfg.seed_file.empty()) throw ConfigError("the ernst pipeline takes presets only");
  const Preset preset = ernst_preset(cfg.preset);
  const ErnstSolution sol = ernst_solution(preset);
  o.seed_description = sol.description;
  o.grid = {{"r", axis_json(cfg.axis1)}, {"z", axis_json(cfg.axis2)}, {"base_point", json::array({1.0, 0.0})}};
  const std::vector<double> rs = linspace(cfg.axis1.min, cfg.axis1.max, cfg.axis1.count);
  const std::vector<double> zs = linspace(cfg.axis2.min, cfg.axis2.max, cfg.axis2.count);
  log << "ernst: " << sol.description << ", " << rs.size() << "x" << zs.size() << " grid\n";
  const ErnstTauField f = logtau_field(sol, rs, zs, cfg.tol.at("path"), cfg.threads);
  const ConformalReport rep = conformal_factor_check(f, cfg.tol.at("conformal"));
  const int nr = static_cast<int>(rs.size()), nz = static_cast<int>(zs.size());

  {
    std::ofstream out = open_csv(cfg, "ernst.csv", o);
    out << "r,z,log_tau,dlogtau_w_re,dlogtau_w_im,field_residual,candidate1_const,candidate2_const\n";
    for (int ir = 0; ir < nr; ++ir)
      for (int iz = 0; iz < nz; ++iz) {
        const ErnstNode& n = f.at(ir, iz);
        out << num(rs[ir]) << ',' << num(zs[iz]) << ',' << num(n.log_tau) << ',' << num(n.dlogtau_w.real())
            << ',' << num(n.dlogtau_w.imag()) << ',' << num(n.field_residual) << ',' << num(n.candidate1)
            << ',' << num(n.candidate2) << '\n';
      }
  }

  double field = 0.0, residue = 0.0;
  for (int ir = 0; ir < nr; ++ir)
    for (int iz = 0; iz < nz; ++iz) {
      field = std::max(field, f.at(ir, iz).field_residual);
      residue = std::max(residue, residue_check(sol, rs[ir], zs[iz]));
    }
  std::vector<double> rect(nr - 1, 0.0);
  parallel_for(nr - 1, cfg.threads, [&](int ir) {
    for (int iz = 0; iz + 1 < nz; ++iz)
      rect[ir] = std::max(rect[ir], std::abs(rectangle_loop_integral(sol, rs[ir], rs[ir + 1], zs[iz], zs[iz + 1])));
  });
  const double rect_max = *std::max_element(rect.begin(), rect.end());

  o.summary = {{"nodes", f.nodes.size()},
               {"max_field_residual", field},
               {"max_residue_route_mismatch", residue},
               {"max_cell_loop_integral", rect_max},
               {"max_imag_log_tau", f.max_imag_logtau},
               {"std_candidate1", rep.std_candidate1},
               {"std_candidate2", rep.std_candidate2},
               {"constant_candidate", rep.constant_candidate}};
  o.checks.push_back(check_le("field_equations", field, cfg.tol.at("field")));
  o.checks.push_back(check_le("residue_route", residue, cfg.tol.at("residue")));
  o.checks.push_back(check_le("cell_loop_integrals", rect_max, cfg.tol.at("rectangle")));
  o.checks.push_back({"one_conformal_candidate_constant", std::min(rep.std_candidate1, rep.std_candidate2),
                      cfg.tol.at("conformal"), "<=", rep.constant_candidate != 0});

  if (preset.name == "kasner" || preset.name == "flat") {
    const double a = preset.name == "flat" ? 0.0 : preset.params.at("a");
    double dr = 0.0, lt = 0.0;
    for (int ir = 0; ir < nr; ++ir)
      for (int iz = 0; iz < nz; ++iz) {
        dr = std::max(dr, std::abs(dlogtau_r(sol, rs[ir], zs[iz]) - (1.0 + a * a) / (2.0 * rs[ir])));
        lt = std::max(lt, std::abs(f.at(ir, iz).log_tau - 0.5 * (1.0 + a * a) * std::log(rs[ir])));
      }
    o.summary["max_kasner_dr_gap"] = dr;
    o.summary["max_kasner_log_tau_gap"] = lt;
    o.checks.push_back(check_le("kasner_dr_closed_form", dr, cfg.tol.at("kasner")));
    o.checks.push_back(check_le("kasner_log_tau_closed_form", lt, cfg.tol.at("closed_form")));
  }
}

// ---- birkhoff ----

MatrixLoop birkhoff_input(const ExperimentConfig& cfg, Outcome& o) {
  if (!cfg.seed_file.empty()) {
    MatrixLoop g = read_loop_file(cfg.seed_file);
    if (!g.satisfies(kUnimodular)) throw ConfigError("loop in '" + cfg.seed_file + "' is not unimodular");
    if (g.M() != cfg.M) throw ConfigError("loop file sample count differs from --samples");
    o.seed_description = "loop file " + cfg.seed_file;
    o.seed_loop = json::parse(loop_to_json(g));
    return g.with_tag(kUnimodular);
  }
  const std::string name = trim(cfg.preset.substr(0, cfg.preset.find(':')));
  if (name == "random") {
    const Preset p = parse_preset(cfg.preset, {{"seed", 1.0}, {"sup", 0.5}, {"modes", 3.0}});
    std::mt19937_64 rng(static_cast<std::uint64_t>(p.params.at("seed")));
    o.seed_description = "random unitary loop exp(u), seed " + num(p.params.at("seed")) + ", sup|u| " +
                         num(p.params.at("sup")) + ", modes <= " + num(p.params.at("modes"));
    return random_group_loop(rng, 2, static_cast<int>(p.params.at("modes")), p.params.at("sup"), cfg.N, cfg.M);
  }
  if (name == "diag" || name == "identity") {
    parse_preset(cfg.preset, {});
    std::vector<CMatrix> modes(2 * cfg.N + 1, CMatrix::Zero(2, 2));
    if (name == "diag") {
      modes[cfg.N + 1](0, 0) = 1.0;
      modes[cfg.N - 1](1, 1) = 1.0;
    } else {
      modes[cfg.N] = CMatrix::Identity(2, 2);
    }
    o.seed_description = name == "diag" ? "diag(lambda, 1/lambda)" : "identity";
    return MatrixLoop::from_coeffs(cfg.N, cfg.M, modes).with_tag(kUnimodular);
  }
  throw ConfigError("unknown birkhoff preset '" + name + "' (random[:seed=,sup=,modes=], diag, identity)");
}

void run_birkhoff(const ExperimentConfig& cfg, Outcome& o, std::ostream& log) {
  const MatrixLoop g = birkhoff_input(cfg, o);
  log << "birkhoff: " << o.seed_description << "\n";
  FactorizeOptions fo;
  fo.tol = cfg.tol.at("factor");
  fo.tail_threshold = cfg.tol.at("tail");
  auto dump = [&](const std::string& name, const MatrixLoop& l) {
    write_loop_file((std::filesystem::path(cfg.out_dir) / name).string(), l);
    o.outputs.push_back(name);
  };
  dump("gamma.json", g);
  BirkhoffFactors f;
  try {
    f = factorize(g, fo);
  } catch (const BigCellError& e) {
    o.code = kExitBigCell;
    o.error = e.what();
    o.summary = {{"condition", num_json(e.condition)}, {"residual", num_json(e.residual)}};
    return;
  }
  dump("g_minus.json", f.g_minus);
  dump("g_plus.json", f.g_plus);
  const BirkhoffFactors again = factorize(multiply(f.g_minus, inverse(f.g_plus)).with_tag(kUnimodular), fo);
  const double uniq = std::max(coefficient_distance(f.g_minus, again.g_minus), coefficient_distance(f.g_plus, again.g_plus));
  const LoopSamples a = f.g_minus.samples(), b = f.g_plus.samples();
  double det = 0.0;
  for (int j = 0; j < a.M(); ++j) det = std::max(det, std::abs(a[j].determinant() / b[j].determinant() - 1.0));
  o.summary = {{"residual", f.residual}, {"condition", f.condition}, {"tail_mass", g.tail_mass()}};
  o.checks.push_back(check_le("reconstruction_residual", f.residual, cfg.tol.at("factor")));
  o.checks.push_back(check_le("uniqueness", uniq, cfg.tol.at("uniqueness")));
  o.checks.push_back(check_le("det_ratio", det, cfg.tol.at("det")));
}

void run_selftest_pipeline(const ExperimentConfig& cfg, Outcome& o, std::ostream& log) {
  const SelftestReport r = run_selftest(cfg.threads, &log);
  for (const CheckResult& c : r.checks) o.checks.push_back({c.module + "/" + c.name, c.value, c.threshold, c.relation, c.passed});
  o.summary = {{"checks", r.checks.size()}, {"seconds", r.seconds}};
  log << "selftest: " << r.checks.size() << " checks in " << r.seconds << " s\n";
}

}  // namespace

GridAxis parse_grid_axis(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(trim(item));
  if (parts.size() != 3) throw ConfigError("grid '" + spec + "' is not min:max:count");
  GridAxis a{parse_double("grid", parts[0]), parse_double("grid", parts[1]), parse_int("grid", parts[2])};
  return a;
}

ExperimentConfig default_config(const std::string& pipeline) {
  ExperimentConfig c;
  c.pipeline = pipeline;
  if (pipeline == "kdv") {
    c.preset = "one-pole";
    c.N = 40;
    c.M = 256;
    c.axis1 = c.axis2 = {-1.0, 1.0, 51};
    c.tol = {{"factor", 1e-9}, {"tail", kDefaultTailThreshold}, {"path", 1e-10}, {"formula", 1e-8},
             {"dx", 1e-5}, {"dt", 1e-5}, {"closed", 1e-6}, {"residual", 1e-4},
             {"vacuum_q", 1e-8}, {"vacuum_residual", 1e-7}};
  } else if (pipeline == "ernst") {
    c.preset = "kasner:a=0.7";
    c.N = kDefaultTrunc;
    c.M = kDefaultSamples;
    c.axis1 = {0.5, 2.0, 31};
    c.axis2 = {-1.0, 1.0, 31};
    c.tol = {{"path", 1e-12}, {"field", 1e-10}, {"residue", 1e-12}, {"rectangle", 1e-8},
             {"conformal", 1e-7}, {"kasner", 1e-10}, {"closed_form", 1e-8}};
  } else if (pipeline == "birkhoff") {
    c.preset = "random";
    c.N = kDefaultTrunc;
    c.M = kDefaultSamples;
    c.tol = {{"factor", 1e-9}, {"tail", kDefaultTailThreshold}, {"uniqueness", 1e-8}, {"det", 1e-9}};
  } else if (pipeline == "selftest") {
    c.N = kDefaultTrunc;
    c.M = kDefaultSamples;
    c.out_dir.clear();
  } else {
    throw ConfigError("unknown pipeline '" + pipeline + "' (kdv, ernst, birkhoff, selftest)");
  }
  c.threads = default_thread_count();
  return c;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in), value = trim(value_in);
  const bool gridded = cfg.pipeline == "kdv" || cfg.pipeline == "ernst";
  const std::string ax1 = cfg.pipeline == "ernst" ? "grid_r" : "grid_x";
  const std::string ax2 = cfg.pipeline == "ernst" ? "grid_z" : "grid_t";
  if (key == "pipeline") {
    if (value != cfg.pipeline) throw ConfigError("config is for pipeline '" + value + "', running '" + cfg.pipeline + "'");
  } else if (key == "preset") {
    cfg.preset = value;
  } else if (key == "seed_file") {
    cfg.seed_file = value;
  } else if (key == "trunc") {
    cfg.N = parse_int(key, value);
  } else if (key == "samples") {
    cfg.M = parse_int(key, value);
  } else if (key == "grid" && gridded) {
    cfg.axis1 = cfg.axis2 = parse_grid_axis(value);
  } else if (key == ax1 && gridded) {
    cfg.axis1 = parse_grid_axis(value);
  } else if (key == ax2 && gridded) {
    cfg.axis2 = parse_grid_axis(value);
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "threads") {
    cfg.threads = parse_int(key, value);
  } else if (key.rfind("tol_", 0) == 0 && cfg.tol.count(key.substr(4))) {
    cfg.tol[key.substr(4)] = parse_double(key, value);
  } else {
    throw ConfigError("unknown setting '" + key + "' for pipeline " + cfg.pipeline);
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.N < 1) throw ConfigError("trunc must be >= 1");
  if (cfg.M < 4 * cfg.N + 2)
    throw ConfigError("samples M = " + std::to_string(cfg.M) + " violates M >= 4N + 2 = " + std::to_string(4 * cfg.N + 2));
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
  for (const auto& [k, v] : cfg.tol)
    if (!(v > 0.0)) throw ConfigError("tolerance " + k + " must be > 0");
  if (cfg.pipeline == "kdv" || cfg.pipeline == "ernst") {
    for (const GridAxis* a : {&cfg.axis1, &cfg.axis2}) {
      if (a->count < 7) throw ConfigError("grid counts must be >= 7");
      if (!(a->min < a->max)) throw ConfigError("grid min must be below max");
    }
    if (cfg.pipeline == "ernst" && !(cfg.axis1.min > 0.0)) throw ConfigError("ernst grid needs r > 0");
  }
  if (cfg.pipeline != "selftest" && cfg.out_dir.empty()) throw ConfigError("output directory is empty");
}

int run(const ExperimentConfig& cfg, std::ostream& log) {
  Outcome o;
  try {
    validate(cfg);
    if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);
    if (cfg.pipeline == "kdv") run_kdv(cfg, o, log);
    else if (cfg.pipeline == "ernst") run_ernst(cfg, o, log);
    else if (cfg.pipeline == "birkhoff") run_birkhoff(cfg, o, log);
    else run_selftest_pipeline(cfg, o, log);
    settle(o, log);
  } catch (const ConfigError& e) {
    o.code = kExitConfig;
    o.error = std::string("configuration: ") + e.what();
  } catch (const std::filesystem::filesystem_error& e) {
    o.code = kExitConfig;
    o.error = std::string("configuration: ") + e.what();
  } catch (const BigCellError& e) {
    o.code = kExitBigCell;
    o.error = std::string("big cell: ") + e.what();
  } catch (const PathCrossesBadCellError& e) {
    o.code = kExitBigCell;
    o.error = std::string("big cell: ") + e.what();
  } catch (const TailMassError& e) {
    o.code = kExitCheckFailed;
    o.error = std::string("invariant violated: tail_mass: ") + e.what();
  } catch (const std::exception& e) {
    o.code = kExitCheckFailed;
    o.error = std::string("invariant violated: ") + e.what();
  }
  if (!o.error.empty()) log << "error: " << o.error << "\n";
  if (!cfg.out_dir.empty() && o.code != kExitConfig) {
    try {
      write_manifest(cfg, o);
    } catch (const std::exception& e) {
      log << "error: " << e.what() << "\n";
      return kExitConfig;
    }
  }
  return o.code;
}

}  // namespace tauforge
