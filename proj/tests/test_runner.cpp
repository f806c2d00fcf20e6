#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tauforge/errors.hpp"
#include "tauforge/loop_io.hpp"
#include "tauforge/runner.hpp"

using namespace tauforge;
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tauforge_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

ojson manifest(const fs::path& dir) { return ojson::parse(slurp(dir / "manifest.json")); }

std::string first_line(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  return line;
}

ExperimentConfig small_kdv(const fs::path& out) {
  ExperimentConfig c = default_config("kdv");
  apply_setting(c, "grid", "-0.2:0.2:7");
  apply_setting(c, "out", out.string());
  return c;
}

int run_quiet(const ExperimentConfig& c) {
  std::ostringstream log;
  return run(c, log);
}

}  // namespace

TEST_SUITE("cli_runner") {

TEST_CASE("grid axis parsing") {
  const GridAxis a = parse_grid_axis("-1:2.5:11");
  CHECK(a.min == -1.0);
  CHECK(a.max == 2.5);
  CHECK(a.count == 11);
  CHECK_THROWS_AS(parse_grid_axis("1:2"), ConfigError);
  CHECK_THROWS_AS(parse_grid_axis("a:2:3"), ConfigError);
  CHECK_THROWS_AS(parse_grid_axis("0:1:2.5"), ConfigError);
}

TEST_CASE("defaults and validation") {
  for (const char* p : {"kdv", "ernst", "birkhoff", "selftest"}) CHECK_NOTHROW(validate(default_config(p)));
  CHECK_THROWS_AS(default_config("heat"), ConfigError);
  ExperimentConfig c = default_config("kdv");
  CHECK(c.preset == "one-pole");
  CHECK(c.N == 40);
  CHECK(c.M == 256);
  c.M = 100;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = default_config("kdv");
  apply_setting(c, "grid_x", "-1:1:5");
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = default_config("ernst");
  apply_setting(c, "grid_r", "0:1:9");
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = default_config("kdv");
  apply_setting(c, "tol_residual", "0");
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = default_config("kdv");
  CHECK_THROWS_AS(apply_setting(c, "tol_nonexistent", "1e-3"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "grid_r", "0.5:1:9"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "trunc", "ten"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "colour", "blue"), ConfigError);
  apply_setting(c, "threads", "3");
  CHECK(c.threads == 3);
}

TEST_CASE("config files") {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "a.cfg");
    f << "# comment\npipeline = kdv\ntrunc=24\nsamples = 128\ngrid_t=-0.5:0.5:9\ntol_residual=1e-3\n";
  }
  ExperimentConfig c = default_config("kdv");
  apply_config_file(c, (dir / "a.cfg").string());
  CHECK(c.N == 24);
  CHECK(c.M == 128);
  CHECK(c.axis2.count == 9);
  CHECK(c.axis1.count == 51);
  CHECK(c.tol.at("residual") == 1e-3);
  // a later setting overrides the file
  apply_setting(c, "trunc", "30");
  CHECK(c.N == 30);

  ExperimentConfig e = default_config("ernst");
  CHECK_THROWS_AS(apply_config_file(e, (dir / "a.cfg").string()), ConfigError);
  CHECK_THROWS_AS(apply_config_file(e, (dir / "missing.cfg").string()), ConfigError);
  {
    std::ofstream f(dir / "bad.cfg");
    f << "trunc 12\n";
  }
  CHECK_THROWS_AS(apply_config_file(c, (dir / "bad.cfg").string()), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("birkhoff pipeline and manifest keys") {
  const fs::path out = scratch("birkhoff");
  ExperimentConfig c = default_config("birkhoff");
  c.out_dir = out.string();
  CHECK(run_quiet(c) == kExitOk);
  const ojson m = manifest(out);
  std::vector<std::string> keys;
  for (const auto& [k, v] : m.items()) keys.push_back(k);
  const std::vector<std::string> expected{"tool",    "version", "libraries", "pipeline", "preset",  "seed_description",
                                          "seed_file", "seed_loop", "N",       "M",        "grid",    "tolerances",
                                          "threads", "outputs", "summary",   "checks",   "status",  "exit_code",
                                          "error"};
  CHECK(keys == expected);
  CHECK(m["status"] == "ok");
  CHECK(m["exit_code"] == 0);
  CHECK(m["error"].is_null());
  for (const char* f : {"gamma.json", "g_minus.json", "g_plus.json"}) CHECK(fs::exists(out / f));
  for (const auto& chk : m["checks"]) CHECK(chk["passed"] == true);

  ExperimentConfig d = default_config("birkhoff");
  apply_setting(d, "preset", "diag");
  d.out_dir = (out / "diag").string();
  CHECK(run_quiet(d) == kExitBigCell);
  const ojson md = manifest(out / "diag");
  CHECK(md["status"] == "big_cell_error");
  CHECK(md["exit_code"] == 4);
  fs::remove_all(out);
}

TEST_CASE("kdv pipeline") {
  const fs::path out = scratch("kdv");
  CHECK(run_quiet(small_kdv(out)) == kExitOk);
  CHECK(first_line(out / "kdv.csv") == "x,t,re_log_tau,im_log_tau,re_q,re_u,bigcell");
  const ojson m = manifest(out);
  CHECK(m["grid"]["x"]["count"] == 7);
  std::vector<std::string> names;
  for (const auto& chk : m["checks"]) names.push_back(chk["name"]);
  for (const char* n : {"formula_agreement", "dx_logtau_equals_q", "dt_logtau_consistency", "closedness",
                        "log_tau_origin_zero", "kdv_residual"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());

  // seed diag(l, 1/l): every node lies outside the big cell
  std::vector<CMatrix> modes(3, CMatrix::Zero(2, 2));
  modes[2](0, 0) = 1.0;
  modes[0](1, 1) = 1.0;
  const fs::path seed = out / "diag_seed.json";
  write_loop_file(seed.string(), MatrixLoop::from_coeffs(1, 256, modes));
  ExperimentConfig d = small_kdv(out / "diag");
  apply_setting(d, "seed_file", seed.string());
  CHECK(run_quiet(d) == kExitBigCell);
  CHECK(manifest(out / "diag")["status"] == "big_cell_error");

  // a non-unimodular seed file is a configuration error
  write_loop_file((out / "scaled.json").string(), MatrixLoop::constant(2.0 * CMatrix::Identity(2, 2), 1, 256));
  apply_setting(d, "seed_file", (out / "scaled.json").string());
  CHECK(run_quiet(d) == kExitConfig);
  fs::remove_all(out);
}

TEST_CASE("ernst pipeline") {
  const fs::path out = scratch("ernst");
  ExperimentConfig c = default_config("ernst");
  apply_setting(c, "grid_r", "0.5:1.5:7");
  apply_setting(c, "grid_z", "-0.5:0.5:7");
  c.out_dir = out.string();
  CHECK(run_quiet(c) == kExitOk);
  CHECK(first_line(out / "ernst.csv") ==
        "r,z,log_tau,dlogtau_w_re,dlogtau_w_im,field_residual,candidate1_const,candidate2_const");

  apply_setting(c, "preset", "product-rz");
  c.out_dir = (out / "bad").string();
  CHECK(run_quiet(c) == kExitCheckFailed);
  const ojson m = manifest(out / "bad");
  CHECK(m["status"] == "check_failed");
  CHECK(m["error"].get<std::string>().find("invariant violated") != std::string::npos);

  ExperimentConfig k = default_config("ernst");
  apply_setting(k, "preset", "kasner:b=1");
  k.out_dir = (out / "badpreset").string();
  CHECK(run_quiet(k) == kExitConfig);
  fs::remove_all(out);
}

TEST_CASE("configuration errors map to exit code 3") {
  ExperimentConfig c = default_config("kdv");
  c.N = 0;
  c.out_dir = scratch("cfgerr").string();
  CHECK(run_quiet(c) == kExitConfig);
  ExperimentConfig e = default_config("ernst");
  e.seed_file = "whatever.json";
  e.out_dir = scratch("cfgerr2").string();
  CHECK(run_quiet(e) == kExitConfig);
  fs::remove_all(c.out_dir);
  fs::remove_all(e.out_dir);
}

TEST_CASE("runs are deterministic and reproducible from the manifest") {
  const fs::path a = scratch("det_a"), b = scratch("det_b"), r = scratch("det_r");
  ExperimentConfig ca = small_kdv(a), cb = small_kdv(b);
  cb.threads = 2;
  REQUIRE(run_quiet(ca) == kExitOk);
  REQUIRE(run_quiet(cb) == kExitOk);
  CHECK(slurp(a / "kdv.csv") == slurp(b / "kdv.csv"));

  // rebuild the configuration from the manifest alone
  const ojson m = manifest(a);
  ExperimentConfig cr = default_config(m["pipeline"].get<std::string>());
  apply_setting(cr, "preset", m["preset"].get<std::string>());
  apply_setting(cr, "trunc", std::to_string(m["N"].get<int>()));
  apply_setting(cr, "samples", std::to_string(m["M"].get<int>()));
  auto axis = [](const ojson& g) {
    std::ostringstream s;
    s.precision(17);
    s << g["min"].get<double>() << ":" << g["max"].get<double>() << ":" << g["count"].get<int>();
    return s.str();
  };
  apply_setting(cr, "grid_x", axis(m["grid"]["x"]));
  apply_setting(cr, "grid_t", axis(m["grid"]["t"]));
  for (const auto& [k, v] : m["tolerances"].items()) {
    std::ostringstream s;
    s.precision(17);
    s << v.get<double>();
    apply_setting(cr, "tol_" + k, s.str());
  }
  cr.out_dir = r.string();
  REQUIRE(run_quiet(cr) == kExitOk);
  CHECK(slurp(a / "kdv.csv") == slurp(r / "kdv.csv"));
  const ojson mr = manifest(r);
  CHECK(mr["checks"] == m["checks"]);
  for (const fs::path& p : {a, b, r}) fs::remove_all(p);
}

}  // TEST_SUITE
