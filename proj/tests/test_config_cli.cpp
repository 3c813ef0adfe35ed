#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "levyruin/config.hpp"
#include "levyruin/errors.hpp"
#include "levyruin/fixed_point.hpp"
#include "levyruin/presets.hpp"

using namespace levyruin;

namespace {

bool law_equal(const JumpLaw& a, const JumpLaw& b) {
  if (a.index() != b.index()) return false;
  if (const auto* ea = std::get_if<ExponentialPositive>(&a))
    return ea->rate == std::get<ExponentialPositive>(b).rate;
  if (const auto* la = std::get_if<ShiftedLognormal>(&a)) {
    const auto& lb = std::get<ShiftedLognormal>(b);
    return la->mu == lb.mu && la->s == lb.s;
  }
  if (const auto* pa = std::get_if<ParetoPositive>(&a)) {
    const auto& pb = std::get<ParetoPositive>(b);
    return pa->alpha == pb.alpha && pa->x_min == pb.x_min;
  }
  if (const auto* da = std::get_if<DiscreteAtoms>(&a)) {
    const auto& db = std::get<DiscreteAtoms>(b);
    return da->values == db.values && da->probs == db.probs;
  }
  return true;
}

bool triplet_equal(const LevyTriplet& a, const LevyTriplet& b) {
  return a.drift == b.drift && a.diffusion_var == b.diffusion_var &&
         a.jump_intensity == b.jump_intensity && law_equal(a.jump_law, b.jump_law);
}

int run_cli(const std::string& args, std::string* out) {
#ifdef LEVYRUIN_CLI_PATH
  const std::string cmd = std::string(LEVYRUIN_CLI_PATH) + " " + args + " > cli_out.txt 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream f("cli_out.txt");
  std::ostringstream buf;
  buf << f.rdbuf();
  *out = buf.str();
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
#else
  (void)args;
  (void)out;
  return -1;
#endif
}

}  // namespace

TEST_CASE("config parsing: model keys and experiment keys") {
  const std::string text = R"(
# comment
r.drift = 1.5
r.sigma2 = 1.0
r.jump.intensity = 2.0
r.jump.law = atoms
r.jump.params.values = 1.0, -0.5
r.jump.params.probs = 0.75, 0.25

p.drift = -0.3
p.sigma2 = 0.0
p.jump.intensity = 1.0
p.jump.law = exponential
p.jump.params.rate = 2.0

seed = 42
workers = 3
eps = 1e-4
u_grid = 1, 2, 4
out = results
format = csv
)";
  const ExperimentConfig cfg = parse_config_text(text);
  CHECK(cfg.model.r.drift == 1.5);
  CHECK(cfg.model.r.jump_intensity == 2.0);
  const auto* atoms = std::get_if<DiscreteAtoms>(&cfg.model.r.jump_law);
  REQUIRE(atoms != nullptr);
  CHECK(atoms->values == std::vector<double>{1.0, -0.5});
  const auto* expo = std::get_if<ExponentialPositive>(&cfg.model.p.jump_law);
  REQUIRE(expo != nullptr);
  CHECK(expo->rate == 2.0);
  CHECK(cfg.seed == 42);
  CHECK(cfg.workers == 3);
  CHECK(cfg.out_dir == "results");
  CHECK(cfg.format == "csv");
  CHECK(cfg.get("eps", 0.0) == 1e-4);
  CHECK(cfg.get_list("u_grid", {}) == std::vector<double>{1.0, 2.0, 4.0});
  CHECK(!cfg.config_hash.empty());
}

TEST_CASE("config errors carry the offending key") {
  auto expect_key = [](const std::string& text, const std::string& key) {
    try {
      (void)parse_config_text(text);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.key() == key);
    }
  };
  expect_key("r.drift = abc\n", "r.drift");
  expect_key("bogus = 1\n", "bogus");
  expect_key("r.jump.law = weibull\n", "r.jump.law");
  expect_key("r.jump.law = exponential\n", "r.jump.params.rate");
  expect_key("r.jump.params.shape = 1\n", "r.jump.params.shape");
  expect_key("format = xml\n", "format");
}

TEST_CASE("config hash is stable and content-sensitive") {
  const std::string a = "r.drift = 1.0\n";
  const std::string b = "r.drift = 1.1\n";
  CHECK(config_hash_hex(a) == config_hash_hex(a));
  CHECK(config_hash_hex(a) != config_hash_hex(b));
}

TEST_CASE("preset files match the built-in presets field by field") {
#ifdef LEVYRUIN_PRESET_DIR
  for (const auto& name : presets::preset_names()) {
    const std::string path = std::string(LEVYRUIN_PRESET_DIR) + "/" + name + ".cfg";
    const ExperimentConfig cfg = load_config(path);
    const ModelPair code = presets::by_name(name);
    CHECK(triplet_equal(cfg.model.r, code.r));
    CHECK(triplet_equal(cfg.model.p, code.p));
    CHECK(validate(cfg.model).empty());
  }
#endif
}

TEST_CASE("ensemble CSV bytes are identical across worker counts") {
  const ModelPair m = presets::example1_powertail();
  EnsembleMeta meta1, meta2;
  const auto a = y_infinity_ensemble(m, 2000, 1e-3, 77, 1, &meta1);
  const auto b = y_infinity_ensemble(m, 2000, 1e-3, 77, 4, &meta2);
  REQUIRE(a == b);
  write_ensemble_csv(a, meta1, "ens_w1.csv");
  write_ensemble_csv(b, meta2, "ens_w4.csv");
  std::ifstream f1("ens_w1.csv"), f2("ens_w4.csv");
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  std::remove("ens_w1.csv");
  std::remove("ens_w4.csv");
}

#ifdef LEVYRUIN_CLI_PATH
TEST_CASE("CLI: regime on the power-tail preset") {
  std::string out;
  const std::string cfg = std::string(LEVYRUIN_PRESET_DIR) + "/example1_powertail.cfg";
  const int rc = run_cli("regime --config " + cfg + " --out cli_tmp", &out);
  CHECK(rc == 0);
  CHECK(out.find("\"regime\": \"PowerTail\"") != std::string::npos);
  CHECK(out.find("\"beta\": 2.0") != std::string::npos);
  CHECK(out.find("config_hash") != std::string::npos);
}

TEST_CASE("CLI: regime on the certain-ruin preset") {
  std::string out;
  const std::string cfg = std::string(LEVYRUIN_PRESET_DIR) + "/example1_certain_ruin.cfg";
  const int rc = run_cli("regime --config " + cfg + " --out cli_tmp", &out);
  CHECK(rc == 0);
  CHECK(out.find("\"regime\": \"CertainRuin\"") != std::string::npos);
}

TEST_CASE("CLI: malformed config exits 2 and names the key") {
  std::ofstream bad("bad_config.cfg");
  bad << "r.drift = 1.0\nbogus_key = 3\n";
  bad.close();
  std::string out;
  const int rc = run_cli("regime --config bad_config.cfg", &out);
  CHECK(rc == 2);
  CHECK(out.find("\"error\"") != std::string::npos);
  CHECK(out.find("bogus_key") != std::string::npos);
  std::remove("bad_config.cfg");
}

TEST_CASE("CLI: cumulant report on the lattice preset") {
  std::string out;
  const std::string cfg = std::string(LEVYRUIN_PRESET_DIR) + "/arithmetic_lattice.cfg";
  const int rc = run_cli("cumulant --config " + cfg + " --out cli_tmp", &out);
  CHECK(rc == 0);
  CHECK(out.find("\"arithmetic\": true") != std::string::npos);
  CHECK(out.find("\"q_lower\": \"-inf\"") != std::string::npos);
}

TEST_CASE("CLI: invalid model exits 1 with a module error") {
  std::ofstream bad("invalid_model.cfg");
  bad << "r.drift = 1.0\n";  // deterministic R, P defaults to zero
  bad.close();
  std::string out;
  const int rc = run_cli("cumulant --config invalid_model.cfg", &out);
  CHECK(rc == 1);
  CHECK(out.find("degenerate_model") != std::string::npos);
  std::remove("invalid_model.cfg");
}
#endif
