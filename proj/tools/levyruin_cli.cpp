// Experiment runner: parses a dotted-key model config, dispatches to the
// library, writes JSON/CSV artifacts, and runs the verification suite.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "levyruin/acceptance.hpp"
#include "levyruin/config.hpp"
#include "levyruin/cumulant.hpp"
#include "levyruin/errors.hpp"
#include "levyruin/fixed_point.hpp"
#include "levyruin/parallel.hpp"
#include "levyruin/path_sim.hpp"
#include "levyruin/renewal_lab.hpp"
#include "levyruin/ruin_estimator.hpp"
#include "levyruin/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace levyruin;

namespace {

json extended(double x) {
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  return x;
}

struct CliOptions {
  std::string config_path;
  std::uint64_t seed_override = 0;
  bool has_seed = false;
  unsigned workers_override = 0;
  std::string out_override;
  std::string format_override;
};

ExperimentConfig resolve(const CliOptions& opt) {
  if (opt.config_path.empty()) throw ConfigError("--config PATH is required");
  ExperimentConfig cfg = load_config(opt.config_path);
  if (opt.has_seed) cfg.seed = opt.seed_override;
  if (opt.workers_override > 0) cfg.workers = opt.workers_override;
  if (!opt.out_override.empty()) cfg.out_dir = opt.out_override;
  if (!opt.format_override.empty()) {
    if (opt.format_override != "json" && opt.format_override != "csv")
      throw ConfigError("format must be 'json' or 'csv'", "format");
    cfg.format = opt.format_override;
  }
  if (cfg.workers == 0) cfg.workers = default_workers();
  return cfg;
}

void require_valid_model(const ExperimentConfig& cfg) {
  const auto violations = validate(cfg.model);
  if (!violations.empty()) {
    std::string msg = "model violates standing assumptions:";
    for (const auto& v : violations) msg += " [" + v + "]";
    throw DegenerateModelError(msg);
  }
}

json base_report(const ExperimentConfig& cfg) {
  return json{{"config_hash", cfg.config_hash}, {"seed", cfg.seed}};
}

void emit(const ExperimentConfig& cfg, const std::string& name, const json& report) {
  fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / (name + ".json");
  std::ofstream f(path);
  f << report.dump(2) << '\n';
  std::cout << report.dump(2) << std::endl;
}

int cmd_cumulant(const ExperimentConfig& cfg) {
  require_valid_model(cfg);
  const CumulantReport rep = analyze_cumulant(cfg.model);
  json j = base_report(cfg);
  j["beta"] = rep.beta ? json(*rep.beta) : json(nullptr);
  j["q_lower"] = extended(rep.q_lower);
  j["q_upper"] = extended(rep.q_upper);
  j["dplus_H0"] = extended(rep.dplus_H0);
  j["arithmetic"] = rep.arithmetic;
  j["lattice_step"] = rep.lattice_step ? json(*rep.lattice_step) : json(nullptr);
  json hv = json::array();
  for (const auto& [q, h] : rep.h_values) hv.push_back({{"q", q}, {"H", extended(h)}});
  for (double q : cfg.get_list("q_grid", {}))
    hv.push_back({{"q", q}, {"H", extended(evaluate_H(cfg.model, q))}});
  j["h_values"] = hv;
  emit(cfg, "cumulant", j);
  if (cfg.format == "csv") {
    fs::create_directories(cfg.out_dir);
    std::ofstream f(fs::path(cfg.out_dir) / "cumulant.csv");
    f << "q,H\n";
    f.precision(17);
    for (const auto& [q, h] : rep.h_values) f << q << ',' << h << '\n';
  }
  return 0;
}

int cmd_simulate(const ExperimentConfig& cfg) {
  require_valid_model(cfg);
  const double u = cfg.get("u", 1.0);
  const auto n_paths = cfg.get_u64("n_paths", 1);
  PathConfig pc;
  pc.horizon = cfg.get("horizon", 10.0);
  pc.grid_step = cfg.get("grid_step", kDefaultGridStep);
  pc.seed = cfg.seed;
  fs::create_directories(cfg.out_dir);
  json summary = base_report(cfg);
  summary["u"] = u;
  summary["horizon"] = pc.horizon;
  summary["grid_step"] = pc.grid_step;
  json rows = json::array();
  for (std::uint64_t k = 0; k < n_paths; ++k) {
    pc.replicate_index = k;
    const PathSample s = sample_path(cfg.model, pc);
    const fs::path csv = fs::path(cfg.out_dir) / ("path_" + std::to_string(k) + ".csv");
    write_path_csv(s, u, csv.string());
    rows.push_back({{"replicate", k},
                    {"file", csv.string()},
                    {"V_T", s.v.back()},
                    {"Y_T", s.y.back()},
                    {"X_T", s.reserve(s.times.size() - 1, u)}});
  }
  summary["paths"] = rows;
  emit(cfg, "simulate", summary);
  return 0;
}

int cmd_perpetuity(const ExperimentConfig& cfg) {
  require_valid_model(cfg);
  const auto n = cfg.get_u64("n_replicates", 100'000);
  const double eps = cfg.get("eps", 1e-3);
  EnsembleMeta meta;
  const auto draws = y_infinity_ensemble(cfg.model, n, eps, cfg.seed, cfg.workers, &meta);
  fs::create_directories(cfg.out_dir);
  write_ensemble_csv(draws, meta, (fs::path(cfg.out_dir) / "perpetuity.csv").string());
  json j = base_report(cfg);
  j["n_replicates"] = n;
  j["eps"] = eps;
  j["p"] = meta.p;
  j["rho"] = meta.rho;
  j["depth"] = meta.depth;
  j["trunc_bound"] = meta.trunc_bound;
  auto ms = stats::mean_se(draws);
  j["mean"] = ms.mean;
  j["se"] = ms.se;
  emit(cfg, "perpetuity", j);
  return 0;
}

PsiMethod method_from_string(const std::string& s) {
  if (s == "paulsen_reduction") return PsiMethod::paulsen_reduction;
  if (s == "crossing_mc") return PsiMethod::crossing_mc;
  if (s == "bounds") return PsiMethod::bounds;
  throw ConfigError("unknown method '" + s + "'", "method");
}

int cmd_ruin(const ExperimentConfig& cfg) {
  require_valid_model(cfg);
  const auto u_list = cfg.get_list("u_grid", {2.0, 5.0, 10.0});
  PsiMethod method = method_from_string(
      cfg.extras.count("method") ? cfg.extras.at("method") : "paulsen_reduction");
  PsiParams params;
  params.n_replicates = cfg.get_u64("n_replicates", 100'000);
  params.eps = cfg.get("eps", 1e-3);
  params.seed = cfg.seed;
  params.workers = cfg.workers;
  params.horizon0 = cfg.get("horizon", 32.0);
  params.grid_step = cfg.get("grid_step", 1.0 / 256.0);
  const auto rows = estimate_psi_table(cfg.model, u_list, method, params);
  const RegimeReport reg = classify_regime(cfg.model);
  json j = base_report(cfg);
  j["method"] = method_name(method);
  j["regime"] = regime_name(reg.regime);
  j["beta"] = reg.beta ? json(*reg.beta) : json(nullptr);
  json jr = json::array();
  for (const auto& e : rows) {
    jr.push_back({{"u", e.u},
                  {"psi_hat", e.psi_hat},
                  {"se", e.se},
                  {"g_bar_hat", e.g_bar_hat},
                  {"g_bar0_hat", e.g_bar0_hat},
                  {"psi_lower", e.psi_lower},
                  {"psi_upper", e.psi_upper},
                  {"horizon", e.horizon},
                  {"n_replicates", e.n_replicates}});
  }
  j["rows"] = jr;
  emit(cfg, "ruin", j);
  if (cfg.format == "csv") {
    std::ofstream f(fs::path(cfg.out_dir) / "ruin.csv");
    f << "u,psi_hat,se,psi_lower,psi_upper,horizon\n";
    f.precision(17);
    for (const auto& e : rows)
      f << e.u << ',' << e.psi_hat << ',' << e.se << ',' << e.psi_lower << ','
        << e.psi_upper << ',' << e.horizon << '\n';
  }
  return 0;
}

int cmd_tailfit(const ExperimentConfig& cfg) {
  require_valid_model(cfg);
  const auto n = cfg.get_u64("n_replicates", 200'000);
  const double eps = cfg.get("eps", 1e-3);
  const auto draws = y_infinity_ensemble(cfg.model, n, eps, cfg.seed, cfg.workers);
  const TailFit fit = fit_tail(draws, WindowPolicy{}, cfg.seed);
  json j = base_report(cfg);
  j["beta_hat"] = fit.beta_hat;
  j["c_hat"] = fit.c_hat;
  j["window"] = {fit.u_min, fit.u_max};
  j["r2"] = fit.r2;
  j["beta_ci_halfwidth"] = fit.beta_ci_halfwidth;
  emit(cfg, "tailfit", j);
  return 0;
}

int cmd_regime(const ExperimentConfig& cfg) {
  require_valid_model(cfg);
  const RegimeReport reg = classify_regime(cfg.model);
  json j = base_report(cfg);
  j["regime"] = regime_name(reg.regime);
  j["beta"] = reg.beta ? json(*reg.beta) : json(nullptr);
  j["reason"] = reg.reason;
  emit(cfg, "regime", j);
  return 0;
}

int cmd_renewal(const ExperimentConfig& cfg) {
  require_valid_model(cfg);
  const auto n = cfg.get_u64("n_replicates", 200'000);
  const double eps = cfg.get("eps", 1e-3);
  const CumulantReport rep = find_root_beta(cfg.model);
  json j = base_report(cfg);
  j["beta"] = *rep.beta;

  const GoldieEstimate goldie =
      estimate_goldie_constant(cfg.model, *rep.beta, n, cfg.seed, cfg.workers, nullptr, eps);
  j["goldie"] = {{"c_plus_hat", goldie.c_plus_hat},
                 {"se", goldie.se},
                 {"m_tilde_hat", goldie.m_tilde_hat},
                 {"n_replicates", goldie.n_replicates}};
  if (goldie.arithmetic_band)
    j["goldie"]["arithmetic_band"] = {goldie.arithmetic_band->first,
                                      goldie.arithmetic_band->second};

  const auto residual =
      renewal_equation_residual(cfg.model, *rep.beta, n, cfg.seed, cfg.workers);
  json res = json::array();
  for (std::size_t i = 0; i < residual.x.size(); ++i)
    res.push_back({{"x", residual.x[i]},
                   {"residual", residual.residual[i]},
                   {"combined_se", residual.combined_se[i]}});
  j["renewal_residual"] = res;
  j["d_abs_integral"] = residual.d_abs_integral;
  j["m_tilde_importance"] = residual.m_tilde_hat;
  j["m_tilde_direct"] = residual.m_tilde_direct;

  const auto u_list = cfg.get_list("u_grid", {10.0, 31.6, 100.0, 316.0, 1000.0});
  const auto tail = supremum_tail(cfg.model, u_list, std::max<std::uint64_t>(n, 1'000'000),
                                  cfg.seed, cfg.workers);
  json st = json::array();
  for (const auto& [u, p] : tail) st.push_back({{"u", u}, {"p", p}});
  j["supremum_tail"] = st;
  emit(cfg, "renewal", j);
  return 0;
}

int cmd_verify(unsigned workers, std::uint64_t seed, const std::string& out_dir) {
  const auto results = run_acceptance(workers, seed, [](const CriterionResult& r) {
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.name
              << " -- " << r.detail << std::endl;
  });
  bool all = true;
  json rows = json::array();
  for (const auto& r : results) {
    all = all && r.pass;
    rows.push_back({{"id", r.id},
                    {"name", r.name},
                    {"pass", r.pass},
                    {"detail", r.detail},
                    {"seconds", r.seconds}});
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream f(fs::path(out_dir) / "verify.json");
    f << json{{"criteria", rows}, {"all_pass", all}}.dump(2) << '\n';
  }
  std::cout << (all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAILED") << std::endl;
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Levy-driven reserve simulation and ruin-tail estimation"};
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "experiment config file");
  app.add_option("--seed", opt.seed_override, "override the config seed")
      ->each([&](const std::string&) { opt.has_seed = true; });
  app.add_option("--workers", opt.workers_override, "worker threads (0 = auto)");
  app.add_option("--out", opt.out_override, "output directory");
  app.add_option("--format", opt.format_override, "json or csv");

  const std::vector<std::pair<std::string, int (*)(const ExperimentConfig&)>> cmds = {
      {"cumulant", cmd_cumulant}, {"simulate", cmd_simulate},
      {"perpetuity", cmd_perpetuity}, {"ruin", cmd_ruin},
      {"tailfit", cmd_tailfit}, {"regime", cmd_regime},
      {"renewal", cmd_renewal}};
  for (const auto& [name, fn] : cmds) app.add_subcommand(name);
  auto* verify = app.add_subcommand("verify", "run the full verification suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      const unsigned workers =
          opt.workers_override > 0 ? opt.workers_override : default_workers();
      const std::uint64_t seed = opt.has_seed ? opt.seed_override : 20250801ULL;
      return cmd_verify(workers, seed,
                        opt.out_override.empty() ? "out" : opt.out_override);
    }
    const ExperimentConfig cfg = resolve(opt);
    for (const auto& [name, fn] : cmds)
      if (app.get_subcommand(name)->parsed()) return fn(cfg);
    throw ConfigError("no subcommand given");
  } catch (const ConfigError& e) {
    json err{{"error", {{"code", e.code()}, {"message", e.what()}}}};
    if (!e.key().empty()) err["error"]["key"] = e.key();
    std::cout << err.dump(2) << std::endl;
    return 2;
  } catch (const Error& e) {
    std::cout << json{{"error", {{"code", e.code()}, {"message", e.what()}}}}.dump(2)
              << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cout << json{{"error", {{"code", "internal"}, {"message", e.what()}}}}.dump(2)
              << std::endl;
    return 1;
  }
}
