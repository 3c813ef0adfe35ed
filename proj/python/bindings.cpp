#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "levyruin/config.hpp"
#include "levyruin/errors.hpp"
#include "levyruin/parallel.hpp"
#include "levyruin/cumulant.hpp"
#include "levyruin/fixed_point.hpp"
#include "levyruin/path_sim.hpp"
#include "levyruin/presets.hpp"
#include "levyruin/renewal_lab.hpp"
#include "levyruin/ruin_estimator.hpp"

namespace py = pybind11;
using namespace levyruin;

namespace {

JumpLaw law_from_dict(const py::dict& d) {
  const auto name = d.contains("law") ? d["law"].cast<std::string>() : "none";
  if (name == "none") return JumpLaw{};
  const py::dict params = d.contains("params") ? d["params"].cast<py::dict>() : py::dict();
  if (name == "exponential")
    return JumpLaw{ExponentialPositive{params["rate"].cast<double>()}};
  if (name == "lognormal")
    return JumpLaw{ShiftedLognormal{params["mu"].cast<double>(),
                                    params["s"].cast<double>()}};
  if (name == "pareto")
    return JumpLaw{ParetoPositive{params["alpha"].cast<double>(),
                                  params["x_min"].cast<double>()}};
  if (name == "atoms")
    return JumpLaw{DiscreteAtoms{params["values"].cast<std::vector<double>>(),
                                 params["probs"].cast<std::vector<double>>()}};
  throw ConfigError("unknown jump law '" + name + "'", "jump.law");
}

LevyTriplet triplet_from_dict(const py::dict& d) {
  LevyTriplet t;
  if (d.contains("drift")) t.drift = d["drift"].cast<double>();
  if (d.contains("sigma2")) t.diffusion_var = d["sigma2"].cast<double>();
  if (d.contains("jump")) {
    const py::dict j = d["jump"].cast<py::dict>();
    if (j.contains("intensity")) t.jump_intensity = j["intensity"].cast<double>();
    t.jump_law = law_from_dict(j);
  }
  return t;
}

ModelPair model_from_dict(const py::dict& d) {
  ModelPair m;
  if (d.contains("r")) m.r = triplet_from_dict(d["r"].cast<py::dict>());
  if (d.contains("p")) m.p = triplet_from_dict(d["p"].cast<py::dict>());
  return m;
}

ModelPair model_from_any(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return presets::by_name(obj.cast<std::string>());
  return model_from_dict(obj.cast<py::dict>());
}

py::object opt(const std::optional<double>& v) {
  if (v) return py::float_(*v);
  return py::none();
}

py::dict report_to_dict(const CumulantReport& rep) {
  py::dict d;
  d["beta"] = opt(rep.beta);
  d["q_lower"] = rep.q_lower;
  d["q_upper"] = rep.q_upper;
  d["dplus_H0"] = rep.dplus_H0;
  d["arithmetic"] = rep.arithmetic;
  d["lattice_step"] = opt(rep.lattice_step);
  return d;
}

}  // namespace

PYBIND11_MODULE(_levyruin, m) {
  m.doc() = "Levy-driven reserve simulation: cumulant analysis, perpetuity "
            "sampling and ruin-tail estimation";

  py::register_exception<Error>(m, "LevyruinError");

  m.def("preset_names", &presets::preset_names);
  m.def("validate",
        [](const py::object& model) { return validate(model_from_any(model)); },
        py::arg("model"));
  m.def("evaluate_H",
        [](const py::object& model, double q) { return evaluate_H(model_from_any(model), q); },
        py::arg("model"), py::arg("q"));
  m.def("effective_domain",
        [](const py::object& model) { return effective_domain(model_from_any(model)); },
        py::arg("model"));
  m.def("analyze_cumulant",
        [](const py::object& model) { return report_to_dict(analyze_cumulant(model_from_any(model))); },
        py::arg("model"));
  m.def("find_root_beta",
        [](const py::object& model) { return report_to_dict(find_root_beta(model_from_any(model))); },
        py::arg("model"));
  m.def("esscher_tilt",
        [](const py::object& model, double beta) {
          const TiltedModel t = esscher_tilt(model_from_any(model), beta);
          py::dict d;
          d["cv_tilted"] = t.v.cv_tilted;
          d["drift_av_tilted"] = t.v.drift_av_tilted;
          d["intensity"] = t.v.intensity;
          d["mean_log_m_tilted"] = t.mean_log_m_tilted;
          return d;
        },
        py::arg("model"), py::arg("beta"));

  m.def("sample_path",
        [](const py::object& model, double horizon, double grid_step, std::uint64_t seed,
           std::uint64_t replicate) {
          PathConfig cfg;
          cfg.horizon = horizon;
          cfg.grid_step = grid_step;
          cfg.seed = seed;
          cfg.replicate_index = replicate;
          const PathSample s = sample_path(model_from_any(model), cfg);
          py::dict d;
          d["t"] = s.times;
          d["v"] = s.v;
          d["p"] = s.p;
          d["y"] = s.y;
          d["price"] = s.price;
          return d;
        },
        py::arg("model"), py::arg("horizon") = 10.0,
        py::arg("grid_step") = kDefaultGridStep, py::arg("seed") = 0,
        py::arg("replicate") = 0);
  m.def("sample_mq",
        [](const py::object& model, std::uint64_t seed, std::uint64_t replicate) {
          const MQSample s = sample_MQ(model_from_any(model), seed, replicate);
          return py::make_tuple(s.m1, s.q1);
        },
        py::arg("model"), py::arg("seed") = 0, py::arg("replicate") = 0);
  m.def("sample_q_theta",
        [](const py::object& model, int theta, std::uint64_t seed, std::uint64_t replicate) {
          return sample_Q_theta(model_from_any(model), theta, seed, replicate);
        },
        py::arg("model"), py::arg("theta"), py::arg("seed") = 0, py::arg("replicate") = 0);

  m.def("y_infinity_ensemble",
        [](const py::object& model, std::uint64_t n, double eps, std::uint64_t seed,
           unsigned workers) {
          EnsembleMeta meta;
          auto draws = y_infinity_ensemble(model_from_any(model), n, eps, seed,
                                           workers == 0 ? default_workers() : workers, &meta);
          py::dict d;
          d["draws"] = draws;
          d["p"] = meta.p;
          d["rho"] = meta.rho;
          d["depth"] = meta.depth;
          d["trunc_bound"] = meta.trunc_bound;
          return d;
        },
        py::arg("model"), py::arg("n") = 10000, py::arg("eps") = 1e-3,
        py::arg("seed") = 1, py::arg("workers") = 0);
  m.def("run_autoregression",
        [](const py::object& model, double u, std::uint64_t n_steps, std::uint64_t seed) {
          const ArPath a = run_autoregression(model_from_any(model), u, n_steps, seed);
          py::dict d;
          d["x"] = a.x;
          d["erg_avg"] = a.erg_avg;
          d["first_negative"] =
              a.first_negative ? py::object(py::int_(*a.first_negative)) : py::none();
          return d;
        },
        py::arg("model"), py::arg("u"), py::arg("n_steps"), py::arg("seed") = 0);
  m.def("sample_ladder_time",
        [](const py::object& model, std::uint64_t seed, std::uint64_t replicate,
           std::uint64_t max_steps) {
          return sample_ladder_time(model_from_any(model), seed, replicate, max_steps);
        },
        py::arg("model"), py::arg("seed") = 0, py::arg("replicate") = 0,
        py::arg("max_steps") = 10'000'000);

  m.def("estimate_g_bar",
        [](const std::vector<double>& ensemble, const std::vector<double>& u_list) {
          py::list rows;
          for (const auto& r : estimate_G_bar(ensemble, u_list)) {
            py::dict d;
            d["u"] = r.u;
            d["g_bar"] = r.g_bar;
            d["se"] = r.se;
            d["sparse_tail"] = r.sparse_tail;
            rows.append(d);
          }
          return rows;
        },
        py::arg("ensemble"), py::arg("u_list"));
  m.def("estimate_psi",
        [](const py::object& model, double u, const std::string& method,
           std::uint64_t n_replicates, double eps, std::uint64_t seed, unsigned workers,
           double horizon) {
          PsiParams params;
          params.n_replicates = n_replicates;
          params.eps = eps;
          params.seed = seed;
          params.workers = workers == 0 ? default_workers() : workers;
          params.horizon0 = horizon;
          PsiMethod pm = PsiMethod::paulsen_reduction;
          if (method == "crossing_mc") pm = PsiMethod::crossing_mc;
          else if (method == "bounds") pm = PsiMethod::bounds;
          else if (method != "paulsen_reduction")
            throw ConfigError("unknown method '" + method + "'", "method");
          const RuinEstimate e = estimate_psi(model_from_any(model), u, pm, params);
          py::dict d;
          d["u"] = e.u;
          d["psi_hat"] = e.psi_hat;
          d["se"] = e.se;
          d["method"] = method_name(e.method);
          d["g_bar_hat"] = e.g_bar_hat;
          d["g_bar0_hat"] = e.g_bar0_hat;
          d["psi_lower"] = e.psi_lower;
          d["psi_upper"] = e.psi_upper;
          d["horizon"] = e.horizon;
          return d;
        },
        py::arg("model"), py::arg("u"), py::arg("method") = "paulsen_reduction",
        py::arg("n_replicates") = 100000, py::arg("eps") = 1e-3, py::arg("seed") = 1,
        py::arg("workers") = 0, py::arg("horizon") = 32.0);
  m.def("fit_tail",
        [](std::vector<double> samples, double q_lo, double q_hi, std::uint64_t seed) {
          WindowPolicy wp;
          wp.q_lo = q_lo;
          wp.q_hi = q_hi;
          const TailFit f = fit_tail(std::move(samples), wp, seed);
          py::dict d;
          d["beta_hat"] = f.beta_hat;
          d["c_hat"] = f.c_hat;
          d["window"] = py::make_tuple(f.u_min, f.u_max);
          d["r2"] = f.r2;
          d["beta_ci_halfwidth"] = f.beta_ci_halfwidth;
          return d;
        },
        py::arg("samples"), py::arg("q_lo") = 0.95, py::arg("q_hi") = 0.999,
        py::arg("seed") = 0);
  m.def("classify_regime",
        [](const py::object& model) {
          const RegimeReport r = classify_regime(model_from_any(model));
          py::dict d;
          d["regime"] = regime_name(r.regime);
          d["beta"] = opt(r.beta);
          d["reason"] = r.reason;
          return d;
        },
        py::arg("model"));
  m.def("estimate_goldie_constant",
        [](const py::object& model, double beta, std::uint64_t n, std::uint64_t seed,
           unsigned workers, double eps) {
          const GoldieEstimate g = estimate_goldie_constant(
              model_from_any(model), beta, n, seed,
              workers == 0 ? default_workers() : workers, nullptr, eps);
          py::dict d;
          d["c_plus_hat"] = g.c_plus_hat;
          d["se"] = g.se;
          d["beta"] = g.beta;
          d["m_tilde_hat"] = g.m_tilde_hat;
          d["n_replicates"] = g.n_replicates;
          if (g.arithmetic_band)
            d["arithmetic_band"] =
                py::make_tuple(g.arithmetic_band->first, g.arithmetic_band->second);
          return d;
        },
        py::arg("model"), py::arg("beta"), py::arg("n") = 100000, py::arg("seed") = 1,
        py::arg("workers") = 0, py::arg("eps") = 1e-3);
  m.def("supremum_tail",
        [](const py::object& model, const std::vector<double>& u_list, std::uint64_t n,
           std::uint64_t seed, unsigned workers) {
          return supremum_tail(model_from_any(model), u_list, n, seed,
                               workers == 0 ? default_workers() : workers);
        },
        py::arg("model"), py::arg("u_list"), py::arg("n") = 1000000, py::arg("seed") = 1,
        py::arg("workers") = 0);
}
