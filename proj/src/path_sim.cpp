#include "levyruin/path_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "levyruin/errors.hpp"

namespace levyruin {

namespace {

struct JumpSeq {
  std::vector<double> t;
  std::vector<double> size;  // log1p-mapped for V, raw for P
};

JumpSeq draw_jumps(double lam, const JumpLaw& law, double horizon, Stream& rng,
                   bool log_map) {
  JumpSeq js;
  if (lam <= 0.0 || is_none(law)) return js;
  double t = rng.exponential(lam);
  while (t <= horizon) {
    js.t.push_back(t);
    const double x = sample(law, rng);
    js.size.push_back(log_map ? std::log1p(x) : x);
    t += rng.exponential(lam);
  }
  return js;
}

void require_valid(const ModelPair& m, bool allow_degenerate) {
  if (allow_degenerate) return;
  auto violations = validate(m);
  if (!violations.empty()) {
    std::string msg = "model violates standing assumptions:";
    for (const auto& v : violations) msg += " [" + v + "]";
    throw DegenerateModelError(msg);
  }
}

struct WalkResult {
  double v_end = 0.0;
  double q = 0.0;  // -int_0^L e^{-theta V_{s-}} dP_s
};

// One pass over [0, L]. V advances exactly on each segment; the q-integral
// uses the trapezoid rule on the refined grid when sigma > 0 and the exact
// piecewise-exponential integral when sigma = 0; the Brownian part of P
// enters via a left-point Ito term per cell; P-jumps contribute through the
// left limit e^{-theta V_{tau-}} (a simultaneous V-jump is applied after).
WalkResult walk_interval(const Dynamics& d, double theta, double L, double h,
                         bool use_grid, Stream& rv, Stream& rp, PathSample* rec,
                         double cross_level, double* cross_time) {
  const JumpSeq vj = draw_jumps(d.lam_r, d.r_law, L, rv, true);
  const JumpSeq pj = draw_jumps(d.lam_p, d.p_law, L, rp, false);

  double v = 0.0, q = 0.0, pval = 0.0;
  double e_cur = 1.0;  // e^{-theta v}
  std::size_t iv = 0, ip = 0;
  std::uint64_t kg = 1;
  double t = 0.0;

  auto record = [&](double tt) {
    rec->times.push_back(tt);
    rec->v.push_back(v);
    rec->p.push_back(pval);
    rec->y.push_back(q);
    rec->price.push_back(std::exp(v));
  };
  if (rec) record(0.0);

  while (t < L) {
    const double tv = iv < vj.t.size() ? vj.t[iv] : kInf;
    const double tp = ip < pj.t.size() ? pj.t[ip] : kInf;
    const double tg = use_grid ? h * static_cast<double>(kg) : kInf;
    const double t_next = std::min(std::min(tv, tp), std::min(tg, L));
    const double dt = t_next - t;

    double e_next = e_cur;
    if (dt > 0.0) {
      double seg;  // int_t^{t_next} e^{-theta V_s} ds
      if (d.sigma > 0.0) {
        v += d.cv * dt + d.sigma * std::sqrt(dt) * rv.normal();
        e_next = std::exp(-theta * v);
        seg = 0.5 * dt * (e_cur + e_next);
      } else {
        const double a = theta * d.cv * dt;
        const double em1 = (std::fabs(a) < 1e-14) ? 1.0 : -std::expm1(-a) / a;
        v += d.cv * dt;
        seg = e_cur * dt * em1;
        e_next = e_cur * std::exp(-a);
      }
      q -= d.cp * seg;
      pval += d.cp * dt;
      if (d.sigma_p > 0.0) {
        const double dwp = std::sqrt(dt) * rp.normal();
        q -= d.sigma_p * e_cur * dwp;
        pval += d.sigma_p * dwp;
      }
    }
    e_cur = e_next;

    const bool vj_here = (tv == t_next);
    const bool pj_here = (tp == t_next);
    if (rec && (vj_here || pj_here)) record(t_next);  // left-limit row
    if (cross_time && q >= cross_level) {
      *cross_time = t_next;
      return {v, q};
    }
    if (pj_here) {
      q -= e_cur * pj.size[ip];
      pval += pj.size[ip];
      ++ip;
      if (cross_time && q >= cross_level) {
        *cross_time = t_next;
        return {v, q};
      }
    }
    if (vj_here) {
      v += vj.size[iv];
      e_cur *= std::exp(-theta * vj.size[iv]);
      ++iv;
    }
    if (rec) record(t_next);
    if (tg == t_next) ++kg;
    t = t_next;
  }
  return {v, q};
}

}  // namespace

double draw_log_price_increment(const Dynamics& d, Stream& rv) {
  double v = d.cv;
  if (d.sigma > 0.0) v += d.sigma * rv.normal();
  if (d.lam_r > 0.0 && !is_none(d.r_law)) {
    const std::uint64_t n = rv.poisson(d.lam_r);
    for (std::uint64_t i = 0; i < n; ++i) v += std::log1p(sample(d.r_law, rv));
  }
  return v;
}

UnitIntervalSampler::UnitIntervalSampler(const ModelPair& m, std::uint64_t seed,
                                         std::uint64_t replicate, double grid_step,
                                         int theta, bool allow_degenerate)
    : dyn_(make_dynamics(m)),
      rv_(seed, replicate, StreamTag::kReturns),
      rp_(seed, replicate, StreamTag::kBusiness),
      h_(grid_step),
      theta_(static_cast<double>(theta)) {
  require_valid(m, allow_degenerate);
  use_grid_ = dyn_.sigma > 0.0 || dyn_.sigma_p > 0.0;
}

MQSample UnitIntervalSampler::next() {
  const WalkResult w =
      walk_interval(dyn_, theta_, 1.0, h_, use_grid_, rv_, rp_, nullptr, 0.0, nullptr);
  return {std::exp(-w.v_end), w.q};
}

PathSample sample_path(const ModelPair& m, const PathConfig& cfg) {
  require_valid(m, cfg.allow_degenerate);
  if (!(cfg.grid_step > 0.0) || cfg.grid_step > cfg.horizon)
    throw Error("bad_config", "grid_step must lie in (0, horizon]");
  const Dynamics d = make_dynamics(m);
  Stream rv(cfg.seed, cfg.replicate_index, StreamTag::kReturns);
  Stream rp(cfg.seed, cfg.replicate_index, StreamTag::kBusiness);
  PathSample out;
  walk_interval(d, 1.0, cfg.horizon, cfg.grid_step, true, rv, rp, &out, 0.0, nullptr);
  return out;
}

MQSample sample_MQ(const ModelPair& m, std::uint64_t seed, std::uint64_t replicate,
                   double grid_step, bool allow_degenerate) {
  UnitIntervalSampler s(m, seed, replicate, grid_step, 1, allow_degenerate);
  return s.next();
}

double sample_Q_theta(const ModelPair& m, int theta, std::uint64_t seed,
                      std::uint64_t replicate, double grid_step, bool allow_degenerate) {
  UnitIntervalSampler s(m, seed, replicate, grid_step, theta, allow_degenerate);
  return s.next().q1;
}

std::optional<double> first_crossing_time(const ModelPair& m, double u,
                                          const PathConfig& cfg) {
  require_valid(m, cfg.allow_degenerate);
  const Dynamics d = make_dynamics(m);
  Stream rv(cfg.seed, cfg.replicate_index, StreamTag::kReturns);
  Stream rp(cfg.seed, cfg.replicate_index, StreamTag::kBusiness);
  double tau = -1.0;
  walk_interval(d, 1.0, cfg.horizon, cfg.grid_step, true, rv, rp, nullptr, u, &tau);
  if (tau >= 0.0) return tau;
  return std::nullopt;
}

void write_path_csv(const PathSample& s, double u, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("io_error", "cannot open " + path);
  f << "t,V,P,Y,price,X_u\n";
  f.precision(17);
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    f << s.times[i] << ',' << s.v[i] << ',' << s.p[i] << ',' << s.y[i] << ','
      << s.price[i] << ',' << s.reserve(i, u) << '\n';
  }
}

std::vector<double> euler_consistency_errors(const ModelPair& m, double u, double horizon,
                                             const std::vector<double>& grid_steps,
                                             std::uint64_t n_paths, std::uint64_t seed) {
  require_valid(m, false);
  const Dynamics d = make_dynamics(m);
  const double cr = compound_drift(m.r);
  const double h_fine = *std::min_element(grid_steps.begin(), grid_steps.end());
  // The pathwise gap is compared on one common time set (the coarsest grid
  // plus every jump epoch), so the max is taken over the same points at
  // every step size.
  const double h_coarse = *std::max_element(grid_steps.begin(), grid_steps.end());
  const long cmp_ratio_fine = std::lround(h_coarse / h_fine);

  std::vector<double> err_sum(grid_steps.size(), 0.0);

  for (std::uint64_t path = 0; path < n_paths; ++path) {
    Stream rv(seed, path, StreamTag::kReturns);
    Stream rp(seed, path, StreamTag::kBusiness);
    const JumpSeq vj = draw_jumps(d.lam_r, d.r_law, horizon, rv, true);
    const JumpSeq pj = draw_jumps(d.lam_p, d.p_law, horizon, rp, false);

    // Fine partition: uniform h_fine grid merged with all jump epochs.
    // fine_k holds the uniform-grid index (for coarse-membership tests) or -1.
    struct Node {
      double t;
      long k;
      int vjump;  // index into vj, or -1
      int pjump;
    };
    std::vector<Node> nodes;
    const long n_fine = std::lround(std::ceil(horizon / h_fine));
    nodes.reserve(static_cast<std::size_t>(n_fine) + vj.t.size() + pj.t.size());
    for (long k = 1; k <= n_fine; ++k)
      nodes.push_back({std::min(h_fine * static_cast<double>(k), horizon), k, -1, -1});
    for (std::size_t i = 0; i < vj.t.size(); ++i)
      nodes.push_back({vj.t[i], -1, static_cast<int>(i), -1});
    for (std::size_t i = 0; i < pj.t.size(); ++i)
      nodes.push_back({pj.t[i], -1, -1, static_cast<int>(i)});
    std::sort(nodes.begin(), nodes.end(),
              [](const Node& a, const Node& b) { return a.t < b.t; });

    // Brownian increments per fine segment, shared by every step size.
    std::vector<double> dwv(nodes.size(), 0.0), dwp(nodes.size(), 0.0);
    {
      double t_prev = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double dt = nodes[i].t - t_prev;
        const double sdt = dt > 0.0 ? std::sqrt(dt) : 0.0;
        if (d.sigma > 0.0) dwv[i] = sdt * rv.normal();
        if (d.sigma_p > 0.0) dwp[i] = sdt * rp.normal();
        t_prev = nodes[i].t;
      }
    }

    for (std::size_t gi = 0; gi < grid_steps.size(); ++gi) {
      const double h = grid_steps[gi];
      const long ratio = std::lround(h / h_fine);
      double v = 0.0, y = 0.0, e_cur = 1.0, x_eul = u;
      double dt_acc = 0.0, dwv_acc = 0.0, dwp_acc = 0.0;
      double t_prev = 0.0, max_err = 0.0;

      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& nd = nodes[i];
        dt_acc += nd.t - t_prev;
        dwv_acc += dwv[i];
        dwp_acc += dwp[i];
        t_prev = nd.t;
        const bool coarse = (nd.k >= 0 && nd.k % ratio == 0) || nd.vjump >= 0 ||
                            nd.pjump >= 0 || nd.t >= horizon;
        if (!coarse) continue;

        // Continuous part of the cell.
        const double dv = d.cv * dt_acc + d.sigma * dwv_acc;
        const double v_end = v + dv;
        double seg;
        if (d.sigma > 0.0) {
          seg = 0.5 * dt_acc * (e_cur + std::exp(-v_end));
        } else {
          const double a = d.cv * dt_acc;
          seg = e_cur * dt_acc * ((std::fabs(a) < 1e-14) ? 1.0 : -std::expm1(-a) / a);
        }
        y -= d.cp * seg;
        if (d.sigma_p > 0.0) y -= d.sigma_p * e_cur * dwp_acc;
        const double dp_cont = d.cp * dt_acc + d.sigma_p * dwp_acc;
        x_eul += dp_cont + x_eul * (cr * dt_acc + d.sigma * dwv_acc);

        v = v_end;
        e_cur = std::exp(-v);
        if (nd.pjump >= 0) {
          const double xi = pj.size[static_cast<std::size_t>(nd.pjump)];
          y -= e_cur * xi;  // left limit in V: its jump is applied below
          x_eul += xi;
        }
        if (nd.vjump >= 0) {
          const double lx = vj.size[static_cast<std::size_t>(nd.vjump)];
          // x_eul reacts to the raw R-jump e^{lx}-1 against the pre-jump value
          x_eul += (x_eul - (nd.pjump >= 0 ? pj.size[static_cast<std::size_t>(nd.pjump)] : 0.0)) *
                   std::expm1(lx);
          v += lx;
          e_cur = std::exp(-v);
        }
        const bool compare_here = (nd.k >= 0 && nd.k % cmp_ratio_fine == 0) ||
                                  nd.vjump >= 0 || nd.pjump >= 0 || nd.t >= horizon;
        if (compare_here) {
          const double x_rec = std::exp(v) * (u - y);
          max_err = std::max(max_err, std::fabs(x_rec - x_eul));
        }
        dt_acc = dwv_acc = dwp_acc = 0.0;
      }
      err_sum[gi] += max_err;
    }
  }
  for (double& e : err_sum) e /= static_cast<double>(n_paths);
  return err_sum;
}

}  // namespace levyruin
