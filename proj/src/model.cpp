#include "levyruin/model.hpp"

#include <cmath>

#include "levyruin/errors.hpp"

namespace levyruin {

double compound_drift(const LevyTriplet& t) {
  if (t.jump_intensity <= 0.0 || is_none(t.jump_law)) return t.drift;
  return t.drift - t.jump_intensity * mean_h(t.jump_law);
}

bool is_subordinator(const LevyTriplet& p) {
  if (p.diffusion_var > 0.0) return false;
  if (p.jump_intensity > 0.0 && has_negative_jumps(p.jump_law)) return false;
  // Finite variation with no negative jumps: increasing iff the slope
  // between jumps is nonnegative.
  return compound_drift(p) >= 0.0;
}

std::vector<std::string> validate(const ModelPair& m) {
  std::vector<std::string> out;

  for (const auto* t : {&m.r, &m.p}) {
    const std::string tag = (t == &m.r) ? "R" : "P";
    if (t->diffusion_var < 0.0) out.push_back(tag + " diffusion variance is negative");
    if (t->jump_intensity < 0.0) out.push_back(tag + " jump intensity is negative");
    if (t->jump_intensity > 0.0) {
      if (is_none(t->jump_law))
        out.push_back(tag + " has positive jump intensity but no jump law");
      else if (auto problem = check_law(t->jump_law); !problem.empty())
        out.push_back(tag + " jump law invalid: " + problem);
    }
    if (t->jump_intensity == 0.0 && !is_none(t->jump_law))
      out.push_back(tag + " has a jump law but zero intensity");
  }

  // S.0, clause 1: the jump measure of R puts no mass on ]-inf, -1]. Only
  // atomic laws can violate this; the parametric families live inside
  // ]-1, inf[ by construction (the lognormal support is the open interval).
  if (m.r.jump_intensity > 0.0) {
    if (const auto* a = std::get_if<DiscreteAtoms>(&m.r.jump_law)) {
      for (std::size_t i = 0; i < a->values.size(); ++i) {
        if (a->values[i] <= -1.0 && (a->probs.size() <= i || a->probs[i] > 0.0)) {
          out.push_back("R jump support leaves ]-1,inf[");
          break;
        }
      }
    }
  }

  // S.0, clause 2: sigma^2 and Pi do not vanish simultaneously.
  if (m.r.diffusion_var == 0.0 && m.r.jump_intensity == 0.0)
    out.push_back("R is deterministic (sigma^2 and jump measure both vanish)");

  // S.0, clause 3: P is not a subordinator.
  if (is_subordinator(m.p)) out.push_back("P is a subordinator");

  return out;
}

LogPriceTriplet log_price_triplet(const LevyTriplet& r) {
  LogPriceTriplet v;
  v.diffusion_var = r.diffusion_var;
  v.jump_intensity = r.jump_intensity;
  v.r_jump_law = r.jump_law;

  double correction = 0.0;  // Pi( h(ln(1+x)) - h(x) )
  if (r.jump_intensity > 0.0 && !is_none(r.jump_law)) {
    if (const auto* a = std::get_if<DiscreteAtoms>(&r.jump_law)) {
      for (double x : a->values)
        if (x <= -1.0)
          throw UnsupportedJumpLawError("log price undefined: jumps reach -1");
    }
    correction = r.jump_intensity * (mean_h_log1p(r.jump_law) - mean_h(r.jump_law));
  }
  v.drift = r.drift - 0.5 * r.diffusion_var + correction;

  if (is_none(r.jump_law) || r.jump_intensity <= 0.0) {
    v.v_jump_law = JumpLaw{};
  } else if (const auto* a = std::get_if<DiscreteAtoms>(&r.jump_law)) {
    DiscreteAtoms mapped;
    mapped.probs = a->probs;
    mapped.values.reserve(a->values.size());
    for (double x : a->values) mapped.values.push_back(std::log1p(x));
    v.v_jump_law = JumpLaw{mapped};
  }
  return v;
}

Dynamics make_dynamics(const ModelPair& m) {
  Dynamics d;
  d.sigma = std::sqrt(m.r.diffusion_var);
  d.sigma_p = std::sqrt(m.p.diffusion_var);
  d.lam_r = m.r.jump_intensity;
  d.lam_p = m.p.jump_intensity;
  d.r_law = m.r.jump_law;
  d.p_law = m.p.jump_law;
  d.cv = m.r.drift - 0.5 * m.r.diffusion_var;
  if (d.lam_r > 0.0 && !is_none(d.r_law)) d.cv -= d.lam_r * mean_h(d.r_law);
  d.cp = compound_drift(m.p);
  d.ev1 = d.cv;
  if (d.lam_r > 0.0 && !is_none(d.r_law)) d.ev1 += d.lam_r * mean_log1p(d.r_law);
  return d;
}

}  // namespace levyruin
