"""Levy-driven reserve simulation: cumulant analysis, perpetuity sampling and
ruin-tail estimation. Thin wrapper over the _levyruin extension."""

from _levyruin import (  # noqa: F401
    LevyruinError,
    analyze_cumulant,
    classify_regime,
    effective_domain,
    esscher_tilt,
    estimate_g_bar,
    estimate_goldie_constant,
    estimate_psi,
    evaluate_H,
    find_root_beta,
    fit_tail,
    preset_names,
    run_autoregression,
    sample_ladder_time,
    sample_mq,
    sample_path,
    sample_q_theta,
    supremum_tail,
    validate,
    y_infinity_ensemble,
)

__all__ = [
    "LevyruinError",
    "analyze_cumulant",
    "classify_regime",
    "effective_domain",
    "esscher_tilt",
    "estimate_g_bar",
    "estimate_goldie_constant",
    "estimate_psi",
    "evaluate_H",
    "find_root_beta",
    "fit_tail",
    "preset_names",
    "run_autoregression",
    "sample_ladder_time",
    "sample_mq",
    "sample_path",
    "sample_q_theta",
    "supremum_tail",
    "validate",
    "y_infinity_ensemble",
]
