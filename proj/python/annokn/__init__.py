"""Annotation-informed knockoff selection."""

from ._core import (
    AnnoknError,
    PipelineConfig,
    annogk_fit,
    annokn_fit,
    build_sigma_m,
    knockoff_threshold,
    lcd_stats,
    make_pseudo_split,
    sample_knockoff_zscores,
    sample_knockoffs,
    simulate_ar1,
    solve_d_equicorrelated,
    solve_lasso,
    standardize,
)

__all__ = [
    "AnnoknError",
    "PipelineConfig",
    "annogk_fit",
    "annokn_fit",
    "build_sigma_m",
    "knockoff_threshold",
    "lcd_stats",
    "make_pseudo_split",
    "sample_knockoff_zscores",
    "sample_knockoffs",
    "simulate_ar1",
    "solve_d_equicorrelated",
    "solve_lasso",
    "standardize",
]
