"""Comparison-oracle optimization: sparse 1-bit gradient estimation and toy preference alignment."""

from ._compo import (
    CompoError,
    SyntheticObjective,
    ToyPolicy,
    check_sign_agreement,
    clip_small_entries,
    compare_function,
    dpo_grad,
    dpo_loss,
    estimate_normalized_clip,
    make_nonconvex_sparse,
    make_sparse_quadratic,
    practical_preset,
    run_basic,
    run_experiment,
    run_practical,
    sample_unit_sphere,
    schedule_from_theorem,
    solve_1bge_exact,
    split_by_margin,
)

__all__ = [
    "CompoError",
    "SyntheticObjective",
    "ToyPolicy",
    "check_sign_agreement",
    "clip_small_entries",
    "compare_function",
    "dpo_grad",
    "dpo_loss",
    "estimate_normalized_clip",
    "make_nonconvex_sparse",
    "make_sparse_quadratic",
    "practical_preset",
    "run_basic",
    "run_experiment",
    "run_practical",
    "sample_unit_sphere",
    "schedule_from_theorem",
    "solve_1bge_exact",
    "split_by_margin",
]
