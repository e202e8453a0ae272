"""Derivative-free optimization with periodic non-commutative exploration maps."""

from ._core import (
    NcmapError,
    brockett_run,
    build_C,
    build_P,
    build_P_tilde,
    calc_theta,
    catalog_sweep,
    check_interlacing,
    compute_T_direct,
    compute_T_via_P,
    config_text,
    construct_W,
    evaluate_pair,
    orthogonality_defect,
    preset_ids,
    preset_text,
    reference_coordinate_sequence,
    run_preset,
    shoelace_areas,
    skew_block_diagonalize,
    skew_deltas,
    target_matrix,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
