"""SVM channel estimation and data detection for one-bit massive MIMO receivers."""

from ._core import (
    ConfigError,
    InvalidInput,
    SvmSolution,
    block_lift,
    circulant,
    constellation_points,
    detect,
    gamma_schedule,
    iid_channel,
    list_scenarios,
    one_bit_quantize,
    rotation_lift,
    run_experiment,
    side_by_side,
    solve_soft_margin,
    svm_ce,
    unitary_dft,
)

__all__ = [
    "ConfigError",
    "InvalidInput",
    "SvmSolution",
    "block_lift",
    "circulant",
    "constellation_points",
    "detect",
    "gamma_schedule",
    "iid_channel",
    "list_scenarios",
    "one_bit_quantize",
    "rotation_lift",
    "run_experiment",
    "side_by_side",
    "solve_soft_margin",
    "svm_ce",
    "unitary_dft",
]
