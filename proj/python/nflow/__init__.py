"""Spectral solver for u_t = u^p (u_xx + u - mean u) on [0, a] with Neumann ends."""

from ._core import (
    ConfigError,
    DomainNotMultipleOfPi,
    Error,
    ExponentOutOfRange,
    Field,
    InvalidArgument,
    NonPositiveField,
    NoRoot,
    StepCollapse,
    classify,
    closure_integral,
    compute_A0,
    conserved_integral,
    cosine_family_integral,
    energy,
    ls_check,
    ls_constant,
    lyapunov,
    match_steady_state,
    pi,
    predict_limit,
    reconstruct_curve,
    rhs,
    run_ls_suite,
    simulate,
    single_mode_energy,
    solve_BA,
)

__all__ = [name for name in dir() if not name.startswith("_")]
