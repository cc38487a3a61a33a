"""Phase-space simulator for two gravitationally interacting masses."""

from ._core import (  # noqa: F401
    ConfigError,
    InvalidArgument,
    NumericalError,
    PhysicalParams,
    SnapshotError,
    config_digest,
    dawson,
    derive_scales,
    log_negativity_at,
    pattern_function,
    perturbation_strength,
    perturbative_wigner,
    read_snapshot,
    run,
)
