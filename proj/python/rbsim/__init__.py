from ._core import (
    CliffordTable,
    ConfigError,
    FitResult,
    PulseTable,
    RunConfig,
    default_config,
    eq2_error,
    fit_eta,
    invert_eta,
    load_config,
    parse_config,
    rb_survival_model,
    run,
    run_rb,
    serialize_config,
)

__all__ = [
    "CliffordTable",
    "ConfigError",
    "FitResult",
    "PulseTable",
    "RunConfig",
    "default_config",
    "eq2_error",
    "fit_eta",
    "invert_eta",
    "load_config",
    "parse_config",
    "rb_survival_model",
    "run",
    "run_rb",
    "serialize_config",
]
