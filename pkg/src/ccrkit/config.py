"""Runtime limits, overridable from the environment."""

import os

DEFAULT_DEGREE_CAP = 12
DEFAULT_QUADRATURE_NODES = 40

DEGREE_CAP_ENV = "CCRKIT_DEGREE_CAP"
QUADRATURE_NODES_ENV = "CCRKIT_QUADRATURE_NODES"


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    value = int(raw)
    if value < 0:
        raise ValueError(f"{name} must be nonnegative, got {value}")
    return value


def degree_cap() -> int:
    """Largest Wick degree a product may produce."""
    return _env_int(DEGREE_CAP_ENV, DEFAULT_DEGREE_CAP)


def quadrature_nodes() -> int:
    """Gauss-Hermite node budget per mode for the quadrature oracle."""
    return _env_int(QUADRATURE_NODES_ENV, DEFAULT_QUADRATURE_NODES)
