"""Partitioned IMEX Runge-Kutta integration with discrete adjoint gradients.

Configurations are plain dicts with the same keys as the JSON config files
read by the ``pimex`` command-line tool.
"""

import json as _json

from . import _core
from ._core import (
    ConfigError,
    FormatError,
    NewtonError,
    OptimizationError,
    PhysicsError,
    PimexError,
    UnknownSchemeError,
    roe_flux,
    scalar_decay_gradient,
    scalar_decay_objective,
    scheme_names,
    tableau,
)

__all__ = [
    "ConfigError",
    "FormatError",
    "NewtonError",
    "OptimizationError",
    "PhysicsError",
    "PimexError",
    "UnknownSchemeError",
    "default_config",
    "grad_check",
    "gradient",
    "normalize_config",
    "optimize",
    "order_study",
    "roe_flux",
    "scalar_decay_gradient",
    "scalar_decay_objective",
    "scheme_names",
    "simulate",
    "tableau",
    "verify_tableau",
]


def _dump(config):
    return _json.dumps(config if config is not None else {})


def default_config(problem="piston"):
    return _json.loads(_core.default_config(problem))


def normalize_config(config):
    return _json.loads(_core.normalize_config(_dump(config)))


def verify_tableau(name):
    return _json.loads(_core.verify_tableau(name))


def simulate(config=None):
    """Forward run; returns ``{"J": ..., "series": {column: [...]}}``."""
    return _json.loads(_core.simulate(_dump(config)))


def grad_check(config=None):
    """Adjoint, direct and finite-difference gradients and their agreement."""
    return _json.loads(_core.grad_check(_dump(config)))


def gradient(config, mu, method="adjoint"):
    return _json.loads(_core.gradient(_dump(config), list(mu), method))


def optimize(config=None):
    return _json.loads(_core.optimize(_dump(config)))


def order_study(config=None):
    return _json.loads(_core.order_study(_dump(config)))
