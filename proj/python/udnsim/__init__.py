"""Monte Carlo SINR coverage heat maps for dense small-cell networks.

Configs are plain dicts with the same flat keys as the JSON scenario files
used by the command line tool.
"""

import json

from ._core import (
    ConfigError,
    CoverageMap,
    colorize,
    diff,
    los_probability,
    path_loss_db,
)
from . import _core

__all__ = [
    "ConfigError",
    "CoverageMap",
    "colorize",
    "coverage_at",
    "deployment",
    "diff",
    "los_probability",
    "normalize",
    "path_loss_db",
    "preset",
    "scan",
]


def preset(figure, density):
    """Fully specified config of one heat-map panel, e.g. preset("fig4a", "lte50")."""
    return json.loads(_core._preset(figure, density))


def normalize(config):
    """Validated config with every key filled in; raises ConfigError."""
    return json.loads(_core._normalize(json.dumps(config)))


def deployment(config):
    """BS positions (x_km, y_km) the config's seed produces."""
    return _core._deployment(json.dumps(config))


def scan(config, workers=0, bs=None):
    """Coverage map over the config's pixel grid. `bs` replaces the seeded BS layout."""
    return _core._scan(json.dumps(config), workers, bs)


def coverage_at(config, x_km, y_km, pixel=0):
    return _core._coverage_at(json.dumps(config), x_km, y_km, pixel)
