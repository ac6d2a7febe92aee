"""Python interface to the sleepsched simulator.

Configurations are plain dicts with the same keys as the JSON config files.
Missing keys take the reference-config values.
"""

import json

from . import _core
from ._core import ConfigParseError, ConfigValidationError, OracleError

__all__ = [
    "ConfigParseError",
    "ConfigValidationError",
    "OracleError",
    "compute_B",
    "default_config",
    "minimize_energy",
    "run",
    "run_slots_csv",
    "slot_energy",
    "stability_margin",
    "sweep",
    "verify",
]


def _dump(config):
    return json.dumps(config or {})


def default_config():
    return json.loads(_core.default_config())


def run(config=None):
    """Simulate and return the metrics report as a dict."""
    return json.loads(_core.run_metrics(_dump(config)))


def run_slots_csv(config=None):
    """Simulate and return the per-slot trace as CSV text."""
    return _core.run_slots_csv(_dump(config))


def sweep(v_list, policies=("ESS",), seeds=1, seed_base=1, jobs=1, config=None):
    """One metrics dict per (policy, V, seed), in that order."""
    return json.loads(
        _core.sweep(_dump(config), list(policies), [float(v) for v in v_list], seed_base, seeds, jobs)
    )


def minimize_energy(targets, grid_step=0.02, config=None):
    return json.loads(_core.minimize_energy(_dump(config), [float(t) for t in targets], grid_step))


def stability_margin(targets, grid_step=0.02, config=None):
    return _core.stability_margin(_dump(config), [float(t) for t in targets], grid_step)


def verify(config=None, grid_step=0.02, slack=0.05):
    return json.loads(_core.verify(_dump(config), grid_step, slack))


def slot_energy(prev, next, served=0, transmitting=False, config=None):
    return _core.slot_energy(prev, next, served, transmitting, _dump(config))


def compute_B(config=None):
    return _core.compute_B(_dump(config))
