"""Fixed-point indices of homoclinic cells."""

import json
import os

from ._core import (
    HomcellError,
    __version__,
    canonical_expression,
    evaluate_map,
    fixed_points,
    zoo,
)
from . import _core


def run(config, out_dir=""):
    """Run a scenario given as a dict, JSON text or a file path; returns (exit_code, report dict)."""
    if isinstance(config, os.PathLike) or (isinstance(config, str) and not config.lstrip().startswith("{")):
        with open(config, "rb") as fh:
            text = fh.read().decode()
    else:
        text = config if isinstance(config, str) else json.dumps(config)
    code, report = _core.run_config(text, out_dir)
    return code, json.loads(report)


def map_spec(**spec):
    return json.dumps(spec)


__all__ = [
    "HomcellError",
    "__version__",
    "canonical_expression",
    "evaluate_map",
    "fixed_points",
    "map_spec",
    "run",
    "zoo",
]
