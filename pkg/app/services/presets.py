# app/services/presets.py

"""Built-in experiment documents, selectable with ``--preset NAME``."""

import math
from typing import Callable

from app.core.exceptions import ConfigError
from app.schemas.config import ConfigDocument


def _smin_tail() -> ConfigDocument:
    return ConfigDocument.from_mapping({
        "ensemble": {"n": 200, "p": 0.2, "dist": "rademacher", "diagonal": "zero"},
        "experiment": {
            "name": "thm1.1",
            "kind": "tail_curve",
            "trials": 5000,
            "eps_grid": [0.0, 0.05, 0.1, 0.2, 0.4, math.inf],
        },
    })


def _heavy_tail_norm() -> ConfigDocument:
    return ConfigDocument.from_mapping({
        "ensemble": {"n": 100, "p": 0.1, "dist": "pareto", "rho": 4.5},
        "experiment": {
            "name": "thm1.2ii",
            "kind": "norm_scan",
            "trials": 100,
            "alpha": 0.5,
            "n_grid": [100, 6400],
        },
    })


def _norm_lower_bound() -> ConfigDocument:
    return ConfigDocument.from_mapping({
        "ensemble": {"n": 100, "p": 0.1, "dist": "rademacher"},
        "experiment": {
            "name": "thm1.4",
            "kind": "norm_scan",
            "trials": 100,
            "alpha": 0.5,
            "n_grid": [100, 400, 1600],
        },
    })


def _directed_er() -> ConfigDocument:
    n = 300
    return ConfigDocument.from_mapping({
        "ensemble": {"n": n, "p": 2.0 * math.log(n) / n, "diagonal": "zero", "adjacency_mode": True},
        "experiment": {
            "name": "thm1.7",
            "kind": "tail_curve",
            "trials": 500,
            "eps_grid": [0.0, 0.05, 0.1, 0.2, 0.4, 0.8],
        },
    })


def _zero_row() -> ConfigDocument:
    n = 200
    return ConfigDocument.from_mapping({
        "ensemble": {"n": n, "p": math.log(n) / (2.0 * n), "dist": "constant", "value": 1.0},
        "experiment": {
            "name": "zero-row",
            "kind": "zero_row",
            "statistic": "zero_row",
            "trials": 10000,
        },
    })


PRESETS: dict[str, Callable[[], ConfigDocument]] = {
    "thm1.1": _smin_tail,
    "thm1.2ii": _heavy_tail_norm,
    "thm1.4": _norm_lower_bound,
    "thm1.7": _directed_er,
    "zero-row": _zero_row,
}


def load_preset(name: str) -> ConfigDocument:
    """
    Raises:
        ConfigError: If no preset has this name.
    """
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
