"""Scenario files: JSON descriptions of verification problems.

A scenario selects a symmetric function by name and supplies matrices in
the common format {"n": int, "rows": [[...], ...]}:

    {
      "theta": "neg-orthant",
      "X": {"n": 2, "rows": [[0, 0], [0, -1]]},
      "Y": {...},          optional subgradient candidate
      "H": {...},          optional direction
      "W": {...},          optional second-order direction
      "phi": {"linear": {...}}
             or {"quadratic": {"C": {...}, "weight": w, "X0": {...}}}
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, InputError
from .optimality import SmoothObjective
from .spectral import SpectralFunction
from .symmat import load_matrix

__all__ = ["Scenario", "load_scenario"]


@dataclass(frozen=True)
class Scenario:
    fn: SpectralFunction
    X: np.ndarray
    Y: Optional[np.ndarray] = None
    H: Optional[np.ndarray] = None
    W: Optional[np.ndarray] = None
    phi: Optional[SmoothObjective] = None
    asymmetry: float = 0.0


def _matrix(obj, what: str) -> np.ndarray:
    try:
        return load_matrix(obj).matrix
    except InputError as exc:
        raise ConfigError(f"bad matrix for {what!r}: {exc}") from exc


def _smooth(obj) -> SmoothObjective:
    if "linear" in obj:
        return SmoothObjective.linear(_matrix(obj["linear"], "phi.linear"))
    if "quadratic" in obj:
        q = obj["quadratic"]
        if "C" not in q or "weight" not in q:
            raise ConfigError("quadratic phi needs keys 'C' and 'weight'")
        X0 = _matrix(q["X0"], "phi.quadratic.X0") if "X0" in q else None
        return SmoothObjective.quadratic_tilt(_matrix(q["C"], "phi.quadratic.C"), float(q["weight"]), X0)
    raise ConfigError("phi must be {'linear': matrix} or {'quadratic': {...}}")


def load_scenario(source) -> Scenario:
    if isinstance(source, (str, bytes)):
        with open(source, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    else:
        obj = source
    if not isinstance(obj, dict):
        raise ConfigError("scenario must be a JSON object")
    if "theta" not in obj or "X" not in obj:
        raise ConfigError("scenario needs at least 'theta' and 'X'")
    try:
        fn = SpectralFunction.by_name(str(obj["theta"]))
    except InputError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        loaded = load_matrix(obj["X"])
    except InputError as exc:
        raise ConfigError(f"bad matrix for 'X': {exc}") from exc
    return Scenario(
        fn=fn,
        X=loaded.matrix,
        Y=_matrix(obj["Y"], "Y") if "Y" in obj else None,
        H=_matrix(obj["H"], "H") if "H" in obj else None,
        W=_matrix(obj["W"], "W") if "W" in obj else None,
        phi=_smooth(obj["phi"]) if "phi" in obj else None,
        asymmetry=loaded.asymmetry,
    )
