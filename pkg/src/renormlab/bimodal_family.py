"""Symmetric cubic bimodal family.

Every member maps [0, 1] onto itself, fixes 1/2, and sends its left critical
point to 0 and its right critical point to 1.  The family is parametrised by
the abscissa ``c`` of one critical point; ``Side.LEFT`` uses the left critical
point (``c < 1/2``) and ``Side.RIGHT`` the right one (``c > 1/2``).  Both
branches describe the same map when ``c_right = 1 - c_left``.

Evaluation is vectorised: ``x`` (and, for the module-private helpers, ``c``)
may be numpy arrays.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Side",
    "AdmissibilityError",
    "MapParameter",
    "Orbit",
    "LEFT_LIMIT",
    "RIGHT_LIMIT",
    "admissible_interval",
    "eval_map",
    "derivative",
    "critical_points",
    "orbit",
    "base_interval",
]

LEFT_LIMIT = (3.0 - math.sqrt(3.0)) / 6.0
RIGHT_LIMIT = (3.0 + math.sqrt(3.0)) / 6.0

_RANGE_SLACK = 1e-12


class Side(enum.Enum):
    LEFT = "l"
    RIGHT = "r"

    @property
    def mirror(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT

    @classmethod
    def parse(cls, text: str | "Side") -> "Side":
        if isinstance(text, Side):
            return text
        key = str(text).strip().lower()
        if key in ("l", "left"):
            return cls.LEFT
        if key in ("r", "right"):
            return cls.RIGHT
        raise ValueError(f"unknown side {text!r}; expected 'l' or 'r'")


class AdmissibilityError(ValueError):
    """Parameter outside the open admissible interval of its side."""


def admissible_interval(side: Side) -> tuple[float, float]:
    """Open parameter interval on which the base intervals I_L, I_R are disjoint."""
    if side is Side.LEFT:
        return 0.0, LEFT_LIMIT
    return RIGHT_LIMIT, 1.0


def _check_admissible(side: Side, c) -> None:
    lo, hi = admissible_interval(side)
    arr = np.asarray(c, dtype=float)
    if not np.all((arr > lo) & (arr < hi)):
        raise AdmissibilityError(
            f"c={c!r} outside the admissible interval ({lo:.6f}, {hi:.6f}) for side {side.name}"
        )


def _coefficients(side: Side, c):
    """Power-basis coefficients (a0, a1, a2, a3) of the cubic, lowest first."""
    c = np.asarray(c, dtype=float) if not isinstance(c, float) else c
    if side is Side.LEFT:
        d = (1.0 - 2.0 * c) ** 3
        const = 1.0 - 6.0 * c + 9.0 * c * c - 4.0 * c**3
    else:
        d = (2.0 * c - 1.0) ** 3
        const = 4.0 * c**3 - 3.0 * c * c
    # B(x) = 1 - (const + (6c - 6c^2) x - 3 x^2 + 2 x^3) / d
    a0 = 1.0 - const / d
    a1 = -(6.0 * c - 6.0 * c * c) / d
    a2 = 3.0 / d
    a3 = -2.0 / d
    return a0, a1, a2, a3


def _horner(coeffs, x):
    a0, a1, a2, a3 = coeffs
    return a0 + x * (a1 + x * (a2 + x * a3))


def _raw_eval(side: Side, c, x):
    return _horner(_coefficients(side, c), x)


@dataclass(frozen=True)
class MapParameter:
    """Critical-point abscissa ``c`` together with the branch it selects."""

    c: float
    side: Side = Side.LEFT

    def __post_init__(self):
        object.__setattr__(self, "side", Side.parse(self.side))
        object.__setattr__(self, "c", float(self.c))
        _check_admissible(self.side, self.c)

    @property
    def coefficients(self) -> tuple[float, float, float, float]:
        return _coefficients(self.side, self.c)

    def mirror(self) -> "MapParameter":
        """The same map described through its other critical point."""
        return MapParameter(1.0 - self.c, self.side.mirror)


@dataclass(frozen=True)
class Orbit:
    start: float
    values: tuple[float, ...]

    def __getitem__(self, k: int) -> float:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)


def eval_map(p: MapParameter, x):
    """Evaluate B_c at ``x`` (scalar or array) in [0, 1].

    The result is asserted, not clipped, to lie in [0, 1] up to 1e-12.
    """
    xa = np.asarray(x, dtype=float)
    if np.any((xa < 0.0) | (xa > 1.0)):
        raise ValueError(f"x must lie in [0, 1], got {x!r}")
    y = _horner(p.coefficients, x)
    ya = np.asarray(y)
    assert np.all((ya >= -_RANGE_SLACK) & (ya <= 1.0 + _RANGE_SLACK)), (p, x, y)
    return y


def derivative(p: MapParameter, x):
    _, a1, a2, a3 = p.coefficients
    return a1 + x * (2.0 * a2 + 3.0 * a3 * x)


def critical_points(p: MapParameter) -> tuple[float, float]:
    """Both critical points, ordered left to right."""
    return tuple(sorted((p.c, 1.0 - p.c)))


def orbit(p: MapParameter, x0: float, k: int) -> Orbit:
    """``(x0, B(x0), ..., B^k(x0))``."""
    if k < 1:
        raise ValueError("orbit length k must be >= 1")
    values = [float(x0)]
    for _ in range(k):
        values.append(float(eval_map(p, values[-1])))
    return Orbit(float(x0), tuple(values))


def base_interval(p: MapParameter) -> tuple[float, float]:
    """I_L = [0, b_c(0)] on the left, I_R = [b~_c(1), 1] on the right."""
    if p.side is Side.LEFT:
        return 0.0, float(eval_map(p, 0.0))
    return float(eval_map(p, 1.0)), 1.0


def orbit_array(side: Side, c, x0: float, k: int) -> list:
    """Vectorised orbit over an array of parameters; no admissibility check."""
    coeffs = _coefficients(side, np.asarray(c, dtype=float))
    values = [np.full(np.shape(c), float(x0))]
    for _ in range(k):
        values.append(_horner(coeffs, values[-1]))
    return values
