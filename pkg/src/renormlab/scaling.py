"""Scaling ratios, gap ratios and the induced renormalization map R(c).

For a parameter ``c`` the first five points of the critical-value orbit fix
the relative sizes of the three next-generation intervals (the scaling
triple) and of the two gaps between them.  ``R(c)`` is the critical point of
the rescaled first-return map; its unstable fixed point ``c*`` gives the
stationary scaling data.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .bimodal_family import (
    MapParameter,
    Side,
    _check_admissible,
    _raw_eval,
    admissible_interval,
    orbit_array,
)

__all__ = [
    "ScalingTriple",
    "GapPair",
    "FeasibleDomain",
    "Stability",
    "FixedPointResult",
    "ContinuumPoint",
    "ContinuumSweep",
    "NoSignChange",
    "DegenerateRatio",
    "CONSTRAINT_NAMES",
    "DEFAULT_EPS_WINDOW",
    "scaling_ratios",
    "gap_ratios",
    "renorm_map",
    "constraint_values",
    "feasible_domain",
    "find_fixed_point",
    "fixed_point",
    "perturbed_ratios",
    "perturbed_renorm_map",
    "find_perturbed_fixed_point",
    "continuum_sweep",
    "bisect_root",
]

log = logging.getLogger(__name__)

CONSTRAINT_NAMES = ("s0", "s1", "s2", "g0", "g1")
DEFAULT_EPS_WINDOW = (0.98, 1.02)
DEFAULT_PROPER_MARGIN = 1e-4
MULTIPLIER_STEP = 1e-6
MARGINAL_BAND = 1e-6


class NoSignChange(ArithmeticError):
    """R(c) - c keeps a constant sign on the bracket."""


class DegenerateRatio(ZeroDivisionError):
    """The middle scaling ratio vanished, so R(c) is undefined."""


@dataclass(frozen=True)
class ScalingTriple:
    s0: float
    s1: float
    s2: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.s0, self.s1, self.s2)

    @property
    def total(self) -> float:
        return self.s0 + self.s1 + self.s2

    def in_simplex(self) -> bool:
        return self.s0 > 0 and self.s1 > 0 and self.s2 > 0 and self.total < 1

    def boundary_distance(self) -> float:
        """Euclidean distance to the boundary of the open simplex (negative outside)."""
        return min(self.s0, self.s1, self.s2, (1.0 - self.total) / math.sqrt(3.0))

    def is_proper(self, margin: float = DEFAULT_PROPER_MARGIN) -> bool:
        return self.in_simplex() and self.boundary_distance() >= margin


@dataclass(frozen=True)
class GapPair:
    g0: float
    g1: float

    def positive(self) -> bool:
        return self.g0 > 0 and self.g1 > 0


class Stability(enum.Enum):
    UNSTABLE = "unstable"
    STABLE = "stable"
    MARGINAL = "marginal"

    @classmethod
    def classify(cls, multiplier: float) -> "Stability":
        if abs(multiplier) > 1.0 + MARGINAL_BAND:
            return cls.UNSTABLE
        if abs(multiplier) < 1.0 - MARGINAL_BAND:
            return cls.STABLE
        return cls.MARGINAL


@dataclass(frozen=True)
class FixedPointResult:
    side: Side
    c_star: float
    residual: float
    multiplier: float
    stability: Stability
    epsilon: float = 1.0

    @property
    def triple(self) -> ScalingTriple:
        return perturbed_ratios(self.side, self.c_star, self.epsilon, window=None)


@dataclass(frozen=True)
class FeasibleDomain:
    side: Side
    intervals: tuple[tuple[float, float], ...]
    excluded_points: tuple[float, ...] = ()
    # constraint(s) found to vanish at each boundary or excluded point
    active_constraints: tuple[tuple[float, tuple[str, ...]], ...] = ()

    @property
    def endpoints(self) -> list[float]:
        pts = sorted({p for iv in self.intervals for p in iv})
        return pts

    def component(self, index: int) -> tuple[float, float]:
        return self.intervals[index]

    def contains(self, c: float) -> bool:
        return any(lo < c < hi for lo, hi in self.intervals)


# -- raw orbit-based quantities ----------------------------------------------


def _terms(side: Side, c, epsilon=1.0):
    """Return (s0, s1, s2, g0, g1, o) for scalar or array c, unvalidated."""
    start = 0.0 if side is Side.LEFT else 1.0
    o = orbit_array(side, c, start, 5)
    if side is Side.LEFT:
        scale = o[1]
        pushed = o[4] - (1.0 - epsilon) * o[4]
        s0 = (o[1] - pushed) / scale
        s1 = (o[2] - _raw_eval(side, c, pushed)) / scale
        s2 = o[3] / scale
        g0 = (o[4] - o[2]) / scale
        g1 = (o[5] - o[3]) / scale
    else:
        # the perturbation scales the distance of b~^4(1) from 1, mirroring the left case
        scale = 1.0 - o[1]
        pushed = o[4] + (1.0 - epsilon) * (1.0 - o[4])
        s0 = (pushed - o[1]) / scale
        s1 = (_raw_eval(side, c, pushed) - o[2]) / scale
        s2 = (1.0 - o[3]) / scale
        g0 = (o[2] - o[4]) / scale
        g1 = (o[3] - o[5]) / scale
    return s0, s1, s2, g0, g1, o


def _as_float(v):
    return float(v) if np.ndim(v) == 0 else v


def scaling_ratios(side: Side, c) -> ScalingTriple:
    """Raw scaling triple at ``c``; simplex membership is not enforced."""
    side = Side.parse(side)
    _check_admissible(side, c)
    s0, s1, s2, *_ = _terms(side, c)
    return ScalingTriple(_as_float(s0), _as_float(s1), _as_float(s2))


def gap_ratios(side: Side, c) -> GapPair:
    """Raw normalised gaps between I_0/I_1 and I_1/I_2; sign not enforced."""
    side = Side.parse(side)
    _check_admissible(side, c)
    *_, g0, g1, _o = _terms(side, c)
    return GapPair(_as_float(g0), _as_float(g1))


def constraint_values(side: Side, c) -> dict[str, object]:
    """The five quantities that must be positive on the feasible domain."""
    side = Side.parse(side)
    s0, s1, s2, g0, g1, _ = _terms(side, np.asarray(c, dtype=float))
    return dict(zip(CONSTRAINT_NAMES, (s0, s1, s2, g0, g1)))


def _renorm(side: Side, c, epsilon=1.0):
    s0, s1, s2, g0, g1, o = _terms(side, c, epsilon)
    if np.ndim(s1) == 0 and s1 == 0.0:
        raise DegenerateRatio(f"s1 vanishes at c={c!r}")
    if side is Side.LEFT:
        return (o[2] - c) / s1
    return 1.0 - (c - o[2]) / s1


def renorm_map(side: Side, c):
    """R(c): critical point of the renormalised map."""
    side = Side.parse(side)
    _check_admissible(side, c)
    return _as_float(_renorm(side, c))


# -- feasible domain ----------------------------------------------------------


def _indicator(side: Side, c) -> np.ndarray:
    vals = _terms(side, c)[:5]
    ok = np.ones(np.shape(c), dtype=bool)
    for v in vals:
        ok &= v > 0
    return ok


def _bisect_bool(pred: Callable[[float], bool], lo: float, hi: float, tol: float) -> float:
    """Locate the switch of a boolean predicate with pred(lo) != pred(hi)."""
    p_lo = pred(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pred(mid) == p_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _touch_point(func: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Minimiser of a smooth function on [lo, hi] via sign of its central difference."""
    h = max(1e-9, 1e-3 * (hi - lo))

    def slope(x):
        return func(x + h) - func(x - h)

    a, b = lo, hi
    if slope(a) > 0 or slope(b) < 0:
        return a if func(a) < func(b) else b
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        if slope(m) < 0:
            a = m
        else:
            b = m
        h = max(min(h, 0.25 * (b - a)), 1e-13)
    return 0.5 * (a + b)


@lru_cache(maxsize=32)
def feasible_domain(
    side: Side,
    grid: int = 100_000,
    refine_tol: float = 1e-9,
    touch_tol: float = 1e-10,
) -> FeasibleDomain:
    """Scan the admissible interval for parameters with all five constraints positive.

    Boundaries are located by sign-change bisection to ``refine_tol``.  Points
    where a constraint touches zero without changing sign split a component
    and are reported in ``excluded_points``.
    """
    side = Side.parse(side)
    if grid < 1000:
        raise ValueError("grid must be at least 1000")
    lo, hi = admissible_interval(side)
    cs = np.linspace(lo, hi, grid + 2)[1:-1]
    vals = _terms(side, cs)[:5]
    ok = np.ones_like(cs, dtype=bool)
    for v in vals:
        ok &= v > 0

    def pred(c: float) -> bool:
        return bool(_indicator(side, np.float64(c)))

    def names_vanishing(c: float) -> tuple[str, ...]:
        # a constraint is active at a boundary when it changes sign across it
        h = 10 * refine_tol
        left = _terms(side, np.float64(c - h))[:5]
        right = _terms(side, np.float64(c + h))[:5]
        return tuple(n for n, a, b in zip(CONSTRAINT_NAMES, left, right) if (a > 0) != (b > 0))

    boundaries: list[float] = []
    active: list[tuple[float, tuple[str, ...]]] = []
    for i in np.nonzero(ok[1:] != ok[:-1])[0]:
        b = _bisect_bool(pred, float(cs[i]), float(cs[i + 1]), refine_tol)
        boundaries.append(b)
        active.append((b, names_vanishing(b)))

    # components from the boolean runs
    raw: list[list[float]] = []
    start = lo if ok[0] else None
    bi = iter(boundaries)
    for i in range(len(cs) - 1):
        if ok[i] != ok[i + 1]:
            b = next(bi)
            if ok[i]:
                raw.append([start, b])
                start = None
            else:
                start = b
    if start is not None:
        raw.append([start, hi])

    # interior touches: local minima of a constraint that reach zero
    touches: list[tuple[float, str]] = []
    for name, v in zip(CONSTRAINT_NAMES, vals):
        inner = ok[:-2] & ok[1:-1] & ok[2:]
        is_min = inner & (v[1:-1] <= v[:-2]) & (v[1:-1] <= v[2:])
        for j in np.nonzero(is_min)[0] + 1:
            k = CONSTRAINT_NAMES.index(name)

            def f(c, k=k):
                return float(_terms(side, np.float64(c))[k])

            c0 = _touch_point(f, float(cs[j - 1]), float(cs[j + 1]), 1e-14)
            if f(c0) <= touch_tol:
                touches.append((c0, name))

    touches.sort()
    excluded: list[float] = []
    for c0, name in touches:
        if excluded and abs(c0 - excluded[-1][0]) < 1e-7:
            excluded[-1][1].append(name)
            excluded[-1][2].append(c0)
        else:
            excluded.append([c0, [name], [c0]])
    excluded_pts = []
    for _, names, pts in excluded:
        p = float(np.mean(pts))
        excluded_pts.append(p)
        active.append((p, tuple(names)))

    intervals: list[tuple[float, float]] = []
    for a, b in raw:
        cuts = [p for p in excluded_pts if a < p < b]
        edges = [a, *cuts, b]
        intervals.extend((edges[k], edges[k + 1]) for k in range(len(edges) - 1))
    active.sort()
    return FeasibleDomain(side, tuple(intervals), tuple(excluded_pts), tuple(active))


# -- root finding -------------------------------------------------------------


def bisect_root(func: Callable[[float], float], lo: float, hi: float, tol: float,
                max_iter: int = 200) -> float:
    """Bisection with a secant polish; requires a sign change on [lo, hi]."""
    f_lo, f_hi = func(lo), func(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoSignChange(f"no sign change on [{lo!r}, {hi!r}]")
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = func(mid)
        if f_mid == 0.0:
            return mid
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    best, f_best = (lo, f_lo) if abs(f_lo) <= abs(f_hi) else (hi, f_hi)
    # secant polish inside the final bracket
    x0, f0, x1, f1 = lo, f_lo, hi, f_hi
    for _ in range(3):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not (lo <= x2 <= hi):
            break
        f2 = func(x2)
        if abs(f2) < abs(f_best):
            best, f_best = x2, f2
        x0, f0, x1, f1 = x1, f1, x2, f2
    return best


def _bracketed_roots(func, lo, hi, tol, samples, residual_tol, accept=None):
    xs = np.linspace(lo, hi, samples)
    with np.errstate(divide="ignore", invalid="ignore"):
        fs = np.array([func(float(x)) for x in xs])
    roots = []
    for i in range(samples - 1):
        a, b = fs[i], fs[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)) or np.sign(a) == np.sign(b):
            continue
        r = bisect_root(func, float(xs[i]), float(xs[i + 1]), tol)
        res = abs(func(r))
        # sign changes across a pole of R bisect to the pole; reject by residual
        if res <= residual_tol and (accept is None or accept(r)):
            roots.append((r, res))
    return roots


def _multiplier(func, c, h=MULTIPLIER_STEP):
    return (func(c + h) - func(c - h)) / (2.0 * h)


def find_fixed_point(
    side: Side,
    bracket: tuple[float, float],
    tol: float = 1e-12,
    *,
    residual_tol: float = 1e-10,
    samples: int = 400,
    margin: float = 1e-7,
    near: float | None = None,
) -> FixedPointResult:
    """Fixed point of R on ``bracket`` by bisection on R(c) - c.

    The open bracket is sampled (pulled in by ``margin`` at each end) to find
    sign changes; each is bisected to ``tol`` and kept only if the residual is
    below ``residual_tol``.  Raises NoSignChange if nothing survives.
    """
    side = Side.parse(side)
    return _solve(side, 1.0, bracket, tol, residual_tol, samples, margin, near)


def _solve(side, epsilon, bracket, tol, residual_tol, samples, margin, near):
    lo, hi = bracket
    a_lo, a_hi = admissible_interval(side)
    lo, hi = max(lo, a_lo) + margin, min(hi, a_hi) - margin
    if not lo < hi:
        raise ValueError(f"empty bracket {bracket!r}")

    def g(c):
        return float(_renorm(side, np.float64(c), epsilon)) - c

    def in_simplex(c):
        s0, s1, s2, *_ = _terms(side, np.float64(c), epsilon)
        return s0 > 0 and s1 > 0 and s2 > 0 and s0 + s1 + s2 < 1

    roots = _bracketed_roots(g, lo, hi, tol, samples, residual_tol, accept=in_simplex)
    if not roots:
        raise NoSignChange(
            f"R(c, eps={epsilon}) - c has no admissible root on ({lo:.9f}, {hi:.9f}) for side {side.name}"
        )
    if near is not None:
        c_star, residual = min(roots, key=lambda r: abs(r[0] - near))
    elif len(roots) == 1:
        c_star, residual = roots[0]
    else:
        raise ValueError(f"several fixed points on bracket: {[r for r, _ in roots]}")
    m = _multiplier(lambda c: float(_renorm(side, np.float64(c), epsilon)), c_star)
    return FixedPointResult(side, c_star, residual, m, Stability.classify(m), epsilon)


@lru_cache(maxsize=8)
def fixed_point(side: Side, tol: float = 1e-12) -> FixedPointResult:
    """The unique fixed point of R over the feasible domain of ``side``."""
    side = Side.parse(side)
    dom = feasible_domain(side)
    found = []
    for comp in dom.intervals:
        try:
            found.append(find_fixed_point(side, comp, tol))
        except NoSignChange:
            continue
    if len(found) != 1:
        raise ValueError(f"expected one fixed point on the feasible domain, got {len(found)}")
    return found[0]


# -- epsilon perturbation -----------------------------------------------------


def _check_window(epsilon: float, window) -> None:
    if window is None:
        return
    lo, hi = window
    if not (epsilon > 0 and lo <= epsilon <= hi):
        raise ValueError(f"epsilon={epsilon} outside window [{lo}, {hi}]")


def perturbed_ratios(side: Side, c, epsilon: float,
                     window: tuple[float, float] | None = DEFAULT_EPS_WINDOW) -> ScalingTriple:
    """Scaling triple with the fourth orbit point pushed by the factor ``epsilon``."""
    side = Side.parse(side)
    _check_window(epsilon, window)
    _check_admissible(side, c)
    s0, s1, s2, *_ = _terms(side, c, epsilon)
    return ScalingTriple(_as_float(s0), _as_float(s1), _as_float(s2))


def perturbed_renorm_map(side: Side, c, epsilon: float,
                         window: tuple[float, float] | None = DEFAULT_EPS_WINDOW):
    side = Side.parse(side)
    _check_window(epsilon, window)
    _check_admissible(side, c)
    return _as_float(_renorm(side, c, epsilon))


def find_perturbed_fixed_point(
    side: Side,
    epsilon: float,
    tol: float = 1e-12,
    *,
    radius: float = 0.002,
    window: tuple[float, float] | None = DEFAULT_EPS_WINDOW,
    residual_tol: float = 1e-10,
    samples: int = 800,
) -> FixedPointResult:
    """Fixed point of R(., epsilon) continuing the unperturbed c*.

    The bracket is c* +- ``radius`` clipped to the feasible component holding
    c*.  Among admissible roots the one nearest c* is returned.
    """
    side = Side.parse(side)
    _check_window(epsilon, window)
    base = fixed_point(side)
    comp = next(iv for iv in feasible_domain(side).intervals if iv[0] < base.c_star < iv[1])
    bracket = (max(base.c_star - radius, comp[0]), min(base.c_star + radius, comp[1]))
    return _solve(side, float(epsilon), bracket, tol, residual_tol, samples, 1e-7, base.c_star)


@dataclass(frozen=True)
class ContinuumPoint:
    epsilon: float
    c_star: float
    triple: ScalingTriple
    result: FixedPointResult


@dataclass
class ContinuumSweep:
    side: Side
    points: list[ContinuumPoint] = field(default_factory=list)
    failures: list[tuple[float, str]] = field(default_factory=list)

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def monotone(self) -> bool | None:
        """Whether eps -> c*_eps is strictly monotone over the converged points."""
        if len(self.points) < 2:
            return None
        pts = sorted(self.points, key=lambda p: p.epsilon)
        d = np.diff([p.c_star for p in pts])
        return bool(np.all(d > 0) or np.all(d < 0))


def continuum_sweep(side: Side, epsilons: Iterable[float], tol: float = 1e-12, **kwargs) -> ContinuumSweep:
    """One fixed point per epsilon; failures are collected rather than raised."""
    side = Side.parse(side)
    sweep = ContinuumSweep(side)
    for eps in epsilons:
        eps = float(eps)
        try:
            res = find_perturbed_fixed_point(side, eps, tol, **kwargs)
        except (NoSignChange, ValueError) as exc:
            log.info("epsilon=%s: %s", eps, exc)
            sweep.failures.append((eps, str(exc)))
            continue
        sweep.points.append(ContinuumPoint(eps, res.c_star, res.triple, res))
    return sweep
