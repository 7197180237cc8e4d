"""Nested interval towers, the piece-wise affine map f_s and its renormalization.

All geometry is carried as exact affine genealogy: every interval of the
tower is the image of the base interval under a composed ``AffineMap1D``, so
length ratios between levels are products of slopes and never drift.

Iterates of f_s are formed symbolically, branch by branch, by composing the
affine pieces along the itinerary; nothing here samples f_s pointwise.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .bimodal_family import MapParameter, Side, base_interval
from .scaling import (
    DEFAULT_PROPER_MARGIN,
    ScalingTriple,
    _renorm,
    _terms,
)

__all__ = [
    "Interval",
    "AffineMap1D",
    "IDENTITY",
    "ScalingStep",
    "Frame",
    "IntervalTower",
    "Branch",
    "PiecewiseAffineMap",
    "BimodalAffineMap",
    "NotAffine",
    "ProperError",
    "induced_affine_maps",
    "build_tower",
    "stationary_tower",
    "fs_from_tower",
    "build_fs",
    "zoom_map",
    "renormalize",
    "deep_zoom",
    "branch_distance",
    "verify_infinite_renormalizability",
]

CONTAIN_TOL = 1e-11
# images land exactly on branch endpoints, so slack only absorbs rounding,
# which grows with the interval being pushed
CONTAIN_REL = 1e-7
MAX_VERIFY_LEVEL = 8


class NotAffine(ValueError):
    """An iterate leaves every branch of the map: not affine on that domain."""


class ProperError(ValueError):
    """Scaling data too close to (or outside) the simplex boundary."""


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def hull(cls, a: float, b: float) -> "Interval":
        return cls(min(a, b), max(a, b))

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def contains_interval(self, other: "Interval", tol: float = 0.0) -> bool:
        return self.lo - tol <= other.lo and other.hi <= self.hi + tol

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else None

    def distance(self, other: "Interval") -> float:
        return max(abs(self.lo - other.lo), abs(self.hi - other.hi))

    def __iter__(self):
        yield self.lo
        yield self.hi


@dataclass(frozen=True)
class AffineMap1D:
    """t -> intercept + slope * t."""

    intercept: float
    slope: float

    def __call__(self, t):
        return self.intercept + self.slope * t

    def compose(self, inner: "AffineMap1D") -> "AffineMap1D":
        """self o inner."""
        return AffineMap1D(self.intercept + self.slope * inner.intercept, self.slope * inner.slope)

    def __matmul__(self, inner: "AffineMap1D") -> "AffineMap1D":
        return self.compose(inner)

    def inverse(self) -> "AffineMap1D":
        if self.slope == 0.0:
            raise ZeroDivisionError("constant map has no inverse")
        return AffineMap1D(-self.intercept / self.slope, 1.0 / self.slope)

    def image(self, interval: Interval) -> Interval:
        return Interval.hull(self(interval.lo), self(interval.hi))

    @classmethod
    def through(cls, p0: tuple[float, float], p1: tuple[float, float]) -> "AffineMap1D":
        (x0, y0), (x1, y1) = p0, p1
        slope = (y1 - y0) / (x1 - x0)
        return cls(y0 - slope * x0, slope)


IDENTITY = AffineMap1D(0.0, 1.0)


@dataclass(frozen=True)
class ScalingStep:
    """One level of scaling data.

    ``anchor`` is the far end of the middle interval I_1 measured from the
    outer base endpoint (0 on the left, 1 on the right) as a fraction of the
    base length; it equals b^2(0)/b(0) for data coming from a cubic.
    """

    triple: ScalingTriple
    anchor: float

    @classmethod
    def from_parameter(cls, side: Side, c: float, epsilon: float = 1.0) -> "ScalingStep":
        side = Side.parse(side)
        s0, s1, s2, _g0, _g1, o = _terms(side, float(c), epsilon)
        if side is Side.LEFT:
            anchor = o[2] / o[1]
        else:
            anchor = (1.0 - o[2]) / (1.0 - o[1])
        return cls(ScalingTriple(float(s0), float(s1), float(s2)), float(anchor))


def induced_affine_maps(side: Side, triple: ScalingTriple, base: Interval, inner: float
                        ) -> tuple[AffineMap1D, AffineMap1D, AffineMap1D]:
    """The maps (F0, F1, F2) sending the base interval onto I_0, I_1, I_2.

    ``inner`` is the image of the outer base endpoint under F1, i.e. b_c^2(0)
    on the left and b~_c^2(1) on the right.
    """
    s0, s1, s2 = triple.as_tuple()
    if Side.parse(side) is Side.LEFT:
        top = base.hi
        return (AffineMap1D(top, -s0), AffineMap1D(inner, -s1), AffineMap1D(0.0, s2))
    bottom = base.lo
    # b~(1) + s0 (1 - t), b~^2(1) + s1 (1 - t), 1 - s2 (1 - t)
    return (
        AffineMap1D(bottom + s0, -s0),
        AffineMap1D(inner + s1, -s1),
        AffineMap1D(1.0 - s2, s2),
    )


@dataclass(frozen=True)
class Frame:
    """Side-normalised coordinate v measured inward from the outer endpoint.

    v = x on the left and v = 1 - x on the right, so the right tower is held
    near 0 where doubles are dense; deep iterates near x = 1 would otherwise
    lose about eight digits.
    """

    side: Side

    def local(self, x):
        return x if self.side is Side.LEFT else 1.0 - x

    def to_global(self, v):
        return v if self.side is Side.LEFT else 1.0 - v

    def interval(self, iv: Interval) -> Interval:
        return Interval.hull(self.to_global(iv.lo), self.to_global(iv.hi))

    def local_interval(self, iv: Interval) -> Interval:
        return Interval.hull(self.local(iv.lo), self.local(iv.hi))

    def map(self, m: AffineMap1D) -> AffineMap1D:
        """Express a local map v -> a + s v in global coordinates."""
        if self.side is Side.LEFT:
            return m
        return AffineMap1D(1.0 - m.intercept - m.slope, m.slope)

    def local_map(self, m: AffineMap1D) -> AffineMap1D:
        if self.side is Side.LEFT:
            return m
        return AffineMap1D(1.0 - m.intercept - m.slope, m.slope)


def _local_maps(triple: ScalingTriple, length: float, anchor: float):
    s0, s1, s2 = triple.as_tuple()
    return (AffineMap1D(length, -s0), AffineMap1D(anchor * length, -s1), AffineMap1D(0.0, s2))


@dataclass(frozen=True)
class TowerLevel:
    """Level-n data in the local frame."""

    n: int
    maps: tuple[AffineMap1D, AffineMap1D, AffineMap1D]  # F_i(n)
    genealogy: tuple[AffineMap1D, AffineMap1D, AffineMap1D]  # h_{n-1} o F_i(n)
    intervals: tuple[Interval, Interval, Interval]


@dataclass(frozen=True)
class IntervalTower:
    """Nested intervals over the base interval of one side.

    Maps and intervals are stored in the local frame, where the base is
    [0, length]; the accessors below return global coordinates.
    """

    side: Side
    length: float
    steps: tuple[ScalingStep, ...]
    levels: tuple[TowerLevel, ...]
    h: tuple[AffineMap1D, ...]  # h[0] = identity, h[n] = F_1(1) o ... o F_1(n)

    @property
    def frame(self) -> Frame:
        return Frame(self.side)

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def local_base(self) -> Interval:
        return Interval(0.0, self.length)

    @property
    def base(self) -> Interval:
        return self.frame.interval(self.local_base)

    def local_interval(self, i: int, n: int) -> Interval:
        if n == 0:
            if i != 1:
                raise ValueError("level 0 only has I_1")
            return self.local_base
        return self.levels[n - 1].intervals[i]

    def interval(self, i: int, n: int) -> Interval:
        return self.frame.interval(self.local_interval(i, n))

    def local_length(self, i: int, n: int) -> float:
        """|I_i^n| from the genealogy slope, free of endpoint cancellation."""
        if n == 0:
            return self.length
        return abs(self.levels[n - 1].genealogy[i].slope) * self.length

    def zoom(self, n: int) -> AffineMap1D:
        """h_n in global coordinates."""
        return self.frame.map(self.h[n])

    @property
    def y0(self) -> float:
        return self.frame.to_global(0.0)

    @property
    def z0(self) -> float:
        return self.frame.to_global(self.length)

    def y(self, n: int) -> float:
        return self.frame.to_global(self.h[n](0.0))

    def z(self, n: int) -> float:
        return self.frame.to_global(self.h[n](self.length))

    def x(self, n: int) -> float:
        return self.frame.to_global(self.levels[n - 1].genealogy[0](self.length))

    def w(self, n: int) -> float:
        return self.frame.to_global(self.levels[n - 1].genealogy[2](self.length))

    def endpoint_rows(self) -> list[tuple[str, int, str, float]]:
        """(side, level, label, value) rows; primed labels on the right."""
        tag = self.side.value
        prime = "'" if self.side is Side.RIGHT else ""
        rows = [(tag, 0, f"y{prime}", self.y0), (tag, 0, f"z{prime}", self.z0)]
        for n in range(1, self.depth + 1):
            for label, value in (("x", self.x(n)), ("y", self.y(n)), ("z", self.z(n)), ("w", self.w(n))):
                rows.append((tag, n, label + prime, value))
        return rows

    def shifted(self, k: int = 1) -> "IntervalTower":
        """Tower of the shifted data sigma^k(s) on the same base."""
        return build_tower(self.side, self.steps[k:], self.depth - k, base=self.base)


def _check_proper(step: ScalingStep, margin: float) -> None:
    t = step.triple
    if not t.is_proper(margin):
        raise ProperError(f"scaling triple {t} is not proper (margin {margin})")


def build_tower(
    side: Side,
    data: ScalingStep | Sequence[ScalingStep],
    depth: int,
    *,
    base: Interval,
    proper_margin: float = DEFAULT_PROPER_MARGIN,
) -> IntervalTower:
    """Nested intervals I_i^n = h_{n-1} o F_i(n) (base) for n = 1..depth."""
    side = Side.parse(side)
    if depth < 0:
        raise ValueError("depth must be >= 0")
    steps = (data,) * depth if isinstance(data, ScalingStep) else tuple(data)
    if len(steps) < depth:
        raise ValueError(f"need {depth} scaling steps, got {len(steps)}")
    steps = steps[:depth]
    length = base.length
    local_base = Interval(0.0, length)
    h = [IDENTITY]
    levels = []
    for n, step in enumerate(steps, start=1):
        _check_proper(step, proper_margin)
        maps = _local_maps(step.triple, length, step.anchor)
        gen = tuple(h[-1] @ F for F in maps)
        ivs = tuple(g.image(local_base) for g in gen)
        levels.append(TowerLevel(n, maps, gen, ivs))
        h.append(h[-1] @ maps[1])
    return IntervalTower(side, length, steps, tuple(levels), tuple(h))


def stationary_tower(side: Side, c: float, depth: int, epsilon: float = 1.0) -> IntervalTower:
    """Tower of the constant scaling data generated by the cubic at ``c``."""
    side = Side.parse(side)
    return build_tower(side, ScalingStep.from_parameter(side, c, epsilon), depth,
                       base=_base_of(side, c))


def _base_of(side: Side, c: float) -> Interval:
    p = MapParameter(c, side)
    lo, hi = base_interval(p)
    return Interval(lo, hi)


# -- piece-wise affine maps -----------------------------------------------------


@dataclass(frozen=True)
class Branch:
    """An affine piece; domain and map are in the local frame."""

    domain: Interval
    map: AffineMap1D
    level: int
    kind: int  # 0 -> lies on I_0^level, 2 -> on I_2^level

    def __call__(self, v):
        return self.map(v)


@dataclass(frozen=True)
class PiecewiseAffineMap:
    """f_s on one side.  Calls take and return global coordinates."""

    side: Side
    length: float
    branches: tuple[Branch, ...]
    tower: IntervalTower | None = field(default=None, compare=False)

    def __post_init__(self):
        los = [b.domain.lo for b in self.branches]
        if los != sorted(los):
            raise ValueError("branches must be sorted")
        for a, b in zip(self.branches, self.branches[1:]):
            if a.domain.hi >= b.domain.lo:
                raise ValueError(f"overlapping branches {a.domain} and {b.domain}")

    @property
    def frame(self) -> Frame:
        return Frame(self.side)

    @property
    def local_base(self) -> Interval:
        return Interval(0.0, self.length)

    @property
    def base(self) -> Interval:
        return self.frame.interval(self.local_base)

    @property
    def depth(self) -> int:
        return max((b.level for b in self.branches), default=0)

    @property
    def domain(self) -> list[Interval]:
        return [self.frame.interval(b.domain) for b in self.branches]

    def local_branch(self, v: float, tol: float = CONTAIN_TOL) -> Branch | None:
        los = [b.domain.lo for b in self.branches]
        i = bisect.bisect_right(los, v + tol) - 1
        for j in (i, i + 1):
            if 0 <= j < len(self.branches) and self.branches[j].domain.contains(v, tol):
                return self.branches[j]
        return None

    def branch_at(self, x: float, tol: float = CONTAIN_TOL) -> Branch | None:
        return self.local_branch(self.frame.local(x), tol)

    def branch_covering(self, J: Interval, tol: float = CONTAIN_TOL) -> Branch | None:
        """Branch whose (local) domain contains the local interval J."""
        b = self.local_branch(J.mid, tol)
        if b is not None and b.domain.contains_interval(J, _slack(J, tol)):
            return b
        return None

    def local_call(self, v: float) -> float:
        b = self.local_branch(v)
        if b is None:
            raise ValueError(f"v={v!r} is outside the domain of f_s")
        return b.map(v)

    def __call__(self, x: float) -> float:
        try:
            return self.frame.to_global(self.local_call(self.frame.local(x)))
        except ValueError:
            raise ValueError(f"x={x!r} is outside the domain of f_s") from None

    def truncated(self, depth: int) -> "PiecewiseAffineMap":
        return PiecewiseAffineMap(self.side, self.length,
                                  tuple(b for b in self.branches if b.level <= depth))

    def table(self) -> list[dict]:
        """Branches in global coordinates, ordered by position."""
        rows = []
        for b in self.branches:
            dom = self.frame.interval(b.domain)
            m = self.frame.map(b.map)
            rows.append({"side": self.side.value, "level": b.level, "kind": b.kind,
                         "lo": dom.lo, "hi": dom.hi,
                         "intercept": m.intercept, "slope": m.slope})
        rows.sort(key=lambda r: r["lo"])
        return rows


def fs_from_tower(tower: IntervalTower) -> PiecewiseAffineMap:
    """f_s on D_s = union of I_0^n and I_2^n, n <= depth.

    Level-1 branches send I_2^1 onto I_0^1 and I_0^1 onto I_1^1 (the
    interpolants of the cubic at the level-1 endpoints).  Deeper branches are
    the images of the next-level data under (h_1, F_2(1)):
    f_s(h_1(x)) = F_2(1)(f_{sigma s}(x)).
    """
    branches = []
    Y = IDENTITY
    for n, lvl in enumerate(tower.levels, start=1):
        F0, F1, F2 = lvl.maps
        h_inv = tower.h[n - 1].inverse()
        cores = {0: F1 @ F0.inverse(), 2: F0 @ F2.inverse()}
        for kind in (0, 2):
            branches.append(Branch(lvl.intervals[kind], Y @ cores[kind] @ h_inv, n, kind))
        Y = Y @ F2
    branches.sort(key=lambda b: b.domain.lo)
    return PiecewiseAffineMap(tower.side, tower.length, tuple(branches), tower)


def build_fs(side: Side, c_star: float, data: ScalingStep | None = None, depth: int = 8,
             *, tol: float = 1e-10, epsilon: float = 1.0) -> PiecewiseAffineMap:
    """f_{s*} at depth N for a fixed point ``c_star`` of R(., epsilon)."""
    side = Side.parse(side)
    residual = abs(float(_renorm(side, float(c_star), epsilon)) - c_star)
    if not residual <= tol:
        raise ValueError(f"c_star={c_star} is not a fixed point (residual {residual:.3e} > {tol})")
    if data is None:
        data = ScalingStep.from_parameter(side, c_star, epsilon)
    return fs_from_tower(build_tower(side, data, depth, base=_base_of(side, c_star)))


# -- renormalization ------------------------------------------------------------


def _slack(J: Interval, tol: float = CONTAIN_TOL) -> float:
    return max(tol, CONTAIN_REL * J.length)


def _iterate_on(f: PiecewiseAffineMap, J: Interval, k: int, tol: float = CONTAIN_TOL):
    """Compose f k times on the local interval J; each image must sit in one branch."""
    m = IDENTITY
    cur = J
    itinerary = []
    for _ in range(k):
        b = f.branch_covering(cur, tol)
        if b is None:
            raise NotAffine(f"image {f.frame.interval(cur)} is not inside a single branch")
        itinerary.append((b.level, b.kind))
        m = b.map @ m
        cur = b.map.image(cur)
    return m, cur, itinerary


def zoom_map(f: PiecewiseAffineMap) -> AffineMap1D:
    """h_1 read off f itself (local frame).

    y_0 goes to f(z_0) and z_0 to f(x_1), x_1 being the inner end of the
    branch through z_0.
    """
    top = f.local_branch(f.length)
    if top is None:
        raise ValueError("no branch at the far end of the base interval")
    return AffineMap1D.through((0.0, top.map(f.length)), (f.length, top.map(top.domain.lo)))


def renormalize(f: PiecewiseAffineMap) -> PiecewiseAffineMap:
    """h_1^{-1} o f^3 o h_1, computed branch by branch; depth drops by one.

    When f carries its scaling data, h_1 = F_1(1) is taken from it and the
    result carries the shifted data.  Reading h_1 off f instead
    (``zoom_map``) is equivalent in exact arithmetic, but R is strongly
    expanding, so the rounding in a read-off h_1 grows with each iterate.
    """
    if f.depth < 2:
        raise ValueError("depth exhausted: renormalization needs depth >= 2")
    tower = f.tower if f.tower is not None and f.tower.depth >= 2 else None
    h1 = tower.h[1] if tower is not None else zoom_map(f)
    h1_inv = h1.inverse()
    I11 = h1.image(f.local_base)
    out = []
    for b in f.branches:
        if not I11.contains_interval(b.domain, CONTAIN_TOL):
            continue
        m, img, _ = _iterate_on(f, b.domain, 3)
        if not I11.contains_interval(img, _slack(img)):
            raise NotAffine(f"f^3 image {f.frame.interval(img)} leaves I_1^1")
        out.append(Branch(h1_inv.image(b.domain), h1_inv @ m @ h1, b.level - 1, b.kind))
    out.sort(key=lambda b: b.domain.lo)
    return PiecewiseAffineMap(f.side, f.length, tuple(out), tower.shifted(1) if tower is not None else None)


def deep_zoom(f: PiecewiseAffineMap, tower: IntervalTower, n: int) -> PiecewiseAffineMap:
    """R_n f = h_n^{-1} o f^{3^n} o h_n with h_n taken from the scaling data."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_VERIFY_LEVEL:
        raise ValueError("iteration budget exceeded")
    hn = tower.h[n]
    hn_inv = hn.inverse()
    In = hn.image(tower.local_base)
    out = []
    for b in f.branches:
        if b.level <= n:
            continue
        m, img, _ = _iterate_on(f, b.domain, 3**n)
        if not In.contains_interval(img, _slack(img)):
            raise NotAffine(f"f^(3^{n}) image {f.frame.interval(img)} leaves I_1^{n}")
        out.append(Branch(hn_inv.image(b.domain), hn_inv @ m @ hn, b.level - n, b.kind))
    out.sort(key=lambda b: b.domain.lo)
    return PiecewiseAffineMap(f.side, f.length, tuple(out))


def branch_distance(f: PiecewiseAffineMap, g: PiecewiseAffineMap) -> float:
    """Max discrepancy in local branch domains, slopes and intercepts.

    Infinite when the branch tables do not line up.
    """
    if f.side is not g.side or len(f.branches) != len(g.branches):
        return math.inf
    worst = 0.0
    for a, b in zip(f.branches, g.branches):
        if (a.level, a.kind) != (b.level, b.kind):
            return math.inf
        worst = max(worst, a.domain.distance(b.domain),
                    abs(a.map.slope - b.map.slope), abs(a.map.intercept - b.map.intercept))
    return worst


@dataclass(frozen=True)
class BimodalAffineMap:
    """f_s on D_{s_l} union D_{s_r}; no data in the middle gap."""

    left: PiecewiseAffineMap
    right: PiecewiseAffineMap

    def __call__(self, x: float) -> float:
        part = self.left if x <= self.left.base.hi else self.right
        return part(x)

    def renormalize(self) -> "BimodalAffineMap":
        return BimodalAffineMap(renormalize(self.left), renormalize(self.right))

    def distance(self, other: "BimodalAffineMap") -> float:
        return max(branch_distance(self.left, other.left), branch_distance(self.right, other.right))


# -- certification of the renormalizability clauses --------------------------------


@dataclass(frozen=True)
class ClauseCheck:
    """One clause; intervals are reported in global coordinates."""

    name: str
    start: float
    iterations: int
    domain: Interval | None
    expected_domain: Interval | None
    image: Interval | None
    expected_image: Interval
    tol: float
    note: str = ""

    @property
    def domain_error(self) -> float:
        if self.domain is None or self.expected_domain is None:
            return math.inf
        return self.domain.distance(self.expected_domain)

    @property
    def image_error(self) -> float:
        if self.image is None:
            return math.inf
        return self.image.distance(self.expected_image)

    @property
    def passed(self) -> bool:
        return self.domain_error <= self.tol and self.image_error <= self.tol


@dataclass(frozen=True)
class RenormalizabilityReport:
    side: Side
    level: int
    clauses: tuple[ClauseCheck, ...]
    note: str = ""

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)


def _maximal_affine_domain(f: PiecewiseAffineMap, start: float, k: int):
    """Largest local interval around ``start`` on which f^k is one affine map.

    Built by bookkeeping: follow the orbit of ``start`` and cut the domain
    back to the preimage of each branch it visits.
    """
    first = f.local_branch(start)
    if first is None:
        raise NotAffine(f"{f.frame.to_global(start)} is not in the domain")
    J = first.domain
    # each end of J is the pull-back of a branch boundary met at some step;
    # remember (step, boundary) so the end can be recomputed step by step
    ends = {"lo": (0, J.lo), "hi": (0, J.hi)}
    m = IDENTITY
    t = start  # iterated pointwise; m(start) loses digits to cancellation
    route = []
    for step in range(k):
        b = f.local_branch(t)
        if b is None:
            raise NotAffine(f"orbit point {f.frame.to_global(t)} left the domain")
        inv = m.inverse()
        pulled = sorted(((inv(e), e) for e in b.domain))
        cut = J.intersect(Interval(pulled[0][0], pulled[1][0]))
        if cut is None:
            raise NotAffine("empty affine domain")
        if cut.lo > J.lo:
            ends["lo"] = (step, pulled[0][1])
        if cut.hi < J.hi:
            ends["hi"] = (step, pulled[1][1])
        J = cut
        m = b.map @ m
        t = b.map(t)
        route.append(b.map)

    def pull(step: int, x: float) -> float:
        for g in reversed(route[:step]):
            x = g.inverse()(x)
        return x

    J = Interval(pull(*ends["lo"]), pull(*ends["hi"]))
    images = [J.lo, J.hi]
    for g in route:
        images = [g(e) for e in images]
    return J, Interval.hull(*images)


def verify_infinite_renormalizability(f: PiecewiseAffineMap, tower: IntervalTower, n: int,
                                      tol: float = 1e-9) -> RenormalizabilityReport:
    """Check, at level n, the maximal-affine-domain clauses and their images.

    For the left side: [0, f(y_n)] is the maximal domain about 0 on which
    f^(3^n - 1) is affine with image I_1^n, and [f^2(y_n), f(0)] plays the
    same role about f(0) for f^(3^n - 2); the right side is the mirror.
    Only levels below the truncation depth can be certified.
    """
    side = f.side
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > MAX_VERIFY_LEVEL:
        raise ValueError(f"iteration budget exceeded (n <= {MAX_VERIFY_LEVEL})")
    if n == 0:
        return RenormalizabilityReport(side, 0, (), note="level 0: identity conventions, nothing to check")
    if n >= f.depth:
        raise ValueError(f"level {n} needs a map truncated deeper than {f.depth}")
    fr = f.frame
    target = tower.local_interval(1, n)
    yn = tower.h[n](0.0)
    clauses = []
    for name, start, k, far_iter in (
        ("critical-value", 0.0, 3**n - 1, 1),
        ("first-image", None, 3**n - 2, 2),
    ):
        note = ""
        try:
            if start is None:
                start = f.local_call(0.0)
            fy = yn
            for _ in range(far_iter):
                fy = f.local_call(fy)
            expected = fr.interval(Interval.hull(start, fy))
        except ValueError as exc:
            expected, note = None, f"y_{n} not in the domain: {exc}"
        try:
            dom, img = _maximal_affine_domain(f, start, k)
            dom, img = fr.interval(dom), fr.interval(img)
        except NotAffine as exc:
            dom, img, note = None, None, str(exc)
        clauses.append(ClauseCheck(name, fr.to_global(start), k, dom, expected, img,
                                   fr.interval(target), tol, note))
    return RenormalizabilityReport(side, n, tuple(clauses))
