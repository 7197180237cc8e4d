"""C^{1+Lip} extension g of the piece-wise affine fixed point f_{s*}.

Each side is handled in its local frame (see ``tower.Frame``), where the base
interval is [0, L] and the critical point sits at the fixed point of the zoom
h_1.  The graph is assembled from two seed segments

    G^1 on [y_1, z_0]:  Hermite filler on [y_1, x_1], then f on I_0^1
    G^2 on [y_0, z_1]:  f on I_2^1, then Hermite filler on [w_1, z_1]

and their images G^{2k+1} = S^k(G^1), G^{2k+2} = S^k(G^2) under the plane map
S = (h_1, F_2(1)).  Self-similarity g(h_1 v) = F_2(g(v)) fixes the filler data
at y_1 and z_1, which makes every junction C^1 and gives Rg = g.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bimodal_family import Side
from .tower import AffineMap1D, Frame, Interval, PiecewiseAffineMap, zoom_map

__all__ = [
    "PlaneAffineMap",
    "CubicPiece",
    "GraphSegment",
    "FillerPolicy",
    "HERMITE",
    "ExtensionGraph",
    "JunctionRecord",
    "JoinedMap",
    "ShapeError",
    "ContractionError",
    "hermite_piece",
    "plane_map_from",
    "seed_segments",
    "iterate_extension",
    "build_extension",
    "assemble_extension",
    "eval_extension",
    "junction_report",
    "join_bimodal",
    "renormalize_joined",
    "renormalization_error",
    "derivative_lipschitz_probe",
    "extension_sample_points",
]

SLOPE_TOL = 1e-10
_CRACK_TOL = 1e-15
_MAX_RECURSION = 8
_REFLECT = AffineMap1D(1.0, -1.0)


class ShapeError(ValueError):
    """The joined map is not down-up-down on the check grid."""


class ContractionError(ValueError):
    """The vertical contraction of S is not stronger than the horizontal one."""


@dataclass(frozen=True)
class PlaneAffineMap:
    """(x, y) -> (x_part(x), y_part(y))."""

    x_part: AffineMap1D
    y_part: AffineMap1D

    def __call__(self, x, y):
        return self.x_part(x), self.y_part(y)

    def compose(self, inner: "PlaneAffineMap") -> "PlaneAffineMap":
        return PlaneAffineMap(self.x_part @ inner.x_part, self.y_part @ inner.y_part)

    def box(self, xs: Interval, ys: Interval) -> tuple[Interval, Interval]:
        return self.x_part.image(xs), self.y_part.image(ys)

    @property
    def second_derivative_factor(self) -> float:
        """Factor by which S scales |g''| of a graph: |y-slope| / x-slope^2."""
        return abs(self.y_part.slope) / self.x_part.slope**2

    @property
    def slope_factor(self) -> float:
        return abs(self.y_part.slope / self.x_part.slope)

    def check_contraction(self) -> None:
        sx, sy = abs(self.x_part.slope), abs(self.y_part.slope)
        if not sy < sx < 1.0:
            raise ContractionError(f"need |y-slope| < |x-slope| < 1, got {sy} and {sx}")


@dataclass(frozen=True)
class CubicPiece:
    """Polynomial sum c_j (x - lo)^j on [lo, hi]."""

    lo: float
    hi: float
    coeffs: tuple[float, float, float, float]
    # exact length, carried through transforms; hi - lo loses digits on tiny pieces
    width: float | None = None

    def __post_init__(self):
        if self.width is None:
            object.__setattr__(self, "width", self.hi - self.lo)

    @property
    def domain(self) -> Interval:
        return Interval(self.lo, self.hi)

    def _poly(self, t, order: int):
        c0, c1, c2, c3 = self.coeffs
        if order == 0:
            return c0 + t * (c1 + t * (c2 + t * c3))
        if order == 1:
            return c1 + t * (2.0 * c2 + 3.0 * c3 * t)
        if order == 2:
            return 2.0 * c2 + 6.0 * c3 * t
        raise ValueError("order must be 0, 1 or 2")

    def __call__(self, x, order: int = 0):
        return self._poly(np.asarray(x, dtype=float) - self.lo, order)

    @property
    def slopes(self) -> tuple[float, float]:
        return float(self._poly(0.0, 1)), float(self._poly(self.width, 1))

    @property
    def end_values(self) -> tuple[float, float]:
        return float(self._poly(0.0, 0)), float(self._poly(self.width, 0))

    @property
    def lipschitz(self) -> float:
        """Max |p''| on the piece; p'' is linear so the ends suffice."""
        return max(abs(float(self._poly(0.0, 2))), abs(float(self._poly(self.width, 2))))

    @property
    def max_slope(self) -> float:
        c0, c1, c2, c3 = self.coeffs
        cands = [0.0, self.width]
        if c3 != 0.0:
            t = -c2 / (3.0 * c3)
            if 0.0 < t < self.width:
                cands.append(t)
        return max(abs(float(self._poly(t, 1))) for t in cands)

    def transform(self, X: AffineMap1D, Y: AffineMap1D) -> "CubicPiece":
        """The piece whose graph is the image of this graph under (X, Y)."""
        a, b = X(self.lo), X(self.hi)
        lo, hi = (a, b) if X.slope > 0 else (b, a)
        a0 = 0.0 if X.slope > 0 else self.width
        b = 1.0 / X.slope
        c0, c1, c2, c3 = self.coeffs
        # coefficients of p(a0 + b t), then the vertical map
        q = (c0 + a0 * (c1 + a0 * (c2 + a0 * c3)),
             b * (c1 + a0 * (2.0 * c2 + 3.0 * c3 * a0)),
             b * b * (c2 + 3.0 * c3 * a0),
             b**3 * c3)
        return CubicPiece(lo, hi, (Y(q[0]), Y.slope * q[1], Y.slope * q[2], Y.slope * q[3]),
                          abs(X.slope) * self.width)

    def row(self) -> tuple[float, ...]:
        return (self.lo, self.hi) + tuple(self.coeffs)


def affine_piece(domain: Interval, m: AffineMap1D) -> CubicPiece:
    return CubicPiece(domain.lo, domain.hi, (m(domain.lo), m.slope, 0.0, 0.0))


def hermite_piece(lo: float, hi: float, y0: float, y1: float, m0: float, m1: float) -> CubicPiece:
    """The unique cubic with the given end values and slopes."""
    h = hi - lo
    d = (y1 - y0) / h
    return CubicPiece(lo, hi, (y0, m0, (3.0 * d - 2.0 * m0 - m1) / h, (m0 + m1 - 2.0 * d) / (h * h)))


@dataclass(frozen=True)
class FillerPolicy:
    """Gap filler: the Hermite cubic, optionally with a C^1 bump.

    For ``amplitude`` a != 0 the gap is split at its midpoint and the
    midpoint value is raised by a times the rise across the gap; the slope
    there is kept.  ``amplitude = 0`` is the plain Hermite join.
    """

    amplitude: float = 0.0

    def pieces(self, lo: float, hi: float, y0: float, y1: float, m0: float, m1: float
               ) -> tuple[CubicPiece, ...]:
        base = hermite_piece(lo, hi, y0, y1, m0, m1)
        if self.amplitude == 0.0:
            return (base,)
        mid = 0.5 * (lo + hi)
        ym = float(base(mid)) + self.amplitude * (y1 - y0)
        mm = float(base(mid, 1))
        return (hermite_piece(lo, mid, y0, ym, m0, mm), hermite_piece(mid, hi, ym, y1, mm, m1))


HERMITE = FillerPolicy(0.0)


@dataclass(frozen=True)
class GraphSegment:
    """G^n: C^1 piece-wise cubic on one tile, in the local frame."""

    n: int
    pieces: tuple[CubicPiece, ...]

    @property
    def domain(self) -> Interval:
        return Interval(self.pieces[0].lo, self.pieces[-1].hi)

    @property
    def slopes(self) -> tuple[float, float]:
        return self.pieces[0].slopes[0], self.pieces[-1].slopes[1]

    @property
    def lipschitz(self) -> float:
        return max(p.lipschitz for p in self.pieces)

    @property
    def max_slope(self) -> float:
        return max(p.max_slope for p in self.pieces)

    def internal_mismatch(self) -> float:
        """Largest value or slope jump between consecutive pieces."""
        worst = 0.0
        for a, b in zip(self.pieces, self.pieces[1:]):
            worst = max(worst, abs(a.end_values[1] - b.end_values[0]),
                        abs(a.slopes[1] - b.slopes[0]))
        return worst

    def transform(self, S: PlaneAffineMap, n: int) -> "GraphSegment":
        pieces = sorted((p.transform(S.x_part, S.y_part) for p in self.pieces), key=lambda p: p.lo)
        return GraphSegment(n, tuple(pieces))

    def __call__(self, x, order: int = 0):
        los = [p.lo for p in self.pieces]
        i = min(max(bisect.bisect_right(los, x) - 1, 0), len(self.pieces) - 1)
        return float(self.pieces[i](x, order))


def plane_map_from(f: PiecewiseAffineMap) -> PlaneAffineMap:
    """S = (h_1, F_2(1)) in the local frame, from the tower when available."""
    if f.tower is not None and f.tower.depth >= 1:
        return PlaneAffineMap(f.tower.h[1], f.tower.levels[0].maps[2])
    w1 = _level_one(f, 2).domain.hi
    return PlaneAffineMap(zoom_map(f), AffineMap1D(0.0, w1 / f.length))


def _level_one(f: PiecewiseAffineMap, kind: int):
    for b in f.branches:
        if b.level == 1 and b.kind == kind:
            return b
    raise ValueError("f has no level-1 branches")


def seed_segments(side: Side, f: PiecewiseAffineMap, policy: FillerPolicy = HERMITE
                  ) -> tuple[GraphSegment, GraphSegment]:
    """G^1 on [y_1, z_0] and G^2 on [y_0, z_1], in the local frame of ``f``."""
    if Side.parse(side) is not f.side:
        raise ValueError("side does not match f")
    S = plane_map_from(f)
    h1, F2 = S.x_part, S.y_part
    b0, b2 = _level_one(f, 0), _level_one(f, 2)
    L = f.length
    x1, w1 = b0.domain.lo, b2.domain.hi
    y1, z1 = h1(0.0), h1(L)
    # g(h1 v) = F2(g(v)) fixes value and slope of g at y1 = h1(0) and z1 = h1(L)
    ratio = F2.slope / h1.slope
    fill1 = policy.pieces(y1, x1, F2(b2.map(0.0)), b0.map(x1), ratio * b2.map.slope, b0.map.slope)
    fill2 = policy.pieces(w1, z1, b2.map(w1), F2(b0.map(L)), b2.map.slope, ratio * b0.map.slope)
    G1 = GraphSegment(1, fill1 + (affine_piece(b0.domain, b0.map),))
    G2 = GraphSegment(2, (affine_piece(b2.domain, b2.map),) + fill2)
    for G in (G1, G2):
        if G.internal_mismatch() > SLOPE_TOL:
            raise ArithmeticError(f"seed G^{G.n} is not C^1 (mismatch {G.internal_mismatch():.3e})")
    return G1, G2


@dataclass(frozen=True)
class JunctionRecord:
    n: int
    x: float
    value: float
    left_slope: float
    right_slope: float
    fd_left: float
    fd_right: float

    @property
    def mismatch(self) -> float:
        return abs(self.left_slope - self.right_slope)

    @property
    def fd_mismatch(self) -> float:
        return abs(self.fd_left - self.fd_right)


@dataclass(frozen=True)
class ExtensionGraph:
    """g on one side: segments G^1..G^{2N+2}, boxes B^0..B^{N+1}, ledger lambda_0..lambda_N.

    Points of the innermost box not covered by a segment are evaluated
    through the self-similarity with ``tail`` (the graph itself when None).
    """

    side: Side
    length: float
    S: PlaneAffineMap
    segments: tuple[GraphSegment, ...]
    depth: int
    tail: "ExtensionGraph | None" = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        pieces = sorted((p for G in self.segments for p in G.pieces), key=lambda p: p.lo)
        object.__setattr__(self, "_pieces", tuple(pieces))
        object.__setattr__(self, "_los", np.array([p.lo for p in pieces]))
        object.__setattr__(self, "_his", np.array([p.hi for p in pieces]))
        object.__setattr__(self, "_coef", np.array([p.coeffs for p in pieces]))
        H, Y = self.power(self.depth + 1)
        object.__setattr__(self, "_core", (H, Y, H.image(self.local_base)))

    # -- geometry ---------------------------------------------------------------
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
    def pieces(self) -> tuple[CubicPiece, ...]:
        return self._pieces

    def power(self, k: int) -> tuple[AffineMap1D, AffineMap1D]:
        H = Y = AffineMap1D(0.0, 1.0)
        for _ in range(k):
            H, Y = self.S.x_part @ H, self.S.y_part @ Y
        return H, Y

    def segment(self, n: int) -> GraphSegment:
        return self.segments[n - 1]

    def y(self, k: int) -> float:
        return self.power(k)[0](0.0)

    def z(self, k: int) -> float:
        return self.power(k)[0](self.length)

    def y_hat(self, k: int) -> float:
        return self.power(k)[1](self.segment(2).pieces[0](0.0))

    def z_hat(self, k: int) -> float:
        return self.power(k)[1](self.segment(1).pieces[-1](self.length))

    def box(self, k: int) -> tuple[Interval, Interval]:
        """B^k = S^k(B^0), B^0 = base x base (local frame)."""
        H, Y = self.power(k)
        return H.image(self.local_base), Y.image(self.local_base)

    def global_box(self, k: int) -> tuple[Interval, Interval]:
        xs, ys = self.box(k)
        return self.frame.interval(xs), self.frame.interval(ys)

    @property
    def critical_point(self) -> float:
        """Fixed point of h_1: the common limit of the boxes."""
        h = self.S.x_part
        return self.frame.to_global(h.intercept / (1.0 - h.slope))

    @property
    def lipschitz_ledger(self) -> tuple[float, ...]:
        """lambda_k = derivative Lipschitz constant of G^{2k+1} and G^{2k+2}."""
        return tuple(max(self.segments[2 * k].lipschitz, self.segments[2 * k + 1].lipschitz)
                     for k in range(self.depth + 1))

    @property
    def slope_ledger(self) -> tuple[float, ...]:
        return tuple(max(self.segments[2 * k].max_slope, self.segments[2 * k + 1].max_slope)
                     for k in range(self.depth + 1))

    @property
    def lipschitz_ratio(self) -> float:
        return self.S.second_derivative_factor

    # -- evaluation ---------------------------------------------------------------
    def eval_local(self, v, order: int = 0, _level: int = 0):
        v = np.atleast_1d(np.asarray(v, dtype=float))
        out = np.empty_like(v)
        idx = np.searchsorted(self._los, v + _CRACK_TOL, side="right") - 1
        idx_c = np.clip(idx, 0, len(self._los) - 1)
        covered = (idx >= 0) & (v <= self._his[idx_c] + _CRACK_TOL)
        if np.any(covered):
            c = self._coef[idx_c[covered]]
            t = v[covered] - self._los[idx_c[covered]]
            if order == 0:
                out[covered] = c[:, 0] + t * (c[:, 1] + t * (c[:, 2] + t * c[:, 3]))
            elif order == 1:
                out[covered] = c[:, 1] + t * (2.0 * c[:, 2] + 3.0 * c[:, 3] * t)
            else:
                out[covered] = 2.0 * c[:, 2] + 6.0 * c[:, 3] * t
        rest = ~covered
        if np.any(rest):
            H, Y, core = self._core
            vr = v[rest]
            if np.any((vr < core.lo - _CRACK_TOL) | (vr > core.hi + _CRACK_TOL)):
                raise ValueError("x outside the domain of the extension")
            if _level >= _MAX_RECURSION:
                # boxes have shrunk below double resolution: use the limit
                out[rest] = Y(0.0) if order == 0 else 0.0
            else:
                inner = self.tail if self.tail is not None else self
                u = H.inverse()(vr)
                vals = inner.eval_local(u, order, _level + 1)
                out[rest] = Y(vals) if order == 0 else vals * Y.slope / H.slope**order
        return out

    def __call__(self, x, order: int = 0):
        """g (order 0) or its derivatives at global ``x``."""
        x = np.asarray(x, dtype=float)
        if np.any((x < self.base.lo - _CRACK_TOL) | (x > self.base.hi + _CRACK_TOL)):
            raise ValueError("x outside the base interval")
        vals = self.eval_local(self.frame.local(x), order)
        if order == 0:
            vals = self.frame.to_global(vals)
        elif order == 2 and self.side is Side.RIGHT:
            vals = -vals
        return vals if x.ndim else float(vals[0])

    def global_pieces(self) -> list[CubicPiece]:
        if self.side is Side.LEFT:
            return list(self._pieces)
        return sorted((p.transform(_REFLECT, _REFLECT) for p in self._pieces), key=lambda p: p.lo)

    def table(self) -> list[tuple]:
        """(side, n, lo, hi, c0, c1, c2, c3) in global coordinates."""
        rows = []
        for G in self.segments:
            ps = [p.transform(_REFLECT, _REFLECT) for p in G.pieces] if self.side is Side.RIGHT else G.pieces
            rows.extend((self.side.value, G.n) + p.row() for p in sorted(ps, key=lambda p: p.lo))
        return rows


def assemble_extension(side: Side, length: float, S: PlaneAffineMap,
                       seeds: Sequence[tuple[GraphSegment, GraphSegment]], depth: int,
                       tail: ExtensionGraph | None = None) -> ExtensionGraph:
    """Generation k uses seeds[k] pushed forward by S^k, k = 0..depth."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if len(seeds) < depth + 1:
        raise ValueError(f"need {depth + 1} seed pairs, got {len(seeds)}")
    segments = []
    Sk = PlaneAffineMap(AffineMap1D(0.0, 1.0), AffineMap1D(0.0, 1.0))
    for k in range(depth + 1):
        G1, G2 = seeds[k]
        segments += [G1.transform(Sk, 2 * k + 1), G2.transform(Sk, 2 * k + 2)]
        Sk = S.compose(Sk)
    return ExtensionGraph(Side.parse(side), length, S, tuple(segments), depth, tail)


def iterate_extension(seed: tuple[GraphSegment, GraphSegment], S: PlaneAffineMap, depth: int = 12,
                      *, side: Side = Side.LEFT, length: float | None = None) -> ExtensionGraph:
    """G^n for n <= 2 depth + 2 with G^{n+2} = S(G^n)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    S.check_contraction()
    G1, G2 = seed
    L = length if length is not None else G1.domain.hi
    segments = [G1, G2]
    for n in range(3, 2 * depth + 3):
        segments.append(segments[n - 3].transform(S, n))
    return ExtensionGraph(Side.parse(side), L, S, tuple(segments), depth)


def build_extension(f: PiecewiseAffineMap, depth: int = 12, policy: FillerPolicy = HERMITE
                    ) -> ExtensionGraph:
    """g_{s*} on the side of ``f``, G^1..G^{2 depth + 2}."""
    seed = seed_segments(f.side, f, policy)
    return iterate_extension(seed, plane_map_from(f), depth, side=f.side, length=f.length)


def eval_extension(g: ExtensionGraph, x):
    return g(x)


def _fd_slope(fn: Callable, x: float, h: float) -> float:
    """One-sided third-order difference; exact on cubics, h < 0 looks left."""
    v = fn(np.array([x, x + h, x + 2 * h, x + 3 * h]))
    return float((-11.0 * v[0] + 18.0 * v[1] - 9.0 * v[2] + 2.0 * v[3]) / (6.0 * h))


def junction_report(g: ExtensionGraph, max_n: int | None = None) -> list[JunctionRecord]:
    """Slopes on both sides of p^n: y_{(n+1)/2} for odd n, z_{n/2} for even n.

    Analytic slopes come from the adjacent pieces; the finite differences use
    a step of a tenth of the shorter adjacent piece.
    """
    max_n = 2 * g.depth if max_n is None else max_n
    pieces = g.pieces
    los = [p.lo for p in pieces]
    out = []
    for n in range(1, max_n + 1):
        v = g.y((n + 1) // 2) if n % 2 else g.z(n // 2)
        j = bisect.bisect_left(los, v - 1e-14)
        left, right = pieces[j - 1], pieces[j]
        if abs(right.lo - v) > 1e-13 or abs(left.hi - v) > 1e-13:
            raise ArithmeticError(f"p^{n} is not a piece boundary")
        h = 0.1 * min(left.width, right.width)
        fl = _fd_slope(g.eval_local, v, -h)
        fr = _fd_slope(g.eval_local, v, h)
        out.append(JunctionRecord(n, g.frame.to_global(v), g.frame.to_global(float(right(v))),
                                  left.slopes[1], right.slopes[0], fl, fr))
    return out


# -- the bimodal join ---------------------------------------------------------------


@dataclass(frozen=True)
class JoinedMap:
    """g_l on I_L, a Hermite connector on the middle gap, g_r on I_R."""

    left: ExtensionGraph
    right: ExtensionGraph
    connector: CubicPiece

    @property
    def depth(self) -> int:
        return self.left.depth

    @property
    def connector_lipschitz(self) -> float:
        return self.connector.lipschitz

    @property
    def lipschitz_bound(self) -> float:
        return max(self.left.lipschitz_ledger[0], self.right.lipschitz_ledger[0], self.connector.lipschitz)

    def __call__(self, x, order: int = 0):
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(xa)
        lm = xa <= self.left.base.hi
        rm = xa >= self.right.base.lo
        mm = ~(lm | rm)
        if np.any(lm):
            out[lm] = self.left(xa[lm], order)
        if np.any(rm):
            out[rm] = self.right(xa[rm], order)
        if np.any(mm):
            out[mm] = self.connector(xa[mm], order)
        return out if np.ndim(x) else float(out[0])

    def shape_check(self, grid: int = 1000) -> int:
        """Number of laps on a uniform grid; raises ShapeError unless down-up-down."""
        xs = np.linspace(0.0, 1.0, grid)
        d = np.sign(np.diff(self(xs)))
        d = d[d != 0]
        laps = [int(d[0])]
        for s in d[1:]:
            if s != laps[-1]:
                laps.append(int(s))
        if laps != [-1, 1, -1]:
            raise ShapeError(f"lap signs {laps}, expected down-up-down")
        return len(laps)

    def symmetry_defect(self, grid: int = 1000) -> float:
        xs = np.linspace(0.0, 1.0, grid)
        return float(np.max(np.abs(self(1.0 - xs) - (1.0 - self(xs)))))

    def table(self) -> list[tuple]:
        rows = self.left.table()
        rows.append(("m", 0) + self.connector.row())
        return rows + self.right.table()


def join_bimodal(g_left: ExtensionGraph, g_right: ExtensionGraph, *, check_shape: bool = True,
                 grid: int = 1000) -> JoinedMap:
    if g_left.side is not Side.LEFT or g_right.side is not Side.RIGHT:
        raise ValueError("expected a left and a right graph")
    if g_left.depth != g_right.depth:
        raise ValueError("graphs built at different depths")
    a, b = g_left.base.hi, g_right.base.lo
    conn = hermite_piece(a, b, g_left(a), g_right(b), g_left(a, 1), g_right(b, 1))
    m = JoinedMap(g_left, g_right, conn)
    if check_shape:
        m.shape_check(grid)
    return m


# -- renormalization of the extension ------------------------------------------------


def renormalize_joined(m: JoinedMap) -> Callable:
    """x -> h_1^{-1} g^3 h_1 x on each base interval, computed in local frames."""
    if m.depth < 2:
        raise ValueError("depth exhausted: renormalization needs depth >= 2")

    def side_map(g: ExtensionGraph):
        h = g.S.x_part
        hi = h.inverse()

        def R(v):
            return hi(g.eval_local(g.eval_local(g.eval_local(h(v)))))
        return R

    Rl, Rr = side_map(m.left), side_map(m.right)

    def Rm(x):
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.full_like(xa, np.nan)
        lm = xa <= m.left.base.hi
        rm = xa >= m.right.base.lo
        if np.any(~(lm | rm)):
            raise ValueError("the renormalized map lives on the two base intervals only")
        if np.any(lm):
            out[lm] = Rl(xa[lm])
        if np.any(rm):
            out[rm] = 1.0 - Rr(1.0 - xa[rm])
        return out if np.ndim(x) else float(out[0])

    return Rm


def extension_sample_points(g: ExtensionGraph, per_piece: int = 5, generations: int | None = None
                            ) -> np.ndarray:
    """Global sample points inside every piece of the first generations."""
    gens = g.depth + 1 if generations is None else generations
    pts = []
    t = (np.arange(per_piece) + 0.5) / per_piece
    for G in g.segments[: 2 * gens]:
        for p in G.pieces:
            pts.append(p.lo + t * (p.hi - p.lo))
    return np.sort(g.frame.to_global(np.concatenate(pts)))


def renormalization_error(a: Callable, b: Callable, points) -> float:
    pts = np.asarray(points, dtype=float)
    return float(np.max(np.abs(a(pts) - b(pts))))


def derivative_lipschitz_probe(m: JoinedMap, count: int = 2000, seed: int = 0,
                               min_scale: float = 1e-6, max_scale: float = 1e-1) -> float:
    """Empirical sup |g'(u) - g'(v)| / |u - v| over random pairs at the given scales."""
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 1.0, count)
    d = np.exp(rng.uniform(math.log(min_scale), math.log(max_scale), count))
    v = np.clip(u + d, 0.0, 1.0)
    keep = v - u >= min_scale
    u, v = u[keep], v[keep]
    return float(np.max(np.abs(m(u, 1) - m(v, 1)) / (v - u)))
