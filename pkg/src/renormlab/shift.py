"""Embedding of the full n-shift: maps b_alpha built from distinct gap fillers.

Generation k (k = 0, 1, ...) of b_alpha is S^k applied to the seed pair made
with filler policy phi_{alpha[k]}; generations past the end of alpha use the
plain Hermite policy.  Renormalization strips one generation, so
R b_alpha = b_{sigma(alpha)}.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .bimodal_family import Side
from .extension import (
    HERMITE,
    ExtensionGraph,
    FillerPolicy,
    JoinedMap,
    assemble_extension,
    build_extension,
    join_bimodal,
    plane_map_from,
    renormalize_joined,
    seed_segments,
)
from .tower import PiecewiseAffineMap

__all__ = [
    "SymbolSequence",
    "ExtensionTriples",
    "AlphabetError",
    "shift",
    "default_triples",
    "build_b_alpha",
    "renormalize_extended",
    "conjugacy_error",
    "probe_points",
    "injectivity_probe",
    "random_sequences",
]

DEFAULT_AMPLITUDE = 0.01


class AlphabetError(ValueError):
    pass


@dataclass(frozen=True)
class SymbolSequence:
    symbols: tuple[int, ...]
    alphabet_size: int = 3

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        if not self.symbols:
            raise ValueError("symbol sequence must be nonempty")
        if self.alphabet_size < 1:
            raise ValueError("alphabet size must be positive")
        bad = [s for s in self.symbols if not 0 <= s < self.alphabet_size]
        if bad:
            raise AlphabetError(f"symbols {bad} outside alphabet of size {self.alphabet_size}")

    def __len__(self) -> int:
        return len(self.symbols)

    def __getitem__(self, k: int) -> int:
        return self.symbols[k]

    def __str__(self) -> str:
        return "".join(str(s) for s in self.symbols)


def shift(alpha: SymbolSequence) -> SymbolSequence:
    """sigma: drop the first symbol."""
    if len(alpha) < 2:
        raise ValueError("cannot shift a sequence of length 1")
    return SymbolSequence(alpha.symbols[1:], alpha.alphabet_size)


@dataclass(frozen=True)
class ExtensionTriples:
    """Filler policies phi_0..phi_{n-1}; psi_i is phi_i read in the mirrored frame."""

    phi: tuple[FillerPolicy, ...]

    def __post_init__(self):
        if not self.phi:
            raise ValueError("need at least one policy")

    @property
    def size(self) -> int:
        return len(self.phi)

    def psi(self, i: int) -> FillerPolicy:
        # right graphs are built in the reflected local frame, so the same
        # policy there gives psi_i(x) = 1 - phi_i(1 - x)
        return self.phi[i]

    def seed_graph(self, f: PiecewiseAffineMap, i: int):
        return _seed(f, self.phi[i] if f.side is Side.LEFT else self.psi(i))


def default_triples(n: int = 3, amplitude: float = DEFAULT_AMPLITUDE) -> ExtensionTriples:
    """Amplitudes 0, +h, -h, +2h, -2h, ... for an alphabet of size n."""
    amps = [0.0]
    k = 1
    while len(amps) < n:
        amps += [k * amplitude, -k * amplitude]
        k += 1
    return ExtensionTriples(tuple(FillerPolicy(a) for a in amps[:n]))


@functools.lru_cache(maxsize=64)
def _seed(f: PiecewiseAffineMap, policy: FillerPolicy):
    return seed_segments(f.side, f, policy)


@functools.lru_cache(maxsize=16)
def _tail(f: PiecewiseAffineMap, depth: int) -> ExtensionGraph:
    return build_extension(f, depth)


def _side_graph(f: PiecewiseAffineMap, alpha: SymbolSequence, triples: ExtensionTriples,
                depth: int) -> ExtensionGraph:
    seeds = [triples.seed_graph(f, alpha[k]) if k < len(alpha) else _seed(f, HERMITE)
             for k in range(depth + 1)]
    return assemble_extension(f.side, f.length, plane_map_from(f), seeds, depth, _tail(f, depth))


def build_b_alpha(alpha: SymbolSequence, triples: ExtensionTriples, depth: int,
                  f_left: PiecewiseAffineMap, f_right: PiecewiseAffineMap,
                  *, check_shape: bool = True) -> JoinedMap:
    """Joined map whose generation-k segment pair comes from phi/psi_{alpha[k]}."""
    if alpha.alphabet_size != triples.size:
        raise AlphabetError(f"alphabet size {alpha.alphabet_size} != {triples.size} policies")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    graphs = [_side_graph(f, alpha, triples, depth) for f in (f_left, f_right)]
    return join_bimodal(*graphs, check_shape=check_shape)


def renormalize_extended(b: JoinedMap):
    """R b on the two base intervals (see ``extension.renormalize_joined``)."""
    return renormalize_joined(b)


def probe_points(b: JoinedMap, grid: int = 1000, per_gap: int = 4, generations: int | None = None
                 ) -> np.ndarray:
    """Uniform grid on both base intervals plus samples inside every filler gap.

    Gaps shrink like s1^k, so a uniform grid alone would miss all but the
    outermost generations.
    """
    pts = [np.linspace(*b.left.base, grid // 2), np.linspace(*b.right.base, grid - grid // 2)]
    t = (np.arange(per_gap) + 0.5) / per_gap
    for g in (b.left, b.right):
        gens = g.depth + 1 if generations is None else generations
        for G in g.segments[: 2 * gens]:
            for p in G.pieces:
                if p.coeffs[2] != 0.0 or p.coeffs[3] != 0.0:
                    pts.append(g.frame.to_global(p.lo + t * (p.hi - p.lo)))
    return np.sort(np.concatenate(pts))


def conjugacy_error(alpha: SymbolSequence, triples: ExtensionTriples, depth: int,
                    f_left: PiecewiseAffineMap, f_right: PiecewiseAffineMap,
                    grid: int = 1000) -> float:
    """sup |R b_alpha - b_{sigma(alpha)}| over ``probe_points``."""
    b = build_b_alpha(alpha, triples, depth, f_left, f_right)
    c = build_b_alpha(shift(alpha), triples, depth - 1, f_left, f_right)
    pts = probe_points(c, grid, generations=depth - 1)
    return float(np.max(np.abs(renormalize_extended(b)(pts) - c(pts))))


def injectivity_probe(a1: SymbolSequence, a2: SymbolSequence, triples: ExtensionTriples, depth: int,
                      f_left: PiecewiseAffineMap, f_right: PiecewiseAffineMap,
                      grid: int = 1000) -> float:
    """Sup distance between b_{a1} and b_{a2} on the probe points."""
    b1 = build_b_alpha(a1, triples, depth, f_left, f_right)
    b2 = build_b_alpha(a2, triples, depth, f_left, f_right)
    pts = probe_points(b1, grid)
    return float(np.max(np.abs(b1(pts) - b2(pts))))


def random_sequences(count: int, length: int, alphabet_size: int = 3, seed: int = 0
                     ) -> list[SymbolSequence]:
    rng = np.random.default_rng(seed)
    return [SymbolSequence(tuple(int(s) for s in rng.integers(0, alphabet_size, length)), alphabet_size)
            for _ in range(count)]
