"""Verification suites behind the CLI subcommands.

Each ``run_*`` function returns a VerificationReport holding check records
and the exported data tables.
"""
from __future__ import annotations

import itertools

import numpy as np

from .bimodal_family import Side, admissible_interval
from .extension import (
    build_extension,
    derivative_lipschitz_probe,
    extension_sample_points,
    join_bimodal,
    junction_report,
    renormalization_error,
    renormalize_joined,
)
from .report import ConfigError, RunConfig, VerificationReport, bound, close, holds
from .scaling import (
    NoSignChange,
    Stability,
    _terms,
    continuum_sweep,
    feasible_domain,
    find_fixed_point,
    fixed_point,
    gap_ratios,

)
from .shift import (
    SymbolSequence,
    build_b_alpha,
    conjugacy_error,
    default_triples,
    injectivity_probe,
    random_sequences,
)
from .tower import (
    ScalingStep,
    branch_distance,
    build_fs,
    build_tower,
    deep_zoom,
    fs_from_tower,
    renormalize,
    stationary_tower,
    verify_infinite_renormalizability,
)

REFERENCE = {
    "c_star": {Side.LEFT: 0.196693, Side.RIGHT: 0.803307},
    "feasible": {
        Side.LEFT: (0.188816, 0.194271, 0.199413),
        Side.RIGHT: (0.800587, 0.805729, 0.811184),
    },
    # component index holding the unique fixed point; the other has none
    "fixed_component": {Side.LEFT: 1, Side.RIGHT: 0},
}
REF_TOL = 1e-6
SIDES = (Side.LEFT, Side.RIGHT)


def _sides(side: Side | None):
    return SIDES if side is None else (Side.parse(side),)


# -- ratios -------------------------------------------------------------------------


RATIO_HEADER = ("c", "s0", "s1", "s2", "g0", "g1", "sum")


def ratio_rows(side: Side, c_min: float | None, c_max: float | None, grid: int) -> list[tuple]:
    side = Side.parse(side)
    lo, hi = admissible_interval(side)
    a = lo + 1e-6 if c_min is None else c_min
    b = hi - 1e-6 if c_max is None else c_max
    if not lo < a <= b < hi:
        raise ValueError(f"range [{a}, {b}] must lie inside ({lo}, {hi})")
    if grid <= 0:
        return []
    cs = np.linspace(a, b, grid) if grid > 1 else np.array([a])
    s0, s1, s2, g0, g1, _ = _terms(side, cs)
    return [(float(c), float(v0), float(v1), float(v2), float(w0), float(w1), float(v0 + v1 + v2))
            for c, v0, v1, v2, w0, w1 in zip(cs, s0, s1, s2, g0, g1)]


# -- fixed points -------------------------------------------------------------------


def run_fixed_points(cfg: RunConfig) -> VerificationReport:
    rep = VerificationReport("fixed-points")
    found = {}
    for side in SIDES:
        fp = fixed_point(side, cfg.root_tol)
        found[side] = fp
        t = fp.triple
        tag = side.value
        rep.add(
            close(f"c_star[{tag}]", "fixed point of R", fp.c_star, REFERENCE["c_star"][side], REF_TOL),
            bound(f"residual[{tag}]", "|R(c*) - c*|", fp.residual, cfg.residual_tol, "lt"),
            bound(f"multiplier[{tag}]", "|R'(c*)| > 1 (unstable)", abs(fp.multiplier), 1.0, "gt"),
            bound(f"remark_slack[{tag}]", "s1*^2 - s2* > 0", t.s1**2 - t.s2, 0.0, "gt"),
        )
        rep.data[tag] = {"c_star": fp.c_star, "residual": fp.residual, "multiplier": fp.multiplier,
                         "stability": fp.stability.value, "triple": list(t.as_tuple())}
    rep.add(close("mirror", "c_l* + c_r* = 1", found[Side.LEFT].c_star + found[Side.RIGHT].c_star,
                  1.0, 1e-8))
    return rep


# -- feasible domain -----------------------------------------------------------------


def run_feasible(cfg: RunConfig, side: Side | None = None) -> VerificationReport:
    rep = VerificationReport("feasible")
    for s in _sides(side):
        dom = feasible_domain(s, cfg.feasible_grid)
        tag = s.value
        ends = dom.endpoints
        refs = REFERENCE["feasible"][s]
        rep.add(holds(f"endpoint_count[{tag}]", "three distinct endpoints", len(ends) == 3,
                      note=f"{len(ends)} found"))
        for k, (got, want) in enumerate(zip(ends, refs)):
            rep.add(close(f"endpoint[{tag}][{k}]", "feasible-domain endpoint", got, want, REF_TOL))
        comps = []
        for k, comp in enumerate(dom.intervals):
            try:
                fp = find_fixed_point(s, comp, cfg.root_tol)
                count, c = 1, fp.c_star
            except NoSignChange:
                count, c = 0, None
            except ValueError:
                count, c = 2, None
            expected = 1 if k == REFERENCE["fixed_component"][s] else 0
            rep.add(bound(f"fixed_points_on_component[{tag}][{k}]", "fixed-point count per component",
                          count, expected, "eq"))
            comps.append({"interval": list(comp), "fixed_points": count, "c_star": c})
        rep.data[tag] = {
            "intervals": [list(iv) for iv in dom.intervals],
            "excluded_points": list(dom.excluded_points),
            "active_constraints": [{"point": p, "constraints": list(n)} for p, n in dom.active_constraints],
            "components": comps,
        }
    return rep


# -- tower and renormalization ----------------------------------------------------------


def tower_rows(side: Side, depth: int) -> list[tuple]:
    fp = fixed_point(side)
    return stationary_tower(side, fp.c_star, depth).endpoint_rows()


def _periodic_data(side: Side, c: float, delta: float = 5e-4, length: int = 16):
    a = ScalingStep.from_parameter(side, c - delta)
    b = ScalingStep.from_parameter(side, c + delta)
    return [a, b] * (length // 2)


def run_renorm_check(cfg: RunConfig) -> VerificationReport:
    rep = VerificationReport("renorm-check")
    N = cfg.tower_depth
    if N < 6:
        raise ConfigError("renorm-check needs tower_depth >= 6 (four lemma levels plus margin)")
    for side in SIDES:
        tag = side.value
        fp = fixed_point(side, cfg.root_tol)
        f = build_fs(side, fp.c_star, depth=N, tol=cfg.residual_tol)
        tw = f.tower
        rep.add(bound(f"Rf_minus_f[{tag}]", "R f_s* = f_s*", branch_distance(renormalize(f), f.truncated(N - 1)),
                      1e-9, "lt"))
        for n in range(1, min(N - 1, 8) + 1):
            r = verify_infinite_renormalizability(f, tw, n)
            worst = max((max(c.domain_error, c.image_error) for c in r.clauses), default=0.0)
            rep.add(bound(f"affine_domains[{tag}][n={n}]", "maximal affine domains at level n", worst, 1e-9, "lt"))
        for n in range(1, min(4, N - 1) + 1):
            rep.add(bound(f"deep_zoom[{tag}][n={n}]", "R_n f_s* = f_s*",
                          branch_distance(deep_zoom(f, tw, n), f.truncated(N - n)), 1e-9, "lt"))
        # lemma suite on 2-periodic data
        data = _periodic_data(side, fp.c_star)
        base = tw.base
        fs = [fs_from_tower(build_tower(side, data[k:], N - k, base=base)) for k in range(5)]
        rep.add(bound(f"lemma_shift[{tag}]", "R f_s = f_sigma(s)", branch_distance(renormalize(fs[0]), fs[1]),
                      1e-9, "lt"))
        g = fs[0]
        for n in range(1, 5):
            g = renormalize(g)
            rep.add(bound(f"lemma_iterate[{tag}][n={n}]", "R^n f_s = R_n f_s",
                          branch_distance(g, deep_zoom(fs[0], fs[0].tower, n)), 1e-9, "lt"))
            rep.add(bound(f"lemma_power_shift[{tag}][n={n}]", "R^n f_s = f_sigma^n(s)",
                          branch_distance(g, fs[n]), 1e-9, "lt"))
        rep.add(*_tower_geometry(side, fp.c_star, tag))
    return rep


def _tower_geometry(side: Side, c: float, tag: str):
    depth = 10
    tw = stationary_tower(side, c, depth)
    t = tw.steps[0].triple
    gaps = gap_ratios(side, c)
    disjoint = nested = True
    ratio_err = gap_err = 0.0
    for n in range(1, depth + 1):
        parent = tw.local_interval(1, n - 1)
        ivs = sorted((tw.local_interval(i, n) for i in range(3)), key=lambda iv: iv.lo)
        disjoint &= all(a.hi < b.lo for a, b in zip(ivs, ivs[1:]))
        nested &= all(parent.contains_interval(iv, 1e-15) for iv in ivs)
        ratio_err = max(ratio_err, abs(tw.local_length(1, n) / tw.local_length(1, n - 1) - t.s1))
        # gaps in the frame of I_1^(n-1), i.e. under the level-n maps F_i(n)
        i0, i1, i2 = (F.image(tw.local_base) for F in tw.levels[n - 1].maps)
        g0 = (i0.lo - i1.hi) / tw.length
        g1 = (i1.lo - i2.hi) / tw.length
        gap_err = max(gap_err, abs(g0 - gaps.g0), abs(g1 - gaps.g1))
    I = tw.interval(1, depth)
    reach = max(abs(I.lo - c), abs(I.hi - c))
    return [
        holds(f"tower_disjoint[{tag}]", "I_0^n, I_1^n, I_2^n pairwise disjoint", disjoint),
        holds(f"tower_nested[{tag}]", "I_i^n inside I_1^(n-1)", nested),
        bound(f"tower_ratio[{tag}]", "|I_1^n| / |I_1^(n-1)| = s1*", ratio_err, 1e-12, "lt"),
        bound(f"tower_gaps[{tag}]", "gap ratios g0, g1", gap_err, 1e-10, "lt"),
        bound(f"tower_reach[{tag}]", "I_1^10 within s1^10 |I_L| of c*", reach,
              t.s1**depth * tw.length, "le"),
    ]


# -- extension --------------------------------------------------------------------------


def build_joined(cfg: RunConfig, depth: int | None = None):
    depth = cfg.extension_depth if depth is None else depth
    fs = {s: build_fs(s, fixed_point(s, cfg.root_tol).c_star, depth=cfg.tower_depth, tol=cfg.residual_tol)
          for s in SIDES}
    gs = {s: build_extension(fs[s], depth) for s in SIDES}
    return fs, gs, join_bimodal(gs[Side.LEFT], gs[Side.RIGHT], grid=cfg.probe_grid)


def run_extend(cfg: RunConfig) -> VerificationReport:
    rep = VerificationReport("extend")
    fs, gs, m = build_joined(cfg)
    for side in SIDES:
        tag = side.value
        g, f = gs[side], fs[side]
        S = g.S
        rep.add(holds(f"contraction[{tag}]", "vertical contraction of S stronger than horizontal",
                      abs(S.y_part.slope) < abs(S.x_part.slope) < 1.0))
        jr = junction_report(g, min(12, 2 * g.depth))
        rep.add(bound(f"junction_slopes[{tag}]", "g is C^1 at p^n, n <= 12",
                      max(j.mismatch for j in jr), cfg.slope_tol, "lt"),
                bound(f"junction_slopes_fd[{tag}]", "finite-difference slopes at p^n",
                      max(j.fd_mismatch for j in jr), cfg.slope_tol, "lt"))
        led = g.lipschitz_ledger
        rep.add(holds(f"ledger_monotone[{tag}]", "lambda_(k+1) <= lambda_k",
                      all(b <= a for a, b in zip(led, led[1:]))),
                bound(f"ledger_ratio[{tag}]", "lambda_(k+1) / lambda_k = s2*/s1*^2",
                      max(abs(b / a - g.lipschitz_ratio) for a, b in zip(led, led[1:])), 1e-9, "lt"))
        sl = g.slope_ledger
        # decay to 0 follows from the geometric bound below; here only monotonicity
        rep.add(holds(f"slopes_decay[{tag}]", "max slope of G^n decreasing beyond n = 4",
                      all(b < a for a, b in zip(sl[2:], sl[3:]))),
                bound(f"slopes_bound[{tag}]", "max slope <= (s2/s1)^k max seed slope",
                      max(s / (S.slope_factor**k * sl[0]) for k, s in enumerate(sl)), 1.0 + 1e-6, "le",
                      note="relative rounding allowance 1e-6"))
        worst = 0.0
        for b in f.branches:
            d = f.frame.interval(b.domain)
            xs = np.linspace(d.lo, d.hi, 5)
            worst = max(worst, float(np.max(np.abs(g(xs) - np.array([f(x) for x in xs])))))
        rep.add(bound(f"extends_f[{tag}]", "g = f_s* on D", worst, 1e-12, "lt"))
        cstar = g.critical_point
        rep.add(close(f"critical_value[{tag}]", "g(c*) is the limit of the boxes",
                      g(cstar), 0.0 if side is Side.LEFT else 1.0, 1e-12))
        rep.data[tag] = {
            "lipschitz_ledger": list(led),
            "slope_ledger": list(sl),
            "junctions": [{"n": j.n, "x": j.x, "value": j.value, "left_slope": j.left_slope,
                           "right_slope": j.right_slope} for j in jr],
        }
    m.shape_check(cfg.probe_grid)
    rep.add(holds("bimodal_shape", "down-up-down on the grid", True))
    rep.add(bound("mirror_symmetry", "m(1 - x) = 1 - m(x)", m.symmetry_defect(cfg.probe_grid), 1e-9, "lt"),
            close("midpoint", "m(1/2) = 1/2", m(0.5), 0.5, 1e-12))
    pts = np.concatenate([np.linspace(*gs[Side.LEFT].base, cfg.probe_grid // 2),
                          np.linspace(*gs[Side.RIGHT].base, cfg.probe_grid // 2),
                          extension_sample_points(gs[Side.LEFT], generations=m.depth),
                          extension_sample_points(gs[Side.RIGHT], generations=m.depth)])
    rep.add(bound("Rg_minus_g", "R g_s* = g_s*", renormalization_error(renormalize_joined(m), m, pts), 1e-9, "lt"))
    lam = m.lipschitz_bound
    rep.add(bound("derivative_lipschitz", "sup |g'(u) - g'(v)| / |u - v| <= lambda",
                  derivative_lipschitz_probe(m, seed=cfg.seed), lam * (1 + 1e-3), "le"))
    rep.data["connector_lipschitz"] = m.connector_lipschitz
    rep.data["lipschitz_bound"] = lam
    return rep


def extension_rows(cfg: RunConfig) -> list[tuple]:
    _, _, m = build_joined(cfg)
    return m.table()


# -- shift --------------------------------------------------------------------------------


def run_shift_check(cfg: RunConfig) -> VerificationReport:
    rep = VerificationReport("shift-check")
    fs, gs, _ = build_joined(cfg, depth=cfg.shift_length)
    fl, fr = fs[Side.LEFT], fs[Side.RIGHT]
    depth = cfg.shift_length
    triples = default_triples(3)
    seqs = random_sequences(cfg.shift_count, cfg.shift_length, 3, cfg.seed)
    conj = []
    for a in seqs:
        err = conjugacy_error(a, triples, depth, fl, fr, cfg.probe_grid)
        conj.append({"alpha": str(a), "depth": depth, "sup_error": err, "pass": err < 1e-9})
    rep.add(bound("conjugacy", "R b_alpha = b_sigma(alpha)", max((c["sup_error"] for c in conj), default=0.0),
                  1e-9, "lt", note=f"{len(conj)} sequences, seed {cfg.seed}"))
    distinct = [(a, b) for a, b in itertools.combinations(seqs[:12], 2) if a.symbols != b.symbols]
    dists = [injectivity_probe(a, b, triples, depth, fl, fr, cfg.probe_grid) for a, b in distinct]
    rep.add(bound("injectivity", "distinct prefixes give distinct maps", min(dists, default=1.0), 0.0, "gt",
                  note=f"{len(dists)} pairs"))
    base = SymbolSequence((0,) * (depth + 1))
    decay = []
    for k in range(1, 6):
        sym = list(base.symbols)
        sym[k - 1] = 1
        decay.append(injectivity_probe(base, SymbolSequence(tuple(sym)), triples, depth, fl, fr, cfg.probe_grid))
    s2 = fixed_point(Side.LEFT).triple.s2
    ratios = [b / a for a, b in zip(decay, decay[1:])]
    rep.add(holds("injectivity_decay", "distance ratio per index within [s2/2, 2 s2]",
                  all(0.5 * s2 <= r <= 2.0 * s2 for r in ratios)))
    triples5 = default_triples(5)
    err5 = max(conjugacy_error(a, triples5, depth, fl, fr, cfg.probe_grid)
               for a in random_sequences(5, cfg.shift_length, 5, cfg.seed))
    rep.add(bound("conjugacy_alphabet5", "R b_alpha = b_sigma(alpha), 5 symbols", err5, 1e-9, "lt"))
    mirror = 0.0
    for i in range(triples.size):
        b = build_b_alpha(SymbolSequence((i,) * (depth + 1)), triples, depth, fl, fr)
        xs = np.linspace(*b.right.base, 201)
        mirror = max(mirror, float(np.max(np.abs(b.right(xs) - (1.0 - b.left(1.0 - xs))))))
    rep.add(bound("psi_mirror", "psi_i(x) = 1 - phi_i(1 - x)", mirror, 1e-14, "le"))
    rep.data = {"conjugacy": conj, "decay": decay, "decay_ratios": ratios,
                "policies": [p.amplitude for p in triples.phi]}
    return rep


# -- perturbation ---------------------------------------------------------------------------


PERTURB_HEADER = ("side", "epsilon", "c_star", "s0", "s1", "s2", "multiplier", "stability", "residual")


def run_perturb(cfg: RunConfig, side: Side | None = None) -> VerificationReport:
    rep = VerificationReport("perturb")
    rows = []
    for s in _sides(side):
        tag = s.value
        sweep = continuum_sweep(s, cfg.epsilons, cfg.root_tol, window=cfg.eps_window)
        by_eps = {p.epsilon: p for p in sweep.points}
        for eps in cfg.epsilons:
            p = by_eps.get(float(eps))
            rep.add(holds(f"found[{tag}][eps={eps:g}]", "fixed point of R(., eps)", p is not None,
                          note="" if p else dict(sweep.failures).get(float(eps), "")))
            if p is None:
                continue
            r = p.result
            rep.add(holds(f"unstable[{tag}][eps={eps:g}]", "c*_eps unstable",
                          r.stability is Stability.UNSTABLE))
            rows.append((tag, float(eps), r.c_star) + p.triple.as_tuple()
                        + (r.multiplier, r.stability.value, r.residual))
        if 1.0 in by_eps:
            rep.add(bound(f"eps_one[{tag}]", "eps = 1 reproduces c*",
                          abs(by_eps[1.0].c_star - fixed_point(s, cfg.root_tol).c_star), 0.0, "le"))
        if 0.99 in by_eps and 1.01 in by_eps:
            diff = min(abs(a - b) for a, b in zip(by_eps[0.99].triple.as_tuple(), by_eps[1.01].triple.as_tuple()))
            rep.add(bound(f"non_rigidity[{tag}]", "triples at eps 0.99 and 1.01 differ", diff, 1e-6, "gt"))
        if sweep.monotone is not None:
            rep.add(holds(f"monotone[{tag}]", "eps -> c*_eps monotone", sweep.monotone))
    rep.data = {"header": list(PERTURB_HEADER), "rows": [list(r) for r in rows]}
    return rep


# -- everything -------------------------------------------------------------------------------


def run_all(cfg: RunConfig) -> VerificationReport:
    rep = VerificationReport("all")
    for sub in (run_fixed_points(cfg), run_feasible(cfg), run_renorm_check(cfg), run_extend(cfg),
                run_shift_check(cfg), run_perturb(cfg)):
        rep.extend(sub)
    return rep
