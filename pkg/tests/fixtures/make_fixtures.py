"""Regenerate derived.json from independent mpmath oracles.

Nothing here imports renormlab: the cubic family, the ratio formulas and the
root searches are re-derived at 50 digits, with brute-force grid scans for
brackets.  Run with ``python tests/fixtures/make_fixtures.py``.
"""
from __future__ import annotations

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50
OUT = Path(__file__).with_name("derived.json")


def b(side, c, x):
    c, x = mp.mpf(c), mp.mpf(x)
    if side == "l":
        num = 1 - 6 * c + 9 * c**2 - 4 * c**3 + 6 * c * x - 6 * c**2 * x - 3 * x**2 + 2 * x**3
        return 1 - num / (1 - 2 * c) ** 3
    num = 4 * c**3 - 3 * c**2 + 6 * c * x - 6 * c**2 * x - 3 * x**2 + 2 * x**3
    return 1 - num / (2 * c - 1) ** 3


def orbit(side, c, k=5):
    o = [mp.mpf(0) if side == "l" else mp.mpf(1)]
    for _ in range(k):
        o.append(b(side, c, o[-1]))
    return o


def terms(side, c, eps=1):
    o = orbit(side, c)
    eps = mp.mpf(eps)
    if side == "l":
        sc = o[1]
        p = eps * o[4]
        s = ((o[1] - p) / sc, (o[2] - b(side, c, p)) / sc, o[3] / sc)
        g = ((o[4] - o[2]) / sc, (o[5] - o[3]) / sc)
        R = (o[2] - c) / s[1] if s[1] else mp.inf
    else:
        sc = 1 - o[1]
        p = o[4] + (1 - eps) * (1 - o[4])
        s = ((p - o[1]) / sc, (b(side, c, p) - o[2]) / sc, (1 - o[3]) / sc)
        g = ((o[2] - o[4]) / sc, (o[3] - o[5]) / sc)
        R = 1 - (c - o[2]) / s[1] if s[1] else mp.inf
    return s, g, R, o


def feasible(side, c):
    s, g, _, _ = terms(side, c)
    return all(v > 0 for v in s + g) and sum(s) < 1


def scan(func, lo, hi, n):
    xs = [lo + (hi - lo) * mp.mpf(i) / n for i in range(n + 1)]
    vals = [func(x) for x in xs]
    return [(xs[i], xs[i + 1]) for i in range(n) if vals[i] * vals[i + 1] < 0]


def root(func, bracket, steps=140):
    """Bisection; returns None when the bracket straddles a pole."""
    a, c = bracket
    fa = func(a)
    for _ in range(steps):
        m = (a + c) / 2
        fm = func(m)
        if fa * fm <= 0:
            c = m
        else:
            a, fa = m, fm
    x = (a + c) / 2
    return x if abs(func(x)) < mp.mpf(10) ** -30 else None


WINDOW = {"l": (mp.mpf("0.18"), mp.mpf("0.21")), "r": (mp.mpf("0.79"), mp.mpf("0.82"))}


def feasible_endpoints(side):
    lo, hi = WINDOW[side]
    n = 3000
    xs = [lo + (hi - lo) * mp.mpf(i) / n for i in range(n + 1)]
    flags = [feasible(side, x) for x in xs]
    ends = []
    for i in range(n):
        if flags[i] != flags[i + 1]:
            a, c = xs[i], xs[i + 1]
            for _ in range(120):  # boolean bisection of the indicator
                m = (a + c) / 2
                if feasible(side, m) == flags[i]:
                    a = m
                else:
                    c = m
            ends.append((a + c) / 2)
    # interior point where s0, s1, s2 vanish together without leaving the domain
    s2 = lambda c: terms(side, c)[0][2]
    inner = scan(s2, ends[0] + mp.mpf("1e-6"), ends[-1] - mp.mpf("1e-6"), 2000)
    if inner:
        touch = root(s2, inner[0])
    else:
        # s2 touches zero: minimise it
        d = lambda c: mp.diff(s2, c)
        touch = root(d, scan(d, ends[0] + mp.mpf("1e-6"), ends[-1] - mp.mpf("1e-6"), 2000)[0])
    return sorted(set(ends) | {touch})


def fixed_point(side, eps=1, lo=None, hi=None, n=4000):
    lo, hi = (lo, hi) if lo is not None else WINDOW[side]
    F = lambda c: terms(side, c, eps)[2] - c
    roots = []
    for br in scan(F, lo, hi, n):
        c = root(F, br)
        if c is not None and (feasible(side, c) if eps == 1 else True):
            roots.append(c)
    return roots


def main():
    out = {"generator": "mpmath, 50 digits, grid-scan brackets", "sides": {}}
    for side in ("l", "r"):
        ends = feasible_endpoints(side)
        comps = [(ends[0], ends[1]), (ends[1], ends[2])]
        per_comp = []
        for a, c in comps:
            rs = [r for r in fixed_point(side, 1, a + mp.mpf("1e-9"), c - mp.mpf("1e-9"), 2000)
                  if feasible(side, r)]
            per_comp.append(len(rs))
        cstar = [r for r in fixed_point(side) if feasible(side, r)][0]
        s, g, R, o = terms(side, cstar)
        mult = mp.diff(lambda c: terms(side, c)[2], cstar)
        pert = {}
        for eps in ("0.98", "0.985", "0.99", "1.01", "1.02"):
            # search c* +- 0.002, the continuation window
            rs = fixed_point(side, mp.mpf(eps), cstar - mp.mpf("0.002"), cstar + mp.mpf("0.002"), 4000)
            rs = [r for r in rs if ends[0] < r < ends[2]]
            if rs:
                r = min(rs, key=lambda x: abs(x - cstar))
                pert[eps] = {"c_star": float(r), "triple": [float(v) for v in terms(side, r, mp.mpf(eps))[0]]}
            else:
                F = lambda c, e=mp.mpf(eps): terms(side, c, e)[2] - c
                grid = [cstar - mp.mpf("0.002") + mp.mpf("0.004") * i / 400 for i in range(401)]
                wide = fixed_point(side, mp.mpf(eps), *WINDOW[side], 6000)
                pert[eps] = {"c_star": None, "min_abs_R_minus_c": float(min(abs(F(x)) for x in grid)),
                             "feasible_roots_in_window": [float(r) for r in wide if feasible(side, r)],
                             "window": [float(v) for v in WINDOW[side]]}
        oc = orbit(side, mp.mpf("0.196693") if side == "l" else mp.mpf("0.803307"), 5)
        out["sides"][side] = {
            "c_star": float(cstar),
            "c_star_str": mp.nstr(cstar, 20),
            "multiplier": float(mult),
            "triple": [float(v) for v in s],
            "gaps": [float(v) for v in g],
            "remark_slack": float(s[1] ** 2 - s[2]),
            "feasible_endpoints": [float(e) for e in ends],
            "fixed_points_per_component": per_comp,
            "orbit_at_reference": [mp.nstr(v, 14) for v in oc],
            "perturbed": pert,
        }
    out["mirror_sum"] = float(mp.mpf(out["sides"]["l"]["c_star_str"]) + mp.mpf(out["sides"]["r"]["c_star_str"]))
    OUT.write_text(json.dumps(out, indent=2) + "\n")
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
