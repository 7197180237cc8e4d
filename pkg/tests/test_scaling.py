import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from renormlab.bimodal_family import Side
from renormlab.scaling import (
    NoSignChange,
    ScalingTriple,
    Stability,
    bisect_root,
    constraint_values,
    continuum_sweep,
    feasible_domain,
    find_fixed_point,
    find_perturbed_fixed_point,
    fixed_point,
    gap_ratios,
    perturbed_ratios,
    perturbed_renorm_map,
    renorm_map,
    scaling_ratios,
)


def test_fixed_point_triple_and_gaps_match_oracle(side, derived):
    ref = derived["sides"][side.value]
    fp = fixed_point(side)
    assert np.allclose(fp.triple.as_tuple(), ref["triple"], atol=1e-12, rtol=0)
    g = gap_ratios(side, fp.c_star)
    assert np.allclose((g.g0, g.g1), ref["gaps"], atol=1e-12, rtol=0)
    assert abs(renorm_map(side, fp.c_star) - fp.c_star) < 1e-12


def test_sides_share_the_triple():
    a = fixed_point(Side.LEFT).triple.as_tuple()
    b = fixed_point(Side.RIGHT).triple.as_tuple()
    assert np.allclose(a, b, atol=1e-12, rtol=0)


@given(c=st.floats(0.1887, 0.1994))
def test_mirror_symmetry_of_ratios(c):
    a = scaling_ratios(Side.LEFT, c).as_tuple()
    b = scaling_ratios(Side.RIGHT, 1.0 - c).as_tuple()
    assert np.allclose(a, b, atol=1e-10, rtol=1e-9)
    # R = (o2 - c) / s1 has a pole at the touch point s1 = 0; skip its neighbourhood
    assume(abs(a[1]) > 1e-3)
    assert renorm_map(Side.LEFT, c) == pytest.approx(1.0 - renorm_map(Side.RIGHT, 1.0 - c), rel=1e-7, abs=1e-9)


def test_vectorised_constraints_agree_with_scalar():
    cs = np.linspace(0.189, 0.199, 9)
    vals = constraint_values(Side.LEFT, cs)
    for k, c in enumerate(cs):
        t = scaling_ratios(Side.LEFT, float(c))
        assert vals["s1"][k] == pytest.approx(t.s1, abs=1e-15)


@settings(max_examples=40)
@given(u=st.floats(0.001, 0.999), k=st.integers(0, 1))
def test_constraints_positive_inside_feasible_domain(side, u, k):
    dom = feasible_domain(side)
    lo, hi = dom.intervals[k]
    c = lo + u * (hi - lo)
    if any(abs(c - p) < 1e-6 for p in dom.excluded_points):
        return
    assert all(float(v) > 0 for v in constraint_values(side, c).values())
    assert dom.contains(c)


def test_feasible_domain_structure(side):
    dom = feasible_domain(side)
    assert len(dom.intervals) == 2 and len(dom.excluded_points) == 1
    assert dom.intervals[0][1] == dom.intervals[1][0] == dom.excluded_points[0]
    assert not dom.contains(dom.excluded_points[0])
    assert dom.contains(fixed_point(side).c_star)
    outside = dom.intervals[0][0] - 1e-4
    assert not dom.contains(outside)
    with pytest.raises(ValueError):
        feasible_domain(side, 10)


def test_empty_component_raises(side):
    dom = feasible_domain(side)
    empty = 0 if side is Side.LEFT else 1
    with pytest.raises(NoSignChange):
        find_fixed_point(side, dom.intervals[empty])


def test_bisect_root():
    r = bisect_root(math.cos, 1.0, 2.0, 1e-14)
    assert abs(r - math.pi / 2) < 1e-13
    with pytest.raises(NoSignChange):
        bisect_root(lambda x: x * x + 1.0, -1.0, 1.0, 1e-12)


@pytest.mark.parametrize("m,expected", [(-76.0, Stability.UNSTABLE), (0.5, Stability.STABLE),
                                        (1.0, Stability.MARGINAL)])
def test_stability_classification(m, expected):
    assert Stability.classify(m) is expected


def test_simplex_predicates():
    t = ScalingTriple(0.1, 0.2, 0.3)
    assert t.in_simplex() and t.is_proper() and t.total == pytest.approx(0.6)
    assert not ScalingTriple(0.5, 0.5, 0.1).in_simplex()
    assert not ScalingTriple(1e-6, 0.2, 0.3).is_proper(1e-4)


def test_epsilon_one_is_the_unperturbed_problem(side):
    c = fixed_point(side).c_star
    assert perturbed_ratios(side, c, 1.0) == scaling_ratios(side, c)
    assert perturbed_renorm_map(side, c, 1.0) == renorm_map(side, c)
    assert find_perturbed_fixed_point(side, 1.0).c_star == c


@pytest.mark.parametrize("eps", ["0.985", "0.99", "1.01", "1.02"])
def test_perturbed_fixed_points_match_oracle(side, derived, eps):
    ref = derived["sides"][side.value]["perturbed"][eps]
    fp = find_perturbed_fixed_point(side, float(eps))
    assert fp.stability is Stability.UNSTABLE
    assert abs(fp.c_star - ref["c_star"]) < 1e-9
    assert np.allclose(fp.triple.as_tuple(), ref["triple"], atol=1e-9, rtol=0)


def test_eps_098_has_no_fixed_point(side, derived):
    # the oracle scans the whole window and finds no feasible root
    ref = derived["sides"][side.value]["perturbed"]["0.98"]
    assert ref["c_star"] is None and ref["feasible_roots_in_window"] == []
    with pytest.raises(NoSignChange):
        find_perturbed_fixed_point(side, 0.98)
    # the continuation branch ends in a fold between 0.981 and 0.982
    with pytest.raises(NoSignChange):
        find_perturbed_fixed_point(side, 0.981)
    find_perturbed_fixed_point(side, 0.982)


def test_window_is_enforced():
    with pytest.raises(ValueError):
        perturbed_ratios(Side.LEFT, 0.19, 0.9)
    assert perturbed_ratios(Side.LEFT, 0.19, 0.9, window=None).s0 > 0


def test_continuum_sweep_is_monotone_and_collects_failures(side):
    sweep = continuum_sweep(side, (0.98, 0.99, 1.0, 1.01))
    assert [p.epsilon for p in sweep] == [0.99, 1.0, 1.01]
    assert [e for e, _ in sweep.failures] == [0.98]
    assert sweep.monotone is True
