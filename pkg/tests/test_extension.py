import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renormlab.bimodal_family import Side
from renormlab.extension import (
    ContractionError,
    CubicPiece,
    FillerPolicy,
    PlaneAffineMap,
    ShapeError,
    build_extension,
    derivative_lipschitz_probe,
    hermite_piece,
    join_bimodal,
    junction_report,
    plane_map_from,
    renormalize_joined,
)
from renormlab.scaling import fixed_point
from renormlab.tower import AffineMap1D

coef = st.floats(-3, 3)
slope = st.floats(0.1, 2) | st.floats(-2, -0.1)


@given(c=st.tuples(coef, coef, coef, coef), a=coef, sx=slope, b=coef, sy=slope, t=st.floats(0, 1))
def test_cubic_transform_is_the_graph_image(c, a, sx, b, sy, t):
    p = CubicPiece(0.5, 1.5, c)
    X, Y = AffineMap1D(a, sx), AffineMap1D(b, sy)
    q = p.transform(X, Y)
    x = 0.5 + t
    assert float(q(X(x))) == pytest.approx(Y(float(p(x))), abs=1e-9)
    assert float(q(X(x), 1)) == pytest.approx(sy / sx * float(p(x, 1)), abs=1e-9)
    assert q.width == pytest.approx(abs(sx))


@given(y0=coef, y1=coef, m0=coef, m1=coef)
def test_hermite_end_data(y0, y1, m0, m1):
    p = hermite_piece(0.2, 0.7, y0, y1, m0, m1)
    assert np.allclose(p.end_values, (y0, y1), atol=1e-12)
    assert np.allclose(p.slopes, (m0, m1), atol=1e-9)
    xs = np.linspace(0.2, 0.7, 201)
    assert max(abs(p(xs, 1))) <= p.max_slope + 1e-12
    assert max(abs(p(xs, 2))) <= p.lipschitz + 1e-9


@pytest.mark.parametrize("amp", [0.0, 0.01, -0.02])
def test_filler_policy_is_c1_and_keeps_end_data(amp):
    pieces = FillerPolicy(amp).pieces(0.0, 1.0, 0.0, 1.0, 0.5, 0.25)
    assert pieces[0].end_values[0] == 0.0 and pieces[-1].end_values[1] == pytest.approx(1.0)
    assert pieces[0].slopes[0] == 0.5 and pieces[-1].slopes[1] == pytest.approx(0.25)
    for a, b in zip(pieces, pieces[1:]):
        assert a.end_values[1] == pytest.approx(b.end_values[0], abs=1e-15)
        assert a.slopes[1] == pytest.approx(b.slopes[0], abs=1e-12)
    mid = 0.5
    base = hermite_piece(0.0, 1.0, 0.0, 1.0, 0.5, 0.25)
    part = pieces[0] if len(pieces) == 1 else pieces[1]
    assert float(part(mid)) - float(base(mid)) == pytest.approx(amp, abs=1e-15)


def test_contraction_check():
    PlaneAffineMap(AffineMap1D(0, -0.15), AffineMap1D(0, 0.018)).check_contraction()
    with pytest.raises(ContractionError):
        PlaneAffineMap(AffineMap1D(0, 0.1), AffineMap1D(0, 0.2)).check_contraction()


def test_plane_map_ratios(side, gs_pair):
    S = gs_pair[side].S
    t = fixed_point(side).triple
    assert S.second_derivative_factor == pytest.approx(t.s2 / t.s1**2, rel=1e-12)
    assert S.slope_factor == pytest.approx(t.s2 / t.s1, rel=1e-12)


def test_graph_is_c1_everywhere(side, gs_pair):
    g = gs_pair[side]
    pieces = g.pieces
    for a, b in zip(pieces, pieces[1:]):
        if abs(a.hi - b.lo) < 1e-15:
            assert abs(a.end_values[1] - b.end_values[0]) < 1e-12
            assert abs(a.slopes[1] - b.slopes[0]) < 1e-8
    for j in junction_report(g):
        assert j.mismatch < 1e-8 and j.fd_mismatch < 1e-8


@settings(max_examples=60)
@given(u=st.floats(0.0, 1.0))
def test_self_similarity(side, gs_pair, u):
    # g(h1 v) = F2(g(v)) on the base
    g = gs_pair[side]
    v = u * g.length
    H, Y = g.S.x_part, g.S.y_part
    assert float(g.eval_local(H(v))[0]) == pytest.approx(Y(float(g.eval_local(v)[0])), abs=1e-13)


@settings(max_examples=60)
@given(u=st.floats(0.001, 0.999))
def test_derivative_matches_finite_difference(gs_pair, u):
    g = gs_pair[Side.LEFT]
    x = g.base.lo + u * (g.base.hi - g.base.lo)
    h = 1e-7
    fd = (g(x + h) - g(x - h)) / (2 * h)
    assert fd == pytest.approx(g(x, 1), abs=5e-5)


def test_ledgers(side, gs_pair):
    g = gs_pair[side]
    led, sl = g.lipschitz_ledger, g.slope_ledger
    assert all(b / a == pytest.approx(g.lipschitz_ratio, rel=1e-9) for a, b in zip(led, led[1:]))
    assert all(b < a for a, b in zip(sl[2:], sl[3:]))


def test_critical_value_is_attained(side, gs_pair):
    g = gs_pair[side]
    target = 0.0 if side is Side.LEFT else 1.0
    assert abs(g(g.critical_point) - target) < 1e-12
    assert abs(g.critical_point - fixed_point(side).c_star) < 1e-12


def test_joined_map_shape_symmetry_and_bound(joined):
    assert joined.shape_check() == 3
    assert joined.symmetry_defect() < 1e-12
    assert joined(0.5) == pytest.approx(0.5, abs=1e-12)
    lam = joined.lipschitz_bound
    assert derivative_lipschitz_probe(joined, seed=3) <= lam * (1 + 1e-3)
    assert lam == pytest.approx(25.2368, abs=1e-3)


def test_renormalized_join_reproduces_itself(joined):
    R = renormalize_joined(joined)
    xs = np.concatenate([np.linspace(*joined.left.base, 300), np.linspace(*joined.right.base, 300)])
    assert np.max(np.abs(R(xs) - joined(xs))) < 1e-9
    with pytest.raises(ValueError):
        R(0.5)


def test_join_errors(gs_pair, fs_pair):
    gl, gr = gs_pair[Side.LEFT], gs_pair[Side.RIGHT]
    with pytest.raises(ValueError):
        join_bimodal(gr, gl)
    with pytest.raises(ValueError):
        join_bimodal(gl, build_extension(fs_pair[Side.RIGHT], 4))
    with pytest.raises(ValueError):
        gl(0.9)
    assert plane_map_from(fs_pair[Side.LEFT]) == gl.S


def test_shape_error_on_flat_connector(joined):
    from dataclasses import replace

    bad = replace(joined, connector=CubicPiece(joined.connector.lo, joined.connector.hi, (0.5, -1.0, 0.0, 0.0)))
    with pytest.raises(ShapeError):
        bad.shape_check()


def test_tables_have_global_rows(joined):
    rows = joined.table()
    assert {r[0] for r in rows} == {"l", "m", "r"}
    assert all(r[2] <= r[3] for r in rows)
