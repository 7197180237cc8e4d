import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renormlab.bimodal_family import Side
from renormlab.scaling import fixed_point
from renormlab.shift import (
    AlphabetError,
    SymbolSequence,
    build_b_alpha,
    conjugacy_error,
    default_triples,
    injectivity_probe,
    probe_points,
    random_sequences,
    shift,
)

DEPTH = 6


@pytest.fixture(scope="module")
def fpair(fs_pair):
    return fs_pair[Side.LEFT], fs_pair[Side.RIGHT]


def test_sequence_validation_and_shift():
    a = SymbolSequence((2, 0, 1))
    assert str(shift(a)) == "01" and len(a) == 3 and a[0] == 2
    with pytest.raises(AlphabetError):
        SymbolSequence((3,), 3)
    with pytest.raises(ValueError):
        SymbolSequence(())
    with pytest.raises(ValueError):
        shift(SymbolSequence((1,)))


def test_default_triples():
    assert [p.amplitude for p in default_triples(3).phi] == [0.0, 0.01, -0.01]
    assert [p.amplitude for p in default_triples(5).phi] == [0.0, 0.01, -0.01, 0.02, -0.02]


def test_random_sequences_are_seeded():
    a = random_sequences(5, 7, 3, seed=11)
    b = random_sequences(5, 7, 3, seed=11)
    assert a == b and all(len(s) == 7 for s in a)
    assert random_sequences(5, 7, 3, seed=12) != a


def test_zero_sequence_is_the_plain_extension(fpair, joined):
    b = build_b_alpha(SymbolSequence((0,) * (DEPTH + 1)), default_triples(3), DEPTH, *fpair)
    xs = probe_points(b, 400)
    assert np.max(np.abs(b(xs) - joined(xs))) < 1e-14


@settings(max_examples=8, deadline=None)
@given(sym=st.lists(st.integers(0, 2), min_size=DEPTH, max_size=DEPTH))
def test_conjugacy(fpair, sym):
    err = conjugacy_error(SymbolSequence(tuple(sym)), default_triples(3), DEPTH, *fpair, grid=400)
    assert err < 1e-9


def test_every_b_alpha_is_bimodal_and_symmetric(fpair):
    for a in random_sequences(4, DEPTH, 3, seed=5):
        b = build_b_alpha(a, default_triples(3), DEPTH, *fpair)  # shape is checked on build
        assert b.symmetry_defect() < 1e-12


def test_distance_decays_like_s2(fpair):
    base = SymbolSequence((0,) * (DEPTH + 1))
    s2 = fixed_point(Side.LEFT).triple.s2
    dists = []
    for k in range(4):
        sym = list(base.symbols)
        sym[k] = 1
        dists.append(injectivity_probe(base, SymbolSequence(tuple(sym)), default_triples(3), DEPTH, *fpair))
    assert all(d > 0 for d in dists)
    for a, b in zip(dists, dists[1:]):
        assert 0.5 * s2 <= b / a <= 2 * s2
    assert injectivity_probe(base, base, default_triples(3), DEPTH, *fpair) == 0.0


def test_alphabet_mismatch(fpair):
    with pytest.raises(AlphabetError):
        build_b_alpha(SymbolSequence((4, 0), 5), default_triples(3), 2, *fpair)
    with pytest.raises(ValueError):
        build_b_alpha(SymbolSequence((0, 0)), default_triples(3), 0, *fpair)


def test_alphabet_five(fpair):
    t5 = default_triples(5)
    for a in random_sequences(3, DEPTH, 5, seed=2):
        assert conjugacy_error(a, t5, DEPTH, *fpair, grid=400) < 1e-9
