import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ratcorr.correspondence import (
    Chain,
    Word,
    branch_count_bound,
    chain_degrees,
    chain_from_config,
    chain_to_config,
    compose_chains,
    critical_union,
    enumerate_words,
    regular_branch_count,
    word_map,
    word_multiplier,
)
from ratcorr.errors import CapExceeded
from ratcorr.rational import RationalMap, maps_close, spherical_multiplier
from ratcorr.sphere import P1Point, random_point

Z2, Z3 = RationalMap.power(2), RationalMap.power(3)
C23 = Chain.from_maps([Z2, Z3])


def random_chain(rng, max_comp=3, max_deg=3):
    comps = []
    for _ in range(rng.integers(1, max_comp + 1)):
        d = int(rng.integers(1, max_deg + 1))
        num = rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1)
        den = rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1)
        comps.append((RationalMap.from_coeffs(num, den), int(rng.integers(1, 3))))
    return Chain(tuple(comps))


def test_degrees_power_family():
    assert chain_degrees(C23) == (5, 2, True)
    assert chain_degrees(Chain.from_maps([Z2], [3])) == (6, 3, True)
    assert chain_degrees(Chain.from_maps([RationalMap.from_coeffs([1, 2], [-1, 1])])) == (1, 1, False)


def test_compose_power_family():
    cc = compose_chains(C23, C23)
    degs = sorted((g.degree, m) for g, m in cc.components)
    assert degs == [(4, 1), (6, 2), (9, 1)]
    assert (cc.d1, cc.d0) == (25, 4)


def test_words_examples():
    ws = enumerate_words(Chain.from_maps([Z2], [2]), 3)
    assert ws == [Word((0, 0, 0), 8)]
    ws = enumerate_words(C23, 1)
    assert [(w.indices, w.weight) for w in ws] == [((0,), 1), ((1,), 1)]
    with pytest.raises(CapExceeded):
        enumerate_words(C23, 20, word_cap=1000)


def test_word_order_convention():
    # indices[0] is applied first: (z^2 + 1) after z^3 differs from z^3 after (z^2 + 1)
    c = Chain.from_maps([Z3, RationalMap.from_coeffs([1, 0, 1])])
    g = word_map(c, Word((0, 1)))
    assert abs(g(P1Point.from_complex(2.0)).value - 65) < 1e-9


def test_word_multiplier_examples():
    assert word_multiplier(C23, Word((0, 1)), P1Point.from_complex(1)) == pytest.approx(6)
    assert word_multiplier(C23, Word((0, 1)), P1Point.from_complex(0)) == 0
    assert word_multiplier(C23, Word((0, 0)), P1Point.from_complex(1)) == pytest.approx(4)


def test_critical_union_examples():
    for l in (1, 2):
        cu = critical_union(C23, l)
        assert len(cu) == 2
        assert sorted(p.is_infinity for p in cu) == [False, True]
    cu = critical_union(Chain.from_maps([RationalMap.from_coeffs([1, 0, 1])]), 1)
    assert len(cu) == 2


def test_branch_bound_examples():
    r2 = branch_count_bound(C23, 3, 2)
    r3 = branch_count_bound(C23, 3, 3)
    assert r2.tau == 2
    assert abs(r2.fraction - 0.04) <= 1e-12
    assert abs(r3.fraction - 0.616) <= 1e-12
    assert r3.bound == pytest.approx(125 * 0.616)


def test_regular_branches_at_least_bound():
    center = P1Point.from_complex(0.6 + 0.8j)
    for n in (3, 4):
        count = regular_branch_count(C23, n, center, 0.05)
        assert count >= branch_count_bound(C23, n, 2).bound
        assert count == 5 ** n


def test_config_round_trip():
    cfg = [{"num": [[0, 0], [0, 0], [1, 0]], "den": [[1, 0]], "mult": 2}, {"num": [[1, 0], [2, 0]], "den": [[-1, 0], [1, 0]], "mult": 1}]
    c = chain_from_config(cfg)
    assert (c.d1, c.d0) == (5, 3)
    c2 = chain_from_config(chain_to_config(c))
    assert all(maps_close(a, b) for a, b in zip(c.maps, c2.maps))
    assert c2.mults == c.mults


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_degree_multiplicativity(seed):
    c = random_chain(np.random.default_rng(seed))
    cc = compose_chains(c, c)
    assert cc.d1 == c.d1 ** 2
    assert cc.d0 == c.d0 ** 2


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_composition_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_chain(rng, 2, 2) for _ in range(3))
    left = compose_chains(compose_chains(a, b), c)
    right = compose_chains(a, compose_chains(b, c))
    assert (left.d1, left.d0) == (right.d1, right.d0)
    for g, m in left.components:
        total = sum(mr for h, mr in right.components if maps_close(g, h, 1e-7))
        assert total == sum(ml for h, ml in left.components if maps_close(g, h, 1e-7))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_word_weights_sum(seed, n):
    c = random_chain(np.random.default_rng(seed), 3, 1)
    assert sum(w.weight for w in enumerate_words(c, n)) == c.d0 ** n


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_word_multiplier_matches_symbolic(seed, n):
    c = random_chain(np.random.default_rng(seed), 2, 3)
    p = random_point(seed)
    for w in enumerate_words(c, n):
        assert word_multiplier(c, w, p) == pytest.approx(spherical_multiplier(word_map(c, w), p), rel=1e-6)
