import math

import numpy as np
import pytest

from ratcorr.correspondence import Chain, enumerate_words, word_orbit_h
from ratcorr.errors import CapExceeded
from ratcorr.measures import (
    AtomicMeasure,
    ShrinkProbeParams,
    angular_histogram,
    binned_tv,
    branch_shrink_probe,
    disk_diameter,
    mass_near_circle,
    pullback_exact,
    pullback_sample,
    repelling_measure,
    word_fixed_points,
)
from ratcorr.rational import RationalMap
from ratcorr.sphere import P1Point, chordal_h, random_point

Z2, Z3 = RationalMap.power(2), RationalMap.power(3)
C23 = Chain.from_maps([Z2, Z3])
C2 = Chain.from_maps([Z2])


def atom_table(m):
    return sorted((round(z.real, 9) + 0.0, round(z.imag, 9) + 0.0, round(w, 12)) for z, w in zip(m.values, m.weights))


def test_pullback_exact_examples():
    m = pullback_exact(C2, P1Point.from_complex(1), 2)
    assert atom_table(m) == [(-1.0, 0.0, 0.25), (0.0, -1.0, 0.25), (0.0, 1.0, 0.25), (1.0, 0.0, 0.25)]
    m = pullback_exact(C23, P1Point.from_complex(1), 1)
    s3 = round(math.sqrt(3) / 2, 9)
    assert atom_table(m) == [(-1.0, 0.0, 0.2), (-0.5, -s3, 0.2), (-0.5, s3, 0.2), (1.0, 0.0, 0.4)]
    w0 = random_point(5)
    m = pullback_exact(C23, w0, 0)
    assert len(m) == 1 and m.mass == 1.0


def test_pullback_mass_and_support():
    w0 = random_point(2)
    for n in range(1, 5):
        m = pullback_exact(C23, w0, n)
        assert abs(m.mass - 1) <= 1e-9
    # forward verification: every atom returns to w0 along some word
    m = pullback_exact(C23, w0, 3)
    best = np.full(len(m), np.inf)
    for w in enumerate_words(C23, 3):
        best = np.minimum(best, chordal_h(word_orbit_h(C23, w, m.h)[-1], w0.h))
    assert best.max() <= 1e-5


def test_pullback_from_circle_stays_on_circle():
    w0 = P1Point.from_complex(np.exp(0.7j))
    for c in (C2, Chain.from_maps([Z3])):
        m = pullback_exact(c, w0, 5)
        assert np.abs(np.abs(m.values) - 1).max() <= 1e-9


def test_pullback_atom_cap():
    with pytest.raises(CapExceeded):
        pullback_exact(C23, random_point(1), 10, atom_cap=1000)


def test_key_condition_required():
    mob = Chain.from_maps([RationalMap.from_coeffs([1, 2], [-1, 1])])
    with pytest.raises(ValueError):
        pullback_exact(mob, random_point(1), 1)


def test_pullback_sample_determinism_and_mass():
    w0 = random_point(1)
    a = pullback_sample(C23, w0, 3, 5000, seed=9)
    b = pullback_sample(C23, w0, 3, 5000, seed=9, workers=3)
    assert np.array_equal(a.h, b.h)
    assert a.mass == pytest.approx(1.0, abs=1e-12)
    c = pullback_sample(C23, w0, 3, 5000, seed=10)
    assert not np.array_equal(a.h, c.h)


def test_repelling_examples():
    mu, pts = repelling_measure(Chain.from_maps([Z3]), 1)
    assert atom_table(mu) == [(-1.0, 0.0, round(1 / 3, 12)), (1.0, 0.0, round(1 / 3, 12))]
    assert mu.mass == pytest.approx(2 / 3)
    assert sorted(round(p.multiplier, 9) for p in pts) == [3.0, 3.0]
    mu, pts = repelling_measure(C23, 1)
    assert mu.mass == pytest.approx(3 / 5)
    merged = mu.merged()
    assert atom_table(merged) == [(-1.0, 0.0, 0.2), (1.0, 0.0, 0.4)]


def test_fixed_point_count_matches_bezout():
    for n, total in ((1, 7), (2, 29), (3, 133)):
        recs = word_fixed_points(C23, n)
        assert sum(r.weight for r in recs) == total
        mu, _ = repelling_measure(C23, n)
        assert mu.mass <= total / 5 ** n


def test_weighted_chain_counts():
    c = Chain.from_maps([Z2, Z3], [2, 1])
    for n in (1, 2):
        assert sum(r.weight for r in word_fixed_points(c, n)) == c.d1 ** n + c.d0 ** n


def test_binned_tv_examples():
    m = pullback_exact(C23, random_point(3), 3)
    assert binned_tv(m, m, 8) == 0
    a = AtomicMeasure.dirac(P1Point.from_complex(0))
    b = AtomicMeasure.dirac(P1Point.infinity())
    for g in (2, 5, 8):
        assert binned_tv(a, b, g) == 1.0
    with pytest.raises(ValueError):
        binned_tv(a, b, 1)


def test_repelling_vs_pullback_from_unit_circle_point():
    mu, _ = repelling_measure(C23, 5)
    m = pullback_exact(C23, P1Point.from_complex(np.exp(1j)), 5)
    assert binned_tv(mu, m, 8) <= 0.1


def test_angular_uniformity_depth6():
    m = pullback_exact(C23, random_point(1), 6)
    hist = angular_histogram(m, 36)
    assert np.abs(hist * 36 - 1).max() <= 0.1


def test_mass_near_circle():
    mu, _ = repelling_measure(C23, 3)
    assert mass_near_circle(mu) == pytest.approx(1.0)
    off = AtomicMeasure.dirac(P1Point.from_complex(0.5))
    assert mass_near_circle(off) == 0.0


def test_shrink_probe_depth_zero_is_disk():
    p = ShrinkProbeParams(P1Point.from_complex(0.3 + 0.2j), 0.05, 0, samples=10, seed=1)
    r = branch_shrink_probe(C23, p)
    assert r.median_diam == pytest.approx(disk_diameter(0.05), rel=1e-9)


def test_shrink_probe_arcs_halve_for_z2():
    p = ShrinkProbeParams(P1Point.from_complex(1j), 0.02, 6, samples=20, seed=2)
    r = branch_shrink_probe(C2, p)
    assert np.allclose(r.ratios()[1:], 0.5, atol=1e-3)


def test_shrink_probe_rate_power_family():
    p = ShrinkProbeParams(random_point(4), 0.01, 7, samples=200, seed=5)
    r = branch_shrink_probe(C23, p)
    assert all(x <= 0.85 for x in r.ratios()[3:7])
    assert r.quantile_diam >= r.median_diam


def test_shrink_params_validation():
    with pytest.raises(ValueError):
        ShrinkProbeParams(P1Point.from_complex(0), 1.5, 3)
