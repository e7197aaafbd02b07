"""Holomorphic 1-chains made of graphs of rational maps.

A chain sum_j m_j graph(g_j) is stored as its list of ``(map, multiplicity)``
components.  Words follow the convention w = g_{j_n} o ... o g_{j_1}: the
index tuple is read left to right and ``indices[0]`` is applied first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded
from .poly import CLUSTER_TOL, form_roots
from .rational import (
    DEGREE_CAP,
    RationalMap,
    compose_maps,
    critical_values,
    maps_close,
    preimage_form,
)
from .sphere import PointSet, as_h, chordal_h, merge_close, normalize_h

WORD_CAP = 1_000_000


@dataclass(frozen=True, eq=False)
class Chain:
    components: tuple

    def __post_init__(self):
        comps = tuple((g, int(m)) for g, m in self.components)
        if not comps:
            raise ValueError("a chain needs at least one component")
        if any(m < 1 for _, m in comps):
            raise ValueError("multiplicities must be positive integers")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_maps(cls, maps, mults=None):
        maps = list(maps)
        mults = [1] * len(maps) if mults is None else list(mults)
        return cls(tuple(zip(maps, mults)))

    @property
    def maps(self):
        return [g for g, _ in self.components]

    @property
    def mults(self):
        return [m for _, m in self.components]

    @property
    def degrees(self):
        return [g.degree for g in self.maps]

    @property
    def N_list(self):
        return sum(self.mults)

    @property
    def d0(self):
        return self.N_list

    @property
    def d1(self):
        return sum(m * g.degree for g, m in self.components)

    def __len__(self):
        return len(self.components)

    def __repr__(self):
        parts = ", ".join(f"{m}x deg {g.degree}" for g, m in self.components)
        return f"Chain({parts}; d1={self.d1}, d0={self.d0})"


@dataclass(frozen=True)
class Word:
    indices: tuple
    weight: int = 1

    def __len__(self):
        return len(self.indices)


@dataclass(frozen=True)
class BranchBoundReport:
    n: int
    l: int
    tau: int
    bound: float
    fraction: float


def chain_degrees(c):
    """``(d1, d0, key_condition)``; the key condition is d1 > d0."""
    return c.d1, c.d0, c.d1 > c.d0


def _merge_components(pairs, tol=1e-9):
    merged = []
    for g, m in pairs:
        for k, (h, mh) in enumerate(merged):
            if maps_close(g, h, tol):
                merged[k] = (h, mh + m)
                break
        else:
            merged.append((g, m))
    return Chain(tuple(merged))


def compose_chains(a, b, degree_cap=DEGREE_CAP, merge_tol=1e-9):
    """``b o a``: every ``g_b o g_a`` with multiplicity m_a * m_b.

    Numerically identical compositions are merged by summing multiplicities,
    which is how semigroup relations such as g2 o g1 = g1 o g2 show up.
    """
    pairs = []
    for ga, ma in a.components:
        for gb, mb in b.components:
            pairs.append((compose_maps(gb, ga, reduce=False, degree_cap=degree_cap), ma * mb))
    return _merge_components(pairs, merge_tol)


def iterate_chain(c, n, degree_cap=DEGREE_CAP):
    out = c
    for _ in range(n - 1):
        out = compose_chains(out, c, degree_cap)
    return out


def enumerate_words(c, n, word_cap=WORD_CAP):
    """All length-n index sequences in lexicographic order, with weights."""
    if n < 1:
        raise ValueError("word length must be >= 1")
    if c.N_list ** n > word_cap:
        raise CapExceeded(f"{c.N_list}^{n} words exceed cap {word_cap}")
    mults = c.mults
    return [Word(idx, int(np.prod([mults[j] for j in idx]))) for idx in itertools.product(range(len(c)), repeat=n)]


def word_map(c, w, degree_cap=DEGREE_CAP):
    """Symbolic composition of a word."""
    idx = w.indices if isinstance(w, Word) else tuple(w)
    g = c.maps[idx[0]]
    for j in idx[1:]:
        g = compose_maps(c.maps[j], g, reduce=False, degree_cap=degree_cap)
    return g


def word_orbit_h(c, w, h):
    """Orbit points ``[h, g_{j1}(h), ...]`` of homogeneous points under a word."""
    idx = w.indices if isinstance(w, Word) else tuple(w)
    orbit = [normalize_h(np.asarray(h, dtype=complex))]
    for j in idx:
        orbit.append(c.maps[j].apply_h(orbit[-1]))
    return orbit


def word_multiplier_h(c, w, h):
    """Chain-rule product of spherical multipliers along the orbit."""
    idx = w.indices if isinstance(w, Word) else tuple(w)
    orbit = word_orbit_h(c, idx, h)
    out = np.ones(np.shape(orbit[0])[:-1])
    for j, pt in zip(idx, orbit[:-1]):
        out = out * c.maps[j].sph_mult_h(pt)
    return out


def word_multiplier(c, w, p):
    return float(word_multiplier_h(c, w, as_h(p)))


def _dedupe(h, tol=CLUSTER_TOL):
    if len(h) == 0:
        return h
    rep, _, _ = merge_close(h, tol)
    return rep


def critical_union(c, l, word_cap=WORD_CAP, tol=CLUSTER_TOL):
    """C_l: critical values of all words of length <= l.

    Uses crit(g o w) = g(crit(w)) U crit(g), so no word is composed
    symbolically.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    if len(c) ** l > word_cap:
        raise CapExceeded(f"{len(c)}^{l} words exceed cap {word_cap}")
    own = [critical_values(g, tol).h for g in c.maps]
    level = np.zeros((0, 2), dtype=complex)
    union = np.zeros((0, 2), dtype=complex)
    for _ in range(l):
        parts = []
        for g, cv in zip(c.maps, own):
            if len(level):
                parts.append(g.apply_h(level))
            parts.append(cv)
        level = _dedupe(np.concatenate(parts), tol)
        union = _dedupe(np.concatenate([union, level]), tol)
    return PointSet(union)


def branch_count_bound(c, n, l):
    """Lower bound d1^n [1 - (N/d1)^l tau (N+1)] on regular inverse branches."""
    if n < 1 or l < 1:
        raise ValueError("n and l must be >= 1")
    tau = len(critical_union(c, 1))
    big_n, d1 = c.N_list, c.d1
    fraction = max(0.0, 1.0 - (big_n / d1) ** l * tau * (big_n + 1))
    return BranchBoundReport(n=n, l=l, tau=tau, bound=float(d1) ** n * fraction, fraction=fraction)


def word_critical_values(c, w, tol=CLUSTER_TOL):
    """Critical values of one word, via forward images of generator critical values."""
    acc = np.zeros((0, 2), dtype=complex)
    for j in w.indices:
        g = c.maps[j]
        parts = [critical_values(g, tol).h]
        if len(acc):
            parts.insert(0, g.apply_h(acc))
        acc = _dedupe(np.concatenate(parts), tol)
    return acc


def regular_branch_count(c, n, center, radius, word_cap=WORD_CAP):
    """Count (with multiplicity) regular inverse branches of the n-th iterate over a disk.

    A word contributes its simple preimages of the disk center when no
    critical value of the word lies in the closed chordal disk; over a simply
    connected disk free of critical values each such preimage continues to a
    biholomorphic inverse branch.
    """
    center_h = normalize_h(as_h(center))
    total = 0
    for w in enumerate_words(c, n, word_cap):
        cv = word_critical_values(c, w)
        if len(cv) and chordal_h(cv, center_h).min() <= radius:
            continue
        pts = center_h[None, :]
        for j in reversed(w.indices):
            g = c.maps[j]
            nxt = []
            for row in preimage_form(g, pts):
                h, mult, _ = form_roots(row, g.degree)
                nxt.append(h[mult == 1])
            pts = np.concatenate(nxt) if nxt else np.zeros((0, 2), dtype=complex)
        total += w.weight * len(pts)
    return total


def chain_from_config(gens):
    """Chain from ``[{"num": [[re, im], ...], "den": [...], "mult": m}, ...]``."""
    maps, mults = [], []
    for g in gens:
        num = [complex(re, im) for re, im in g["num"]]
        den = [complex(re, im) for re, im in g.get("den", [[1.0, 0.0]])]
        maps.append(RationalMap.from_coeffs(num, den))
        mults.append(int(g.get("mult", 1)))
    return Chain.from_maps(maps, mults)


def _coeff_pairs(coeffs):
    c = np.asarray(coeffs, dtype=complex)
    nz = np.flatnonzero(c)
    c = c[: nz[-1] + 1] if len(nz) else c[:1]
    return [[float(v.real), float(v.imag)] for v in c]


def chain_to_config(c):
    """Inverse of ``chain_from_config``, in affine ascending coefficients."""
    return [{"num": _coeff_pairs(g.P), "den": _coeff_pairs(g.Q), "mult": m} for g, m in c.components]
