"""Atomic measures on the sphere: Dirac pullbacks and repelling-point measures.

Everything here works on homogeneous point arrays; ``AtomicMeasure`` is the
common carrier.  Monte-Carlo routines derive one ``SeedSequence`` child per
fixed-size chunk of orbits, so the output does not depend on how many
workers process the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .correspondence import WORD_CAP, Word, enumerate_words, word_multiplier_h, word_orbit_h
from .errors import CapExceeded, RootFindingError
from .poly import CLUSTER_TOL, batch_form_roots, form_roots
from .rational import DEGREE_CAP, compose_maps, fixed_point_form, is_repelling, preimage_form
from .sphere import (
    POINT_TOL,
    P1Point,
    as_h,
    chordal_disk_frame,
    chordal_h,
    h_from_complex,
    h_to_complex,
    merge_close,
    normalize_h,
    to_xyz,
)

ATOM_CAP = 2_000_000
CHUNK = 8192


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Finite weighted point cloud; ``h`` is (n, 2) homogeneous, ``weights`` (n,)."""

    h: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        h = normalize_h(np.asarray(self.h, dtype=complex).reshape(-1, 2)) if len(self.h) else np.zeros((0, 2), complex)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(w) != len(h):
            raise ValueError("one weight per atom")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "weights", w)

    @classmethod
    def dirac(cls, p):
        return cls(as_h(p).reshape(1, 2), np.ones(1))

    @property
    def mass(self):
        return float(self.weights.sum())

    @property
    def values(self):
        return h_to_complex(self.h)

    def __len__(self):
        return len(self.h)

    @property
    def atoms(self):
        return [(P1Point(a, b), float(w)) for (a, b), w in zip(self.h, self.weights)]

    def merged(self, tol=POINT_TOL):
        h, w, _ = merge_close(self.h, tol, self.weights)
        keep = w > 0
        return AtomicMeasure(h[keep], w[keep])

    def __repr__(self):
        return f"AtomicMeasure(atoms={len(self)}, mass={self.mass:.12g})"


@dataclass(frozen=True)
class RepellingPoint:
    point: P1Point
    word: Word
    multiplier: float
    weight: int


@dataclass(frozen=True)
class FixedPointRecord:
    """One fixed point of one word; ``weight`` = word weight x multiplicity."""

    point: P1Point
    word: Word
    multiplicity: int
    multiplier: float
    weight: int
    exact: bool = True

    @property
    def repelling(self):
        return is_repelling(self.multiplier)


@dataclass(frozen=True)
class ShrinkProbeParams:
    center: P1Point
    radius: float
    depth: int
    samples: int = 200
    seed: int = 0
    epsilon: float = 0.1
    frame: int = 16

    def __post_init__(self):
        if not 0 < self.radius < 1:
            raise ValueError("radius must lie in (0, 1)")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")


@dataclass(frozen=True)
class ShrinkProbeResult:
    median_diam: float
    quantile_diam: float
    per_level: list
    per_level_quantile: list
    discarded: int

    def ratios(self):
        m = np.asarray(self.per_level)
        return (m[1:] / m[:-1]).tolist()


def _require_key_condition(c):
    if c.d1 <= c.d0:
        raise ValueError(f"key condition d1 > d0 fails (d1={c.d1}, d0={c.d0})")


# -- preimages in bulk --------------------------------------------------------

def _preimage_rows(g, h):
    """All preimages of the points ``h`` under ``g``, shape (n, deg, 2).

    Roots come repeated according to multiplicity.  Rows whose roots nearly
    coincide are re-solved with clustering so multiple roots land on a
    single location.
    """
    forms = preimage_form(g, h)
    roots = batch_form_roots(forms)
    d = g.degree
    if d > 1:
        dist = chordal_h(roots[:, :, None, :], roots[:, None, :, :])
        idx = np.arange(d)
        dist[:, idx, idx] = np.inf
        for r in np.flatnonzero(dist.min(axis=(1, 2)) < CLUSTER_TOL):
            hh, mult, _ = form_roots(forms[r], d)
            roots[r] = np.repeat(hh, mult, axis=0)
    return roots


def pullback_step(c, m):
    """One application of the normalised Dirac pullback d1^{-1} F*."""
    hs, ws = [], []
    for g, mult in c.components:
        roots = _preimage_rows(g, m.h)
        hs.append(roots.reshape(-1, 2))
        ws.append(np.repeat(m.weights * mult / c.d1, g.degree))
    return AtomicMeasure(np.concatenate(hs), np.concatenate(ws))


def pullback_exact(c, w0, n, atom_cap=ATOM_CAP, merge_tol=POINT_TOL):
    """d1^{-n} (F^n)^* delta_{w0} by expanding the full backward tree."""
    _require_key_condition(c)
    if c.d1 ** n > atom_cap:
        raise CapExceeded(f"{c.d1}^{n} atoms exceed cap {atom_cap}")
    m = AtomicMeasure.dirac(w0)
    for _ in range(n):
        m = pullback_step(c, m).merged(merge_tol)
    return m


def _sample_chunk(c, w0h, n, size, seed_seq):
    rng = np.random.default_rng(seed_seq)
    probs = np.array([m * g.degree for g, m in c.components], dtype=float) / c.d1
    h = np.tile(w0h, (size, 1))
    for _ in range(n):
        comp = rng.choice(len(c), size=size, p=probs)
        u = rng.random(size)
        nxt = np.empty_like(h)
        for j, g in enumerate(c.maps):
            rows = np.flatnonzero(comp == j)
            if len(rows) == 0:
                continue
            roots = batch_form_roots(preimage_form(g, h[rows]))
            pick = np.minimum((u[rows] * g.degree).astype(int), g.degree - 1)
            nxt[rows] = roots[np.arange(len(rows)), pick]
        h = normalize_h(nxt)
    return h


def pullback_sample(c, w0, n, count, seed, workers=1, chunk=CHUNK):
    """Monte-Carlo version of ``pullback_exact`` with ``count`` backward orbits.

    Each step picks component j with probability m_j deg(g_j) / d1 and then
    one preimage uniformly from the list of deg(g_j) roots, which weights
    preimages by multiplicity.
    """
    _require_key_condition(c)
    w0h = normalize_h(as_h(w0))
    sizes = [min(chunk, count - s) for s in range(0, count, chunk)]
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(sizes, seeds))

    def run(job):
        return _sample_chunk(c, w0h, n, job[0], job[1])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    h = np.concatenate(parts) if parts else np.zeros((0, 2), dtype=complex)
    return AtomicMeasure(h, np.full(len(h), 1.0 / count))


# -- fixed points of words ----------------------------------------------------

def _newton_fixed_points(c, word, grid=200, iters=60):
    """Fixed points of a word by Newton from a sphere grid (no multiplicities).

    Each seed works in the chart (z or 1/z) where it has modulus <= 1; the
    derivative is a forward difference.  Used only beyond the degree cap.
    """
    theta = np.linspace(0, np.pi, grid + 2)[1:-1]
    phi = np.linspace(0, 2 * np.pi, grid, endpoint=False)
    t, p = np.meshgrid(theta, phi, indexing="ij")
    r = np.tan(t / 2)
    seeds = (r * np.exp(1j * p)).ravel()
    found = []
    for flip in (False, True):
        z = seeds[np.abs(seeds) <= 1]

        def f(x):
            src = h_from_complex(1 / x if flip else x)
            img = h_to_complex(word_orbit_h(c, word, src)[-1])
            with np.errstate(divide="ignore", invalid="ignore"):
                return (1 / img if flip else img) - x

        for _ in range(iters):
            fx = f(z)
            step = 1e-7 * (1 + np.abs(z))
            df = (f(z + step) - fx) / step
            with np.errstate(divide="ignore", invalid="ignore"):
                z = z - fx / df
            z = z[np.isfinite(z) & (np.abs(z) < 1.5)]
        ok = np.abs(f(z)) < 1e-9
        found.append(h_from_complex(1 / z[ok] if flip else z[ok]))
    h = np.concatenate(found)
    if len(h) == 0:
        return h
    rep, _, _ = merge_close(h, CLUSTER_TOL)
    return rep


def word_fixed_points(c, n, word_cap=WORD_CAP, degree_cap=DEGREE_CAP):
    """Every fixed point of every length-n word, with multiplicity and multiplier.

    Words are composed symbolically while the degree stays within
    ``degree_cap``; beyond it a Newton search is used and the records are
    marked ``exact=False`` (lower bound only).
    """
    words = enumerate_words(c, n, word_cap)
    cache = {}

    def build(idx):
        if idx in cache:
            return cache[idx]
        if len(idx) == 1:
            g = c.maps[idx[0]]
        else:
            prev = build(idx[:-1])
            g = None if prev is None else compose_maps(c.maps[idx[-1]], prev, reduce=False, degree_cap=degree_cap)
        cache[idx] = g
        return g

    records = []
    for w in words:
        deg = int(np.prod([c.maps[j].degree for j in w.indices]))
        if deg <= degree_cap:
            g = build(w.indices)
            h, mult, _ = form_roots(fixed_point_form(g), g.degree + 1)
            exact = True
        else:
            h = _newton_fixed_points(c, w)
            mult = np.ones(len(h), dtype=int)
            exact = False
        lam = word_multiplier_h(c, w, h) if len(h) else np.zeros(0)
        for (a, b), k, l in zip(h, mult, lam):
            records.append(FixedPointRecord(P1Point(a, b), w, int(k), float(l), w.weight * int(k), exact))
    return records


def repelling_measure(c, n, word_cap=WORD_CAP, degree_cap=DEGREE_CAP):
    """mu_n = d1^{-n} sum of Dirac masses at repelling fixed points of length-n words.

    Returns ``(measure, points)``; a point fixed by several words appears
    once per word, weighted by the word weight.
    """
    if max(g.degree for g in c.maps) < 2:
        raise ValueError("some generator must have degree >= 2")
    recs = [r for r in word_fixed_points(c, n, word_cap, degree_cap) if r.repelling]
    points = [RepellingPoint(r.point, r.word, r.multiplier, r.weight) for r in recs]
    if not recs:
        return AtomicMeasure(np.zeros((0, 2), complex), np.zeros(0)), points
    h = np.array([r.point.h for r in recs])
    w = np.array([r.weight for r in recs], dtype=float) / float(c.d1) ** n
    return AtomicMeasure(h, w), points


# -- comparison ---------------------------------------------------------------

def cube_sphere_bins(h, grid):
    """Cell index in an equiangular cube-sphere with ``6 * grid**2`` cells."""
    xyz = to_xyz(h)
    # points on a cell boundary (e.g. the equator) would otherwise be split by rounding noise
    xyz = np.where(np.abs(xyz) < 1e-12, 0.0, xyz)
    axis = np.argmax(np.abs(xyz), axis=-1)
    major = np.take_along_axis(xyz, axis[..., None], axis=-1)[..., 0]
    face = 2 * axis + (major < 0)
    others = np.array([[1, 2], [0, 2], [0, 1]])[axis]
    u = np.take_along_axis(xyz, others[..., :1], axis=-1)[..., 0] / np.abs(major)
    v = np.take_along_axis(xyz, others[..., 1:], axis=-1)[..., 0] / np.abs(major)
    iu = np.clip(((4 / np.pi) * np.arctan(u) + 1) / 2 * grid, 0, grid - 1).astype(int)
    iv = np.clip(((4 / np.pi) * np.arctan(v) + 1) / 2 * grid, 0, grid - 1).astype(int)
    return (face * grid + iu) * grid + iv


def binned(m, grid):
    return np.bincount(cube_sphere_bins(m.h, grid), weights=m.weights, minlength=6 * grid * grid)


def binned_tv(a, b, grid=8):
    """Total variation between two measures after cube-sphere binning."""
    if grid < 2:
        raise ValueError("grid must be >= 2")
    return 0.5 * float(np.abs(binned(a, grid) - binned(b, grid)).sum())


def angular_histogram(m, arcs=36):
    """Mass per equal arc of arg(z), normalised to total mass 1."""
    ang = np.angle(m.values) % (2 * np.pi)
    idx = np.minimum((ang / (2 * np.pi) * arcs).astype(int), arcs - 1)
    hist = np.bincount(idx, weights=m.weights, minlength=arcs)
    return hist / hist.sum()


def mass_near_circle(m, tol=1e-3):
    """Fraction of the mass of ``m`` within chordal ``tol`` of the unit circle."""
    z = m.values
    r = np.abs(z)
    with np.errstate(invalid="ignore", divide="ignore"):
        dist = np.where(np.isfinite(r), np.abs(r - 1) / np.sqrt(2 * (1 + r * r)), 0.5)
    return float(m.weights[dist <= tol].sum() / m.mass)


# -- inverse branch shrinkage -------------------------------------------------

def _probe_batch(c, p, size, seed_seq):
    rng = np.random.default_rng(seed_seq)
    probs = np.array([m * g.degree for g, m in c.components], dtype=float) / c.d1
    frame = chordal_disk_frame(p.center, p.radius, p.frame)
    k1 = len(frame)
    cur = np.tile(frame, (size, 1, 1))
    ok = np.ones(size, dtype=bool)
    diams = np.empty((p.depth + 1, size))
    diams[0] = _frame_diameters(cur)
    for level in range(1, p.depth + 1):
        comp = rng.choice(len(c), size=size, p=probs)
        u = rng.random(size)
        nxt = np.empty_like(cur)
        for j, g in enumerate(c.maps):
            rows = np.flatnonzero(comp == j)
            if len(rows) == 0:
                continue
            roots = _preimage_rows(g, cur[rows].reshape(-1, 2)).reshape(len(rows), k1, g.degree, 2)
            pick = np.minimum((u[rows] * g.degree).astype(int), g.degree - 1)
            anchor = roots[np.arange(len(rows)), 0, pick]
            dist = chordal_h(roots, anchor[:, None, None, :])
            order = np.argsort(dist, axis=2)
            best = np.take_along_axis(dist, order[..., :1], axis=2)[..., 0]
            if g.degree > 1:
                second = np.take_along_axis(dist, order[..., 1:2], axis=2)[..., 0]
                ambiguous = np.any(np.abs(second - best) <= 1e-9 * (1 + second), axis=1)
                ok[rows[ambiguous]] = False
            chosen = np.take_along_axis(roots, order[..., :1, None], axis=2)[:, :, 0, :]
            chosen[:, 0] = anchor
            nxt[rows] = chosen
        cur = nxt
        diams[level] = _frame_diameters(cur)
    return diams[:, ok], int((~ok).sum())


def _frame_diameters(frames):
    return chordal_h(frames[:, :, None, :], frames[:, None, :, :]).max(axis=(1, 2))


def branch_shrink_probe(c, p):
    """Diameter statistics of a disk frame pulled back along random inverse branches.

    Frame points follow the preimage nearest to the center's chosen preimage.
    Samples whose continuation is ambiguous are dropped and replaced; the
    number dropped is reported.
    """
    _require_key_condition(c)
    seeds = np.random.SeedSequence(p.seed)
    kept, discarded, rounds = [], 0, 0
    have = 0
    while have < p.samples:
        if rounds > 50:
            raise RootFindingError("shrink probe keeps hitting ambiguous continuations")
        child = seeds.spawn(1)[0]
        d, bad = _probe_batch(c, p, p.samples - have, child)
        kept.append(d)
        have += d.shape[1]
        discarded += bad
        rounds += 1
    diams = np.concatenate(kept, axis=1)[:, : p.samples]
    med = np.median(diams, axis=1)
    q = np.quantile(diams, 1 - p.epsilon, axis=1)
    return ShrinkProbeResult(float(med[-1]), float(q[-1]), med.tolist(), q.tolist(), discarded)


def disk_diameter(radius):
    """Chordal diameter of a chordal disk of the given radius."""
    return 2 * radius * math.sqrt(1 - radius * radius)
