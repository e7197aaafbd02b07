"""Julia-set samples, the derivative sup M, the weighted-family ladder and box counting.

The lower bound in play is dim_H J(S) >= log(max deg g_j) / log M, where
M = sup |g_j'| over J(S) in an affine chart that keeps the poles of every
g_j away from J(S).  It is approached through the weighted chains
Gamma(k) = sum_{j<N} graph(g_j) + k graph(g_N), g_N of maximal degree, whose
values lambda(k) = log R(k) / log M increase to the bound.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .correspondence import Chain
from .errors import CaseASuspicion, PoleOnSample, RootFindingError
from .measures import ATOM_CAP, repelling_measure, _preimage_rows
from .rational import RationalMap, conjugate, fixed_points, is_repelling
from .sphere import (
    POINT_TOL,
    PointSet,
    as_h,
    chordal_h,
    fibonacci_sphere,
    h_from_complex,
    h_to_complex,
    merge_close,
    mobius_apply,
    normalize_h,
    random_points,
    rotation_to,
    to_xyz,
)

FIT_QUALITY_MIN = 0.98
DEFAULT_SCALES = tuple(2.0 ** -k for k in range(3, 9))
VERIFY_TOL = 1e-5
INF_CLEARANCE = 0.05
MIN_CLEARANCE = 0.01
CRITICAL_WARN = 1e-6
MIN_PER_BOX = 2

_INF = np.array([1.0, 0.0], dtype=complex)


@dataclass(frozen=True, eq=False)
class JuliaSample:
    """Finite proxy for J(S).

    ``source`` is one of ``"circle-analytic"``, ``"repelling"`` or
    ``"pullback"``; pullback samples carry forward-verification residuals.
    """

    points: PointSet
    source: str
    residuals: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.points) == 0:
            raise ValueError("a Julia sample must be nonempty")
        if self.source not in ("circle-analytic", "repelling", "pullback"):
            raise ValueError(f"unknown sample source {self.source!r}")

    @property
    def h(self):
        return self.points.h

    def __len__(self):
        return len(self.points)


@dataclass
class DimensionReport:
    M: float
    max_deg: int
    bound: float
    lambda_table: list
    box_dim: float
    fit_quality: float
    case_a: bool
    recoordinated: bool
    notes: list = field(default_factory=list)

    def to_json(self):
        def num(x):
            return None if x is None or (isinstance(x, float) and not math.isfinite(x)) else x

        return {
            "M": self.M,
            "max_deg": self.max_deg,
            "bound_sample_M": num(self.bound),
            "lambda_table": [{"k": k, "R_k": r, "lambda_k": l} for k, r, l in self.lambda_table],
            "box_dim": num(self.box_dim),
            "fit_quality": num(self.fit_quality),
            "case_a": self.case_a,
            "recoordinated": self.recoordinated,
            "notes": list(self.notes),
        }


# -- samples ------------------------------------------------------------------

def circle_sample(count):
    """``count`` equally spaced points on the unit circle."""
    z = np.exp(2j * np.pi * (np.arange(count) + 0.5) / count)
    return JuliaSample(PointSet(h_from_complex(z)), "circle-analytic")


def repelling_sample(c, n):
    mu, _ = repelling_measure(c, n)
    h, _, _ = merge_close(mu.h, POINT_TOL)
    return JuliaSample(PointSet(h), "repelling")


def default_base_point(c):
    """A repelling fixed point of a maximal-degree generator (a point of J)."""
    g = max(c.maps, key=lambda m: m.degree)
    fps = [(p, lam) for p, _, lam in fixed_points(g) if is_repelling(lam)]
    if not fps:
        raise ValueError("maximal-degree generator has no repelling fixed point")
    return max(fps, key=lambda t: t[1])[0]


def pullback_julia_sample(c, n, w0=None, atom_cap=ATOM_CAP):
    """Depth-n backward tree from ``w0`` with each atom checked forward.

    Every atom remembers the word it was reached by; the residual is the
    chordal distance from word(atom) to w0.  Defaults to a base point in J
    so the whole tree lies in J by backward invariance.
    """
    if c.d1 ** n > atom_cap:
        raise ValueError(f"{c.d1}^{n} atoms exceed cap {atom_cap}")
    w0h = normalize_h(as_h(default_base_point(c) if w0 is None else w0))
    h = w0h[None, :]
    words = np.zeros((1, 0), dtype=int)
    for _ in range(n):
        hs, ws = [], []
        for j, g in enumerate(c.maps):
            roots = _preimage_rows(g, h)
            hs.append(roots.reshape(-1, 2))
            # the new index is applied first going forward
            ws.append(np.hstack([np.full((len(h) * g.degree, 1), j), np.repeat(words, g.degree, axis=0)]))
        h = normalize_h(np.concatenate(hs))
        words = np.concatenate(ws)
    res = np.zeros(len(h))
    if n:
        keys, inv = np.unique(words, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        for k, idx in enumerate(keys):
            rows = np.flatnonzero(inv == k)
            img = h[rows]
            for j in idx:
                img = c.maps[j].apply_h(img)
            res[rows] = chordal_h(img, w0h)
    if res.max() > VERIFY_TOL:
        raise RootFindingError(f"forward verification failed (residual {res.max():.3g})", float(res.max()))
    rep, _, labels = merge_close(h, POINT_TOL)
    worst = np.zeros(len(rep))
    np.maximum.at(worst, labels, res)
    return JuliaSample(PointSet(rep), "pullback", worst)


# -- coordinates --------------------------------------------------------------

def _antipode(h):
    return normalize_h(np.stack([-np.conj(h[..., 1]), np.conj(h[..., 0])], axis=-1))


def _sample_with_images(c, h):
    return np.concatenate([h] + [g.apply_h(h) for g in c.maps])


def recoordinate(c, s, candidates=10_000, seed=0):
    """Move infinity away from the sample and its images if it is too close.

    Returns ``(chain, sample, recoordinated, matrix)``; ``matrix`` is the
    rotation z -> M z applied (identity when nothing changed), so
    ``mobius_apply(inv(M), ...)`` undoes it.
    """
    pts = _sample_with_images(c, s.h)
    if chordal_h(pts, _INF).min() > INF_CLEARANCE:
        return c, s, False, np.eye(2, dtype=complex)
    cand = random_points(candidates, seed)
    tree = cKDTree(to_xyz(pts))
    dist, _ = tree.query(to_xyz(cand))
    best = int(np.argmax(dist))
    clearance = dist[best] / 2.0
    if clearance < MIN_CLEARANCE:
        raise CaseASuspicion(f"best clearance {clearance:.4g} < {MIN_CLEARANCE}; sample and images look dense")
    # U sends 0 to the antipode of p, hence infinity to p; M = U^-1 sends p to infinity
    u = rotation_to(_antipode(cand[best]))
    m = np.conj(u.T)
    maps = [conjugate(g, m) for g in c.maps]
    chain = Chain(tuple(zip(maps, c.mults)))
    moved = JuliaSample(PointSet(mobius_apply(m, s.h)), s.source, s.residuals)
    return chain, moved, True, m


def estimate_M(c, s, pole_tol=1e-9):
    """max_j max over the sample of the affine derivative modulus |g_j'|."""
    h = s.h
    if chordal_h(h, _INF).min() <= pole_tol:
        raise PoleOnSample("sample contains infinity; recoordinate first")
    z = h_to_complex(h)
    best = 0.0
    for j, g in enumerate(c.maps):
        img = g.apply_h(h)
        if chordal_h(img, _INF).min() <= pole_tol:
            raise PoleOnSample(f"generator {j} has a pole on the sample")
        if g.degree > 1 and g.sph_mult_h(h).min() < CRITICAL_WARN:
            warnings.warn(f"generator {j} has a critical point on the sample", RuntimeWarning, stacklevel=2)
        best = max(best, float(np.abs(g.affine_derivative(z)).max()))
    return best


def lambda_table(c, M, ks):
    """Rows ``(k, R(k), lambda(k))`` for the weighted chains Gamma(k)."""
    if M <= 1:
        raise ValueError(f"M = {M} <= 1; the bound is undefined")
    top = max(g.degree for g in c.maps)
    rows = []
    for k in ks:
        r = (c.d1 + (k - 1) * top) / (c.d0 + k - 1)
        rows.append((int(k), r, math.log(r) / math.log(M)))
    return rows


def lower_bound(c, s, k_max=10, scales=DEFAULT_SCALES):
    """Full dimension report for chain ``c`` on Julia sample ``s``."""
    notes = []
    chain, sample, moved, _ = recoordinate(c, s)
    if moved:
        notes.append("recoordinated: infinity was within 0.05 of the sample or its images")
    case_a = case_a_check(chain, sample)
    max_deg = max(g.degree for g in chain.maps)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        M = estimate_M(chain, sample)
    notes.extend(str(w.message) for w in caught)
    if M <= 1:
        raise ValueError(f"M = {M} <= 1; the bound is undefined")
    table = lambda_table(chain, M, range(1, k_max + 1))
    lams = [row[2] for row in table]
    if any(b < a - 1e-15 for a, b in zip(lams, lams[1:])):
        notes.append("lambda(k) is not monotone on this chain")
    bound = 2.0 if case_a else math.log(max_deg) / math.log(M)
    if case_a:
        notes.append("sample and its images cover the sphere: dimension 2")
    notes.append("M is a sample maximum, so the bound is an upper estimate of the true bound")
    notes.append("the sample approximates a subset of J(S) and may under-cover it")
    dim, fit = box_dimension(sample, scales)
    if fit < FIT_QUALITY_MIN:
        notes.append(f"box-count fit quality {fit:.4f} below {FIT_QUALITY_MIN}; dimension withheld")
        dim = float("nan")
    return DimensionReport(M, max_deg, bound, table, dim, fit, case_a, moved, notes)


# -- box counting -------------------------------------------------------------

def _occupancy_corrected(occupied, n):
    """Solve N (1 - exp(-n / N)) = occupied for the box count N.

    With n sample points thrown into N boxes the expected number of occupied
    boxes is N(1 - e^{-n/N}); inverting it undoes saturation at fine scales.
    Returns None when every point sits in its own box (no finite solution).
    """
    if occupied >= n:
        return None
    lo, hi = float(occupied), float(occupied)
    while hi * -math.expm1(-n / hi) < occupied:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * -math.expm1(-n / mid) < occupied:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def box_counts(z, scales):
    """Occupied square boxes of side eps in the affine chart, per scale."""
    xy = np.stack([z.real, z.imag], axis=-1)
    return [len(np.unique(np.floor(xy / eps).astype(np.int64), axis=0)) for eps in scales]


def box_dimension(s, scales=DEFAULT_SCALES):
    """``(dim, fit_quality)``: slope of log N(eps) against log(1/eps) and its R^2.

    A scale is used only when the occupied boxes hold at least
    ``MIN_PER_BOX`` points on average; below that the sample cannot resolve
    the set.  Retained counts are occupancy-corrected.  Fewer than three
    usable scales gives ``(nan, 0.0)``.
    """
    scales = [float(e) for e in scales]
    if len(scales) < 4 or not all(0 < e < 0.5 for e in scales):
        raise ValueError("need at least 4 scales, each in (0, 0.5)")
    h = s.h if isinstance(s, JuliaSample) else as_h(s).reshape(-1, 2)
    if chordal_h(h, _INF).min() <= POINT_TOL:
        raise PoleOnSample("sample contains infinity; recoordinate first")
    h, _, _ = merge_close(h, POINT_TOL)
    if len(h) == 1:
        return 0.0, 1.0
    z = h_to_complex(h)
    xs, ys = [], []
    for eps, occ in zip(scales, box_counts(z, scales)):
        if len(z) < MIN_PER_BOX * occ:
            continue
        xs.append(math.log(1 / eps))
        ys.append(math.log(_occupancy_corrected(occ, len(z))))
    if len(xs) < 3:
        return float("nan"), 0.0
    xs, ys = np.array(xs), np.array(ys)
    slope, icpt = np.polyfit(xs, ys, 1)
    fit = ys - (slope * xs + icpt)
    ss = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 - float((fit ** 2).sum()) / ss if ss > 0 else 1.0
    return float(slope), r2


# -- the sharp family and the covering case -----------------------------------

def _in_product_semigroup(d, gens):
    if d == 1:
        return True
    return any(d % g == 0 and _in_product_semigroup(d // g, gens) for g in gens)


def power_family(degrees):
    """Chain {z^d1, ..., z^dN}, each degree outside the multiplicative span of the earlier ones."""
    degrees = [int(d) for d in degrees]
    if not degrees:
        raise ValueError("need at least one degree")
    if any(d < 2 for d in degrees):
        raise ValueError("degrees must be >= 2")
    if any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise ValueError("degrees must be strictly increasing")
    for i, d in enumerate(degrees):
        if i and _in_product_semigroup(d, degrees[:i]):
            raise ValueError(f"z^{d} already lies in the semigroup generated by z^{degrees[:i]}")
    return Chain.from_maps([RationalMap.power(d) for d in degrees])


def net_size(spacing):
    """Fibonacci net size whose cells have chordal radius about ``spacing``."""
    return int(math.ceil(1.0 / (spacing * spacing)))


def case_a_check(c, s, spacing=0.05):
    """True when sample and generator images hit every cell of a chordal net."""
    net = fibonacci_sphere(net_size(spacing))
    pts = _sample_with_images(c, s.h)
    _, cell = cKDTree(to_xyz(net)).query(to_xyz(pts))
    return bool(len(np.unique(cell)) == len(net))
