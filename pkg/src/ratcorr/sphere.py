"""Riemann sphere geometry in homogeneous coordinates.

Points of P^1 are carried as pairs ``(h0, h1)`` meaning ``h0/h1``.  The
vectorised helpers work on complex arrays of shape ``(..., 2)``; the
``P1Point`` and ``PointSet`` classes wrap them for the public API.

The chordal metric is normalised so that antipodal points are at distance 1:

    d([a0:a1], [b0:b1]) = |a0 b1 - a1 b0| / (|a| |b|)

which in the affine chart is |z - w| / sqrt((1 + |z|^2)(1 + |w|^2)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

POINT_TOL = 1e-9


# -- vectorised homogeneous helpers -------------------------------------------

def normalize_h(h):
    """Canonical representative: the larger-modulus coordinate becomes 1."""
    h = np.asarray(h, dtype=complex)
    a, b = h[..., 0], h[..., 1]
    use_b = np.abs(b) >= np.abs(a)
    pivot = np.where(use_b, b, a)
    if np.any(pivot == 0):
        raise ValueError("[0:0] is not a point of P^1")
    out = np.empty(h.shape, dtype=complex)
    out[..., 0] = np.where(use_b, a / pivot, 1.0)
    out[..., 1] = np.where(use_b, 1.0, b / pivot)
    return out


def h_from_complex(z):
    """Lift affine values (``inf`` allowed) to normalised homogeneous pairs."""
    z = np.asarray(z, dtype=complex)
    h = np.empty(z.shape + (2,), dtype=complex)
    inf = ~np.isfinite(z)
    small = ~inf & (np.abs(z) <= 1.0)
    big = ~inf & ~small
    h[small, 0] = z[small]
    h[small, 1] = 1.0
    h[big, 0] = 1.0
    h[big, 1] = 1.0 / z[big]
    h[inf, 0] = 1.0
    h[inf, 1] = 0.0
    return h


def h_to_complex(h):
    """Affine values of homogeneous pairs; the point at infinity maps to ``inf``."""
    h = np.asarray(h, dtype=complex)
    a, b = h[..., 0], h[..., 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        z = a / b
    return np.where(b == 0, complex(np.inf, 0.0), z)


def chordal_h(a, b):
    """Chordal distance between broadcastable arrays of homogeneous pairs."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    num = np.abs(a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0])
    den = np.linalg.norm(a, axis=-1) * np.linalg.norm(b, axis=-1)
    return np.minimum(num / den, 1.0)


def to_xyz(h):
    """Inverse stereographic projection onto the unit sphere in R^3.

    0 goes to the south pole, infinity to the north pole.  Euclidean
    distance there is exactly twice the chordal distance used here.
    """
    h = np.asarray(h, dtype=complex)
    a, b = h[..., 0], h[..., 1]
    n2 = np.abs(a) ** 2 + np.abs(b) ** 2
    ab = a * np.conj(b)
    return np.stack([2 * ab.real / n2, 2 * ab.imag / n2, (np.abs(a) ** 2 - np.abs(b) ** 2) / n2], axis=-1)


def from_xyz(xyz):
    xyz = np.asarray(xyz, dtype=float)
    x, y, zc = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    # [x + iy : 1 - z] and [1 + z : x - iy] are the same point; pick the stable one
    north = zc > 0
    h = np.empty(xyz.shape[:-1] + (2,), dtype=complex)
    h[..., 0] = np.where(north, 1 + zc, x + 1j * y)
    h[..., 1] = np.where(north, x - 1j * y, 1 - zc)
    return normalize_h(h)


def mobius_apply(m, h):
    """Apply the 2x2 matrix ``m`` to homogeneous pairs (column convention)."""
    m = np.asarray(m, dtype=complex)
    h = np.asarray(h, dtype=complex)
    out = np.empty(h.shape, dtype=complex)
    out[..., 0] = m[0, 0] * h[..., 0] + m[0, 1] * h[..., 1]
    out[..., 1] = m[1, 0] * h[..., 0] + m[1, 1] * h[..., 1]
    return normalize_h(out)


def rotation_to(h):
    """Unitary matrix (a rotation of the sphere) sending 0 = [0:1] to ``h``."""
    h = np.asarray(h, dtype=complex)
    a, b = h / np.linalg.norm(h)
    return np.array([[np.conj(b), a], [-np.conj(a), b]])


def merge_close(h, tol=POINT_TOL, weights=None):
    """Merge points closer than ``tol`` (single linkage).

    Returns ``(h_rep, weights_sum, labels)``; each cluster is represented by
    its first member so the output order is deterministic.
    """
    h = np.asarray(h, dtype=complex).reshape(-1, 2)
    n = len(h)
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if n == 0:
        return h, w, np.zeros(0, dtype=int)
    pairs = cKDTree(to_xyz(h)).query_pairs(2.0 * tol, output_type="ndarray")
    if len(pairs) == 0:
        return h, w.copy(), np.arange(n)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, raw = connected_components(graph, directed=False)
    # relabel clusters in order of first appearance
    _, first = np.unique(raw, return_index=True)
    order = np.argsort(first)
    relabel = np.empty_like(order)
    relabel[order] = np.arange(len(order))
    labels = relabel[raw]
    sums = np.bincount(labels, weights=w, minlength=len(order))
    return h[np.sort(first)], sums, labels


# -- public point types -------------------------------------------------------

@dataclass(frozen=True)
class P1Point:
    """A point of the Riemann sphere, stored in canonical homogeneous form."""

    h0: complex
    h1: complex = 1.0

    def __post_init__(self):
        a, b = normalize_h(np.array([self.h0, self.h1], dtype=complex))
        object.__setattr__(self, "h0", complex(a))
        object.__setattr__(self, "h1", complex(b))

    @classmethod
    def from_complex(cls, z):
        a, b = h_from_complex(np.array(z, dtype=complex))
        return cls(a, b)

    @classmethod
    def infinity(cls):
        return cls(1.0, 0.0)

    @property
    def h(self):
        return np.array([self.h0, self.h1], dtype=complex)

    @property
    def is_infinity(self):
        return self.h1 == 0

    @property
    def value(self):
        return complex(h_to_complex(self.h))

    def close_to(self, other, tol=POINT_TOL):
        return chordal_distance(self, other) <= tol

    def __repr__(self):
        if self.is_infinity:
            return "P1Point(inf)"
        return f"P1Point({self.value:.12g})"


@dataclass(frozen=True, eq=False)
class PointSet:
    """Finite set of sphere points backed by an ``(n, 2)`` homogeneous array."""

    h: np.ndarray = field(repr=False)

    def __post_init__(self):
        h = np.asarray(self.h, dtype=complex).reshape(-1, 2)
        object.__setattr__(self, "h", normalize_h(h) if len(h) else h)

    @classmethod
    def from_points(cls, points):
        points = list(points)
        if not points:
            return cls(np.zeros((0, 2), dtype=complex))
        return cls(np.array([p.h for p in points]))

    @classmethod
    def from_complex(cls, z):
        return cls(h_from_complex(np.atleast_1d(np.asarray(z, dtype=complex))))

    def __len__(self):
        return len(self.h)

    def __iter__(self):
        for a, b in self.h:
            yield P1Point(a, b)

    def __getitem__(self, i):
        a, b = self.h[i]
        return P1Point(a, b)

    @property
    def values(self):
        return h_to_complex(self.h)

    def union(self, other, tol=1e-6):
        h, _, _ = merge_close(np.concatenate([self.h, other.h]), tol)
        return PointSet(h)


def as_h(p):
    """Homogeneous array view of a P1Point, PointSet, complex or raw array."""
    if isinstance(p, P1Point):
        return p.h
    if isinstance(p, PointSet):
        return p.h
    arr = np.asarray(p)
    if arr.shape[-1:] == (2,) and np.iscomplexobj(arr):
        return arr
    return h_from_complex(arr)


def chordal_distance(p, q):
    """Chordal distance in [0, 1] between two points."""
    return float(chordal_h(as_h(p), as_h(q)))


def project_affine(p):
    """``(is_infinity, value)`` for a point; value is None at infinity."""
    a, b = normalize_h(as_h(p))
    if b == 0:
        return True, None
    return False, complex(a / b)


def diameter(points):
    """Largest pairwise chordal distance of a nonempty point set."""
    h = as_h(points).reshape(-1, 2)
    if len(h) == 0:
        raise ValueError("diameter of an empty set")
    best = 0.0
    step = 2048
    for i in range(0, len(h), step):
        block = chordal_h(h[i:i + step, None, :], h[None, :, :])
        best = max(best, float(block.max()))
    return best


def random_points(count, seed):
    """``count`` spherical-area-uniform points, as a homogeneous array.

    The homogeneous coordinates are two independent standard complex
    Gaussians, which is uniform on S^3 and so uniform on the sphere.
    """
    g = np.random.default_rng(seed).standard_normal((count, 4))
    return normalize_h(np.stack([g[:, 0] + 1j * g[:, 1], g[:, 2] + 1j * g[:, 3]], axis=-1))


def random_point(seed):
    a, b = random_points(1, seed)[0]
    return P1Point(a, b)


def fibonacci_sphere(count):
    """Nearly uniform deterministic net of ``count`` points (homogeneous)."""
    i = np.arange(count) + 0.5
    zc = 1 - 2 * i / count
    r = np.sqrt(np.clip(1 - zc * zc, 0.0, None))
    theta = np.pi * (3 - np.sqrt(5)) * i
    return from_xyz(np.stack([r * np.cos(theta), r * np.sin(theta), zc], axis=-1))


def chordal_disk_frame(center, radius, k):
    """Center plus ``k`` boundary points of the chordal disk of given radius."""
    rho = radius / np.sqrt(1 - radius * radius)
    ring = rho * np.exp(2j * np.pi * np.arange(k) / k)
    local = np.concatenate([h_from_complex(np.array([0j])), h_from_complex(ring)])
    return mobius_apply(rotation_to(as_h(center)), local)
