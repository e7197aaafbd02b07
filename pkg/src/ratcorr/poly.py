"""Complex polynomials and a simultaneous (Aberth-Ehrlich) root finder.

Polynomials are ascending coefficient arrays.  Homogeneous binary forms
F(z, w) = sum c_i z^i w^(d-i) use the same layout with a declared degree d,
so missing top coefficients become roots at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RootFindingError
from .sphere import chordal_h, h_from_complex, h_to_complex, merge_close

EPS = np.finfo(float).eps
CLUSTER_TOL = 1e-6
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ComplexPoly:
    """``scale * sum(coeffs[i] z^i)`` with ``max |coeffs| == 1``."""

    coeffs: np.ndarray
    scale: float = 1.0

    @classmethod
    def from_coeffs(cls, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        nz = np.flatnonzero(c)
        if len(nz) == 0:
            return cls(np.zeros(1, dtype=complex), 0.0)
        c = c[: nz[-1] + 1]
        s = float(np.abs(c).max())
        return cls(c / s, s)

    @classmethod
    def monomial(cls, k):
        c = np.zeros(k + 1, dtype=complex)
        c[k] = 1.0
        return cls(c, 1.0)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return self.scale == 0.0

    @property
    def full(self):
        """Unnormalised coefficients."""
        return self.coeffs * self.scale

    def __call__(self, z):
        return poly_eval_derive(self, z)[0]

    def __repr__(self):
        return f"ComplexPoly(degree={self.degree}, scale={self.scale:.6g})"


@dataclass(frozen=True, eq=False)
class RootSet:
    """Roots with multiplicities; infinite roots are stored as ``inf``."""

    locations: np.ndarray
    multiplicities: np.ndarray
    residual: float
    h: np.ndarray = field(repr=False, default=None)

    def __iter__(self):
        return iter(zip(self.locations.tolist(), self.multiplicities.tolist()))

    def __len__(self):
        return len(self.locations)

    @property
    def total_multiplicity(self):
        return int(self.multiplicities.sum())


# -- evaluation ---------------------------------------------------------------

def horner(c, z):
    """Value and derivative of ascending ``c`` at ``z`` (broadcasting)."""
    z = np.asarray(z, dtype=complex)
    p = np.full(z.shape, c[-1], dtype=complex)
    dp = np.zeros(z.shape, dtype=complex)
    for a in c[-2::-1]:
        dp = dp * z + p
        p = p * z + a
    return p, dp


def poly_eval_derive(p, z):
    """``(p(z), p'(z))`` by Horner, including the stored scale."""
    v, dv = horner(p.coeffs, z)
    if np.ndim(v) == 0:
        return complex(v) * p.scale, complex(dv) * p.scale
    return v * p.scale, dv * p.scale


def form_eval(c, h):
    """Evaluate the form with ascending coefficients ``c`` at pairs ``h``.

    Uses whichever chart keeps |argument| <= 1, so it never overflows on
    normalised homogeneous input.
    """
    h = np.asarray(h, dtype=complex)
    a, b = h[..., 0], h[..., 1]
    d = len(c) - 1
    use_b = np.abs(b) >= np.abs(a)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(use_b, a / b, b / a)
        piv = np.where(use_b, b, a)
    direct, _ = horner(c, np.where(use_b, t, 0))
    rev, _ = horner(c[::-1], np.where(use_b, 0, t))
    return np.where(use_b, direct, rev) * piv ** d


# -- arithmetic ---------------------------------------------------------------

def poly_mul(p, q):
    """Product by convolution, renormalised."""
    if p.is_zero or q.is_zero:
        return ComplexPoly(np.zeros(1, dtype=complex), 0.0)
    r = ComplexPoly.from_coeffs(np.convolve(p.coeffs, q.coeffs))
    return ComplexPoly(r.coeffs, r.scale * p.scale * q.scale)


def wronskian(num, den, degree):
    """Coefficients of num' den - num den' as a form of degree 2d - 2."""
    n = np.zeros(degree + 1, dtype=complex)
    m = np.zeros(degree + 1, dtype=complex)
    n[: len(num)] = num
    m[: len(den)] = den
    dn = n[1:] * np.arange(1, degree + 1)
    dm = m[1:] * np.arange(1, degree + 1)
    w = np.zeros(max(2 * degree - 1, 1), dtype=complex)
    if degree >= 1:
        a = np.convolve(dn, m) - np.convolve(n, dm)
        w[: len(a)] = a[: len(w)]
    return w


# -- root finding -------------------------------------------------------------

def _newton_polygon_start(c):
    """Initial approximations on circles given by the Newton polygon (Bini)."""
    m = len(c) - 1
    mag = np.abs(c)
    idx = np.flatnonzero(mag > 0)
    logs = np.log(mag[idx])
    hull = [0]
    for k in range(1, len(idx)):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            # keep the upper hull: drop the middle point when it lies below
            cross = (idx[i1] - idx[i0]) * (logs[k] - logs[i0]) - (logs[i1] - logs[i0]) * (idx[k] - idx[i0])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(k)
    z0 = []
    sigma = 0.7
    for i0, i1 in zip(hull[:-1], hull[1:]):
        k = idx[i1] - idx[i0]
        r = np.exp((logs[i0] - logs[i1]) / k)
        ang = 2 * np.pi * np.arange(k) / k + 2 * np.pi * idx[i0] / m + sigma
        z0.append(r * np.exp(1j * ang))
    return np.concatenate(z0)


def _fujiwara_start(c):
    """Vectorised initial circles for a batch ``c`` of shape (B, m+1)."""
    m = c.shape[1] - 1
    lead = c[:, -1:]
    k = np.arange(1, m + 1)
    ratios = np.abs(c[:, m - k] / lead) ** (1.0 / k)
    r = np.maximum(ratios.max(axis=1), 1e-3)
    ang = 2 * np.pi * np.arange(m) / m + 0.7
    return r[:, None] * np.exp(1j * ang)[None, :]


def _aberth(c, z, max_iter):
    """Batched Aberth-Ehrlich iteration with Bini's stopping rule.

    ``c`` is (B, m+1) with nonzero leading coefficients, ``z`` (B, m) the
    starting points.  A root is frozen once |p(z)| is at rounding level,
    i.e. below m * eps * sum |c_i| |z|^i.
    """
    b, m = z.shape
    z = z.copy()
    active = np.ones((b, m), dtype=bool)
    ac = np.abs(c)
    rev = c[:, ::-1]
    arev = ac[:, ::-1]
    for _ in range(max_iter):
        if not active.any():
            break
        rows = np.flatnonzero(active.any(axis=1))
        zc = z[rows]
        cc = c[rows]
        inside = np.abs(zc) <= 1
        with np.errstate(all="ignore"):
            y = np.where(inside, zc, 1.0 / zc)
            p = np.where(inside, cc[:, -1:], rev[rows, -1:]) * np.ones_like(zc)
            dp = np.zeros_like(zc)
            s = np.where(inside, ac[rows, -1:], arev[rows, -1:]) * np.ones(zc.shape)
            ay = np.abs(y)
            for i in range(m - 1, -1, -1):
                dp = dp * y + p
                p = p * y + np.where(inside, cc[:, i:i + 1], rev[rows, i:i + 1])
                s = s * ay + np.where(inside, ac[rows, i:i + 1], arev[rows, i:i + 1])
            # p/p' in the z variable; outside the unit disk use the reversal
            ratio = np.where(inside, p / dp, zc * p / (m * p - y * dp))
            done = np.abs(p) <= 4 * m * EPS * s
            diff = zc[:, :, None] - zc[:, None, :]
            idx = np.arange(m)
            diff[:, idx, idx] = np.inf
            sums = (1.0 / diff).sum(axis=2)
            step = ratio / (1.0 - ratio * sums)
        bad = ~np.isfinite(step)
        step[bad] = 1e-3 * (1 + np.abs(zc[bad]))
        act = active[rows] & ~done
        zc = np.where(act, zc - step, zc)
        z[rows] = zc
        active[rows] = act
    return z, active


def _strip(c, declared):
    """Split off exact zero roots and (numerically) infinite roots."""
    c = np.asarray(c, dtype=complex)
    full = np.zeros(declared + 1, dtype=complex)
    full[: min(len(c), declared + 1)] = c[: declared + 1]
    top = np.abs(full).max()
    if top == 0:
        raise RootFindingError("the zero form has every point as a root")
    full = full / top
    nz = np.flatnonzero(np.abs(full) > 4 * EPS)
    hi = nz[-1]
    lo = np.flatnonzero(full)[0]
    n_inf = declared - hi
    return full[lo: hi + 1], lo, n_inf


def cluster_roots(h, tol=CLUSTER_TOL):
    """Merge roots within chordal ``tol``; centroids are chart means."""
    rep, mult, labels = merge_close(h, tol)
    if len(rep) == len(h):
        return h, np.ones(len(h), dtype=int)
    out = np.empty((len(rep), 2), dtype=complex)
    for k in range(len(rep)):
        members = h[labels == k]
        if len(members) == 1:
            out[k] = members[0]
            continue
        if np.abs(members[0, 1]) >= np.abs(members[0, 0]):
            t = np.mean(members[:, 0] / members[:, 1])
            out[k] = h_from_complex(np.array(t))
        else:
            t = np.mean(members[:, 1] / members[:, 0])
            out[k] = h_from_complex(np.array(1.0 / t if t != 0 else np.inf))
    return out, mult.astype(int)


def form_roots(c, degree=None, cluster_tol=CLUSTER_TOL, max_iter=800):
    """Roots of a binary form as homogeneous pairs with multiplicities.

    Returns ``(h, mult, residual)`` where ``residual`` is the largest |F| at
    the normalised representatives of the roots, relative to max |c| = 1.
    """
    c = np.asarray(c, dtype=complex)
    declared = len(c) - 1 if degree is None else degree
    core, n_zero, n_inf = _strip(c, declared)
    m = len(core) - 1
    pieces = []
    if n_zero:
        pieces.append(np.tile([0.0, 1.0], (n_zero, 1)).astype(complex))
    if m > 0:
        z0 = _newton_polygon_start(core)
        z, active = _aberth(core[None, :], z0[None, :], max_iter)
        pieces.append(h_from_complex(z[0]))
    if n_inf:
        pieces.append(np.tile([1.0, 0.0], (n_inf, 1)).astype(complex))
    h = np.concatenate(pieces) if pieces else np.zeros((0, 2), dtype=complex)
    h, mult = cluster_roots(h, cluster_tol)
    full = np.zeros(declared + 1, dtype=complex)
    full[: len(c)] = c[: declared + 1]
    full = full / np.abs(full).max()
    residual = float(np.abs(form_eval(full, h)).max()) if len(h) else 0.0
    if residual > RESIDUAL_TOL:
        raise RootFindingError(f"root residual {residual:.3e} above {RESIDUAL_TOL:g}", residual)
    return h, mult, residual


def poly_roots(p, cluster_tol=CLUSTER_TOL, degree=None):
    """All roots of ``p`` with multiplicity.

    ``degree`` may exceed ``p.degree``; the difference is reported as a root
    at infinity (the polynomial is then read as a homogeneous form).
    """
    if p.is_zero:
        raise RootFindingError("the zero polynomial has no isolated roots")
    declared = p.degree if degree is None else degree
    if declared < 1:
        raise ValueError("root finding needs degree >= 1")
    h, mult, residual = form_roots(p.coeffs, declared, cluster_tol)
    return RootSet(h_to_complex(h), mult, residual * p.scale, h)


def batch_form_roots(c, max_iter=200):
    """Unclustered roots of many forms of one degree at once.

    ``c`` has shape (B, d+1).  Returns homogeneous roots of shape (B, d, 2),
    each root listed as often as its multiplicity (to rounding).  Rows with
    a vanishing top or bottom coefficient go through ``form_roots``.
    """
    c = np.asarray(c, dtype=complex)
    bsz, d1 = c.shape
    d = d1 - 1
    out = np.empty((bsz, d, 2), dtype=complex)
    top = np.abs(c).max(axis=1)
    regular = (np.abs(c[:, -1]) > 1e-10 * top) & (np.abs(c[:, 0]) > 1e-10 * top)
    rows = np.flatnonzero(regular)
    if len(rows):
        cc = c[rows] / c[rows, -1:]
        z, _ = _aberth(cc, _fujiwara_start(cc), max_iter)
        out[rows] = h_from_complex(z)
    for r in np.flatnonzero(~regular):
        h, mult, _ = form_roots(c[r], d)
        out[r] = np.repeat(h, mult, axis=0)
    return out


def roots_close(a, b, tol=CLUSTER_TOL):
    """Chordal distance matrix test helper: every root of ``a`` near ``b``."""
    return bool(np.all(chordal_h(a[:, None, :], b[None, :, :]).min(axis=1) <= tol))
