"""Rational self-maps of P^1 in homogeneous form.

A map of degree d is the pair of binary forms (P, Q), both stored as
ascending coefficient arrays of length d + 1.  A polynomial numerator of
lower affine degree is padded, which is how poles at infinity appear.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import CapExceeded, UnreducedMapError
from .poly import CLUSTER_TOL, ComplexPoly, form_eval, form_roots, horner, wronskian
from .sphere import P1Point, PointSet, as_h, chordal_h, merge_close, normalize_h

REDUCE_TOL = 1e-7
REPELLING_GUARD = 1e-9
DEGREE_CAP = 512


def _pad(c, n):
    out = np.zeros(n, dtype=complex)
    c = np.asarray(c, dtype=complex)
    out[: len(c)] = c[:n]
    return out


def _deflate(c, h):
    """Divide the form ``c`` by the linear factor (b z - a w) vanishing at h = [a : b]."""
    a, b = h
    d = len(c) - 1
    g = np.zeros(d, dtype=complex)
    if abs(b) >= abs(a):
        # c_i = b g_{i-1} - a g_i, solved from the top
        nxt = 0j
        for i in range(d, 0, -1):
            nxt = (c[i] + a * nxt) / b
            g[i - 1] = nxt
    else:
        prev = 0j
        for i in range(d):
            prev = (b * prev - c[i]) / a
            g[i] = prev
    return g


@dataclass(frozen=True, eq=False)
class RationalMap:
    """``[P(z, w) : Q(z, w)]`` of degree ``degree`` >= 1."""

    num: ComplexPoly
    den: ComplexPoly
    degree: int
    _P: np.ndarray = field(repr=False, default=None)
    _Q: np.ndarray = field(repr=False, default=None)

    @classmethod
    def from_coeffs(cls, num, den=(1.0,), reduce=True):
        """Build from ascending affine coefficient lists of numerator/denominator."""
        num = np.atleast_1d(np.asarray(num, dtype=complex))
        den = np.atleast_1d(np.asarray(den, dtype=complex))
        pn = ComplexPoly.from_coeffs(num)
        pd = ComplexPoly.from_coeffs(den)
        if pn.is_zero or pd.is_zero:
            raise ValueError("numerator and denominator must be nonzero")
        d = max(pn.degree, pd.degree)
        P, Q = _pad(pn.full, d + 1), _pad(pd.full, d + 1)
        if reduce:
            P, Q, d = _reduce_pair(P, Q, d)
        return cls._from_forms(P, Q, d)

    @classmethod
    def _from_forms(cls, P, Q, d):
        if d < 1:
            raise ValueError("constant maps are not allowed in a rational semigroup")
        s = max(np.abs(P).max(), np.abs(Q).max())
        P = P / s
        Q = Q / s
        return cls(ComplexPoly.from_coeffs(P), ComplexPoly.from_coeffs(Q), int(d), P, Q)

    @classmethod
    def mobius(cls, m):
        """The degree-1 map z -> (a z + b) / (c z + d) of ``m = [[a, b], [c, d]]``."""
        m = np.asarray(m, dtype=complex)
        if abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]) == 0:
            raise ValueError("singular Mobius matrix")
        return cls._from_forms(np.array([m[0, 1], m[0, 0]]), np.array([m[1, 1], m[1, 0]]), 1)

    @classmethod
    def power(cls, k):
        return cls._from_forms(_pad([0] * k + [1], k + 1), _pad([1], k + 1), k)

    @property
    def P(self):
        return self._P

    @property
    def Q(self):
        return self._Q

    @cached_property
    def W(self):
        """Wronskian form P'Q - PQ' (degree 2d - 2)."""
        return wronskian(self._P, self._Q, self.degree)

    def apply_h(self, h):
        """Vectorised evaluation on homogeneous pairs."""
        h = np.asarray(h, dtype=complex)
        out = np.stack([form_eval(self._P, h), form_eval(self._Q, h)], axis=-1)
        if np.any((out[..., 0] == 0) & (out[..., 1] == 0)):
            raise UnreducedMapError("evaluation gave [0:0]; numerator and denominator share a root")
        return normalize_h(out)

    def sph_mult_h(self, h):
        """Spherical derivative norm |W| |h|^2 / |(P, Q)|^2, chart free."""
        h = normalize_h(np.asarray(h, dtype=complex))
        p = form_eval(self._P, h)
        q = form_eval(self._Q, h)
        w = form_eval(self.W, h)
        n2 = np.abs(h[..., 0]) ** 2 + np.abs(h[..., 1]) ** 2
        return np.abs(w) * n2 / (np.abs(p) ** 2 + np.abs(q) ** 2)

    def affine_derivative(self, z):
        """g'(z) = W(z) / q(z)^2 in the affine chart."""
        z = np.asarray(z, dtype=complex)
        w, _ = horner(self.W, z)
        q, _ = horner(self._Q, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return w / q ** 2

    def __call__(self, p):
        return evaluate(self, p)

    def __repr__(self):
        return f"RationalMap(degree={self.degree}, num={np.round(self._P, 6).tolist()}, den={np.round(self._Q, 6).tolist()})"


def _reduce_pair(P, Q, d, tol=REDUCE_TOL):
    """Deflate common roots of the forms P and Q (shared within ``tol``)."""
    while d >= 1:
        hp, mp, _ = form_roots(P, d)
        hq, mq, _ = form_roots(Q, d)
        dist = chordal_h(hp[:, None, :], hq[None, :, :])
        i, j = np.unravel_index(np.argmin(dist), dist.shape)
        if dist[i, j] > tol:
            break
        root = normalize_h(hp[i])
        P = _deflate(P, root)
        Q = _deflate(Q, root)
        d -= 1
    return P, Q, d


def maps_close(f, g, tol=1e-9):
    """Projective equality of coefficient vectors after canonical scaling."""
    if f.degree != g.degree:
        return False
    a = np.concatenate([f.P, f.Q])
    b = np.concatenate([g.P, g.Q])
    k = int(np.argmax(np.abs(a)))
    if abs(b[k]) < 1e-300:
        return False
    return bool(np.abs(a / a[k] - b / b[k]).max() <= tol)


def evaluate(g, p):
    a, b = g.apply_h(as_h(p))
    return P1Point(a, b)


def _powers(c, n):
    """Normalised powers c^0..c^n with log scales (avoids overflow)."""
    out = [(np.ones(1, dtype=complex), 0.0)]
    s = np.abs(c).max()
    base = c / s
    cur = np.ones(1, dtype=complex)
    logs = 0.0
    for _ in range(n):
        cur = np.convolve(cur, base)
        m = np.abs(cur).max()
        cur = cur / m
        logs += np.log(m) + np.log(s)
        out.append((cur, logs))
    return out


def compose_maps(f, g, reduce=True, degree_cap=DEGREE_CAP):
    """``f o g`` (apply g first) in homogeneous form.

    Composing reduced forms gives a reduced form of degree deg f * deg g; the
    common-root pass only cleans up rounding and is skipped when ``reduce``
    is false.
    """
    d = f.degree * g.degree
    if d > degree_cap:
        raise CapExceeded(f"composed degree {d} exceeds cap {degree_cap}")
    df = f.degree
    pw = _powers(g.P, df)
    qw = _powers(g.Q, df)
    terms = []
    for i in range(df + 1):
        prod = np.convolve(pw[i][0], qw[df - i][0])
        terms.append((prod, pw[i][1] + qw[df - i][1]))
    logs = []
    for coeffs in (f.P, f.Q):
        for i in range(df + 1):
            if coeffs[i] != 0:
                logs.append(np.log(abs(coeffs[i])) + terms[i][1])
    top = max(logs)
    P = np.zeros(d + 1, dtype=complex)
    Q = np.zeros(d + 1, dtype=complex)
    for i in range(df + 1):
        prod, ls = terms[i]
        if f.P[i] != 0:
            P[: len(prod)] += f.P[i] * np.exp(ls - top) * prod
        if f.Q[i] != 0:
            Q[: len(prod)] += f.Q[i] * np.exp(ls - top) * prod
    if reduce:
        P, Q, d = _reduce_pair(P, Q, d)
    return RationalMap._from_forms(P, Q, d)


def conjugate(g, m):
    """M o g o M^{-1} for a 2x2 matrix ``m`` (change of coordinates z -> M z)."""
    m = np.asarray(m, dtype=complex)
    mob = RationalMap.mobius(m)
    inv = RationalMap.mobius(np.linalg.inv(m))
    return compose_maps(mob, compose_maps(g, inv, reduce=False), reduce=False)


def preimage_form(g, h):
    """Coefficients of b P - a Q for targets h = [a : b]; shape (..., d + 1)."""
    h = np.asarray(h, dtype=complex)
    return h[..., 1:2] * g.P - h[..., 0:1] * g.Q


def preimages(g, q, cluster_tol=CLUSTER_TOL):
    """Preimages of ``q`` as ``[(P1Point, multiplicity), ...]``; total = deg g."""
    hq = normalize_h(as_h(q))
    h, mult, _ = form_roots(preimage_form(g, hq), g.degree, cluster_tol)
    return [(P1Point(a, b), int(m)) for (a, b), m in zip(h, mult)]


def fixed_point_form(g):
    """Coefficients of w P - z Q, a form of degree d + 1."""
    d = g.degree
    return _pad(g.P, d + 2) - np.concatenate([[0], g.Q])


def fixed_points(g, cluster_tol=CLUSTER_TOL):
    """``[(P1Point, multiplicity, spherical multiplier), ...]``; total = deg g + 1."""
    h, mult, _ = form_roots(fixed_point_form(g), g.degree + 1, cluster_tol)
    lam = g.sph_mult_h(h)
    return [(P1Point(a, b), int(m), float(l)) for (a, b), m, l in zip(h, mult, lam)]


def spherical_multiplier(g, p):
    return float(g.sph_mult_h(as_h(p)))


def is_repelling(multiplier):
    return multiplier > 1.0 + REPELLING_GUARD


def critical_points(g, cluster_tol=CLUSTER_TOL):
    if g.degree == 1:
        return PointSet(np.zeros((0, 2), dtype=complex))
    h, _, _ = form_roots(g.W, 2 * g.degree - 2, cluster_tol)
    return PointSet(h)


def critical_values(g, tol=CLUSTER_TOL):
    """Images of the critical points, deduplicated chordally."""
    cp = critical_points(g, tol)
    if len(cp) == 0:
        return cp
    h, _, _ = merge_close(g.apply_h(cp.h), tol)
    return PointSet(h)
