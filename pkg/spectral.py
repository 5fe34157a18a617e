"""
Closed-form spectral analysis of 2x2 complex matrices.

This module computes eigenvalues with the numerically stable quadratic
formula, right and left eigenvectors from the adjugate, and the biorthogonal
normalization, which fails (and is reported as failed) at exceptional points.
It also evaluates the closed-form eigenvalues of the diagonal-H0 model.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np

from config import COALESCE_TOL, EPS_TOL, NORM_TOL
from errors import InvalidArgumentError, PreconditionError
from matkit import CMatrix2, CVector2, ModelParams
from utils import ensure_finite, frobenius, unit, vector_to_json

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Radical:
    """R of the diagonal-H0 eigenvalue formula; value**2 == squared."""

    value: complex
    squared: complex


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues e1, e2 with right (r) and left (l, row) eigenvectors.

    When biorthogonal_ok, <l_k|r_k> = 1 (unconjugated). Otherwise the left
    vectors are unit-norm and condition is infinite. `coalesced` marks a
    numerically double eigenvalue.
    """

    e1: complex
    e2: complex
    r1: CVector2
    r2: CVector2
    l1: CVector2
    l2: CVector2
    biorthogonal_ok: bool
    condition: float
    coalesced: bool = False

    @property
    def eigenvalues(self) -> Tuple[complex, complex]:
        return self.e1, self.e2

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eigenvalues": [self.e1, self.e2],
            "right": [vector_to_json(self.r1), vector_to_json(self.r2)],
            "left": [vector_to_json(self.l1), vector_to_json(self.l2)],
            "biorthogonal_ok": self.biorthogonal_ok,
            "condition": self.condition,
            "coalesced": self.coalesced,
        }


def _entries(m: CMatrix2) -> Tuple[complex, complex, complex, complex]:
    m = np.asarray(m)
    if m.shape != (2, 2):
        raise InvalidArgumentError(f"expected a 2x2 matrix, got shape {m.shape}")
    ensure_finite(m, what="matrix entries")
    a, b, c, d = (complex(x) for x in m.ravel())
    return a, b, c, d


def _canonical_order(x: complex, y: complex) -> bool:
    """True if (x, y) is already in lexicographic (real, imag) order."""
    return (x.real, x.imag) <= (y.real, y.imag)


def discriminant(m: CMatrix2) -> complex:
    """tr(m)^2 - 4 det(m), evaluated as (a11 - a22)^2 + 4 a12 a21."""
    a, b, c, d = _entries(m)
    return (a - d) ** 2 + 4.0 * b * c


def characteristic_roots(a: complex, b: complex, c: complex,
                         d: complex) -> Tuple[complex, complex, complex]:
    """Both roots of t^2 - tr t + det and the discriminant, larger root first.

    Works on plain complex entries, so path trackers can call it per point
    without building arrays.
    """
    tr = a + d
    det = a * d - b * c
    disc = (a - d) ** 2 + 4.0 * b * c
    sq = cmath.sqrt(disc)
    if (tr.conjugate() * sq).real < 0.0:
        sq = -sq
    q = 0.5 * (tr + sq)
    if q == 0.0:
        return 0.0j, 0.0j, disc
    return q, det / q, disc


def quadratic_roots(a: complex, b: complex, c: complex) -> Tuple[complex, complex]:
    """Roots of a x^2 + b x + c with complex coefficients, larger magnitude first.

    The larger root comes from -(b + sqrt(b^2 - 4ac)) / 2a with the sign of the
    square root aligned to b; the smaller one from c / q.
    """
    ensure_finite(a, b, c, what="quadratic coefficients")
    a, b, c = complex(a), complex(b), complex(c)
    if a == 0.0:
        raise InvalidArgumentError("leading coefficient of a quadratic must be nonzero")
    sq = cmath.sqrt(b * b - 4.0 * a * c)
    if (b.conjugate() * sq).real < 0.0:
        sq = -sq
    q = -0.5 * (b + sq)
    if q == 0.0:
        return 0.0j, 0.0j
    return q / a, c / q


def eigenvalue_pair(m: CMatrix2) -> Tuple[complex, complex]:
    """Eigenvalues only, in canonical (real, imag) order."""
    a, b, c, d = _entries(m)
    scale = frobenius(np.asarray(m))
    t1, t2, disc = characteristic_roots(a, b, c, d)
    if abs(disc) <= COALESCE_TOL * scale ** 2:
        mean = 0.5 * (a + d)
        return mean, mean
    return (t1, t2) if _canonical_order(t1, t2) else (t2, t1)


def right_kernel(n: CMatrix2) -> CVector2:
    """Larger-magnitude column of adj(n); spans the right kernel of a rank-1 n."""
    a, b, c, d = _entries(n)
    first = np.array([d, -c], dtype=complex)
    second = np.array([-b, a], dtype=complex)
    return first if frobenius(first) >= frobenius(second) else second


def left_kernel(n: CMatrix2) -> CVector2:
    """Larger-magnitude row of adj(n); spans the left kernel of a rank-1 n."""
    a, b, c, d = _entries(n)
    first = np.array([d, -b], dtype=complex)
    second = np.array([-c, a], dtype=complex)
    return first if frobenius(first) >= frobenius(second) else second


def _real_positive_largest(v: CVector2) -> CVector2:
    v = unit(v)
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def _axes() -> Tuple[CVector2, CVector2]:
    return np.array([1.0, 0.0], dtype=complex), np.array([0.0, 1.0], dtype=complex)


def _pair(m: CMatrix2, e: complex) -> Tuple[CVector2, CVector2, bool, float]:
    n = np.asarray(m, dtype=complex) - e * np.eye(2)
    r = _real_positive_largest(right_kernel(n))
    l = unit(left_kernel(n))
    overlap = self_orthogonality(l, r)
    if abs(overlap) < NORM_TOL:
        return r, l, False, math.inf
    return r, l / overlap, True, 1.0 / abs(overlap)


def eigen2(m: CMatrix2) -> Spectrum:
    """Full eigendecomposition of a 2x2 complex matrix in closed form."""
    a, b, c, d = _entries(m)
    m = np.asarray(m, dtype=complex)
    scale = frobenius(m)
    x_axis, y_axis = _axes()
    if scale == 0.0:
        return Spectrum(0j, 0j, x_axis, y_axis, x_axis, y_axis, True, 1.0)

    t1, t2, disc = characteristic_roots(a, b, c, d)
    if abs(disc) <= COALESCE_TOL * scale ** 2:
        mean = 0.5 * (a + d)
        shifted = m - mean * np.eye(2)
        if frobenius(shifted) <= math.sqrt(COALESCE_TOL) * scale:
            # multiple of the identity: every vector is an eigenvector
            return Spectrum(mean, mean, x_axis, y_axis, x_axis, y_axis, True, 1.0, coalesced=True)
        r, l, ok, condition = _pair(m, mean)
        if ok:
            logger.warning("Coalesced eigenvalue %s with a biorthogonal pair; not a Jordan block", mean)
        return Spectrum(mean, mean, r, r, l, l, ok, condition, coalesced=True)

    if not _canonical_order(t1, t2):
        t1, t2 = t2, t1
    r1, l1, ok1, cond1 = _pair(m, t1)
    r2, l2, ok2, cond2 = _pair(m, t2)
    return Spectrum(t1, t2, r1, r2, l1, l2, ok1 and ok2, max(cond1, cond2))


def self_orthogonality(l: CVector2, r: CVector2) -> complex:
    """Unconjugated bilinear product l . r = l1 r1 + l2 r2."""
    return complex(l[0] * r[0] + l[1] * r[1])


def eigenvalues_special(p: ModelParams, lam: complex) -> Tuple[complex, complex, Radical]:
    """E_{1,2} = (eps1 + eps2 + lambda (omega1 + omega2)) / 2 +- R for diagonal H0.

    R = sqrt(d_eps^2 + lambda^2 d_omega^2 + 2 lambda d_eps d_omega cos 2 phi1) / 2.
    """
    if abs(math.sin(p.phi0)) > EPS_TOL:
        raise PreconditionError(f"diagonal H0 required (phi0 = 0), got phi0 = {p.phi0}")
    ensure_finite(lam, what="lambda")
    lam = complex(lam)
    d_eps, d_omega = p.eps_split, p.omega_split
    squared = 0.25 * (
        d_eps ** 2 + lam ** 2 * d_omega ** 2 + 2.0 * lam * d_eps * d_omega * math.cos(2.0 * p.phi1)
    )
    value = cmath.sqrt(squared)
    mean = 0.5 * (p.eps1 + p.eps2 + lam * (p.omega1 + p.omega2))
    return mean + value, mean - value, Radical(value, squared)
