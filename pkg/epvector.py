"""
Eigenvector module for the coalesced state at an exceptional point.

This module computes the phases gamma, beta, xi of U0^dagger U1, builds the
single eigenvector at each EP in the time-reversal symmetric, the tau0 = tau1
and the general regime, pairs vectors with located EPs, and classifies the
vectors as polarization states (circular, elliptic or linear).
"""

import cmath
import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING, Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from config import EPS_TOL, POL_TOL
from errors import DegenerateModelError, InvalidArgumentError
from matkit import (
    CMatrix2,
    CVector2,
    ModelParams,
    build_hamiltonian,
    make_unitary,
    make_z,
)
from spectral import left_kernel
from utils import (
    canonical_angle,
    collinearity_defect,
    frobenius,
    principal_arg,
    sign_label,
    sign_value,
    unit,
    vector_to_json,
)

if TYPE_CHECKING:
    from eplocate import EPSolution

logger = logging.getLogger(__name__)

SQRT_HALF = math.sqrt(0.5)

# the two ways of building the general vector must agree to this collinearity
CONSTRUCTION_TOL = 1e-10


@dataclass(frozen=True)
class PhaseTriple:
    """gamma = arg of (U0^dagger U1)_11, beta in [0, pi/2], xi on the principal branch."""

    gamma: float
    beta: float
    xi: float

    @property
    def cos_beta(self) -> float:
        return math.cos(self.beta)

    def to_dict(self) -> Dict[str, float]:
        return {
            "gamma": self.gamma,
            "beta": self.beta,
            "xi": self.xi,
            "cos_beta": self.cos_beta,
        }


class PolarizationKind(str, Enum):
    CIRCULAR = "circular"
    ELLIPTIC = "elliptic"
    LINEAR = "linear"


class Handedness(str, Enum):
    PLUS = "plus"
    MINUS = "minus"
    NONE = "none"


@dataclass(frozen=True)
class PolarizationDescriptor:
    kind: PolarizationKind
    handedness: Handedness
    axial_ratio: float
    orientation: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "handedness": self.handedness.value,
            "axial_ratio": self.axial_ratio,
            "orientation": self.orientation,
        }


def _overlap_elements(p: ModelParams) -> Tuple[complex, complex]:
    """(1,1) and (1,2) elements of U0^dagger U1 written out in the four angles."""
    c0, s0 = math.cos(p.phi0), math.sin(p.phi0)
    c1, s1 = math.cos(p.phi1), math.sin(p.phi1)
    first = c0 * c1 + s0 * s1 * cmath.exp(1j * (p.tau0 - p.tau1))
    second = c1 * s0 * cmath.exp(1j * p.tau0) - c0 * s1 * cmath.exp(1j * p.tau1)
    return first, second


def phases(p: ModelParams) -> PhaseTriple:
    """Phases gamma, beta, xi with U0^dagger U1 = U(-beta, xi) z(2 gamma)."""
    first, second = _overlap_elements(p)
    sin_beta = abs(second)
    if sin_beta < EPS_TOL:
        raise DegenerateModelError(
            f"(U0^dagger U1)_12 vanishes ({sin_beta:.3e}); H0 and H1 commute and xi is undefined"
        )
    c0, s0 = math.cos(p.phi0), math.sin(p.phi0)
    c1, s1 = math.cos(p.phi1), math.sin(p.phi1)
    cos_sq = (c0 * c1) ** 2 + (s0 * s1) ** 2 + 2.0 * c0 * c1 * s0 * s1 * math.cos(p.tau0 - p.tau1)
    cos_beta = math.sqrt(max(cos_sq, 0.0))

    gamma = principal_arg(first)
    beta = math.atan2(sin_beta, cos_beta)
    xi = canonical_angle(principal_arg(second) + gamma)
    return PhaseTriple(gamma=gamma, beta=beta, xi=xi)


def reconstruct_overlap(ph: PhaseTriple) -> CMatrix2:
    """Reassembles U0^dagger U1 from its phases."""
    return make_unitary(-ph.beta, ph.xi) @ make_z(2.0 * ph.gamma)


def ep_vector_symmetric(sign: Any) -> CVector2:
    """(+-i, 1)/sqrt(2), the EP state of a time-reversal invariant model."""
    sigma = sign_value(sign)
    return SQRT_HALF * np.array([sigma * 1j, 1.0], dtype=complex)


def ep_vector_special(tau: float, sign: Any) -> Tuple[CVector2, CVector2]:
    """Right (+-i e^{i tau}, 1) and left (+-i e^{-i tau}, 1) EP vectors when tau0 = tau1 = tau."""
    sigma = sign_value(sign)
    phase = cmath.exp(1j * tau)
    right = SQRT_HALF * np.array([sigma * 1j * phase, 1.0], dtype=complex)
    left = SQRT_HALF * np.array([sigma * 1j * phase.conjugate(), 1.0], dtype=complex)
    return right, left


def ep_vector_rotated(p: ModelParams, sign: Any, ph: Optional[PhaseTriple] = None) -> CVector2:
    """U(phi0, tau0) (+-i e^{i xi}, 1): the EP state of H~ carried back to the H basis."""
    ph = ph if ph is not None else phases(p)
    sigma = sign_value(sign)
    tilde = np.array([sigma * 1j * cmath.exp(1j * ph.xi), 1.0], dtype=complex)
    return make_unitary(p.phi0, p.tau0) @ tilde


def explicit_components(p: ModelParams, sign: Any, xi: float) -> Tuple[complex, float]:
    """Upper and (real) lower component of the EP vector in closed form."""
    sigma = sign_value(sign)
    c0, s0 = math.cos(p.phi0), math.sin(p.phi0)
    upper = sigma * 1j * cmath.exp(-1j * xi) * (
        cmath.exp(2j * xi) * c0 ** 2 + cmath.exp(2j * p.tau0) * s0 ** 2
    )
    lower = 1.0 + sigma * math.sin(2.0 * p.phi0) * math.sin(p.tau0 - xi)
    return upper, lower


def ep_vector_general(p: ModelParams, sign: Any) -> Tuple[CVector2, bool]:
    """Unit EP vector with a real, non-negative lower component.

    Returns (vector, lower_vanishes). When the lower component vanishes the
    vector is instead scaled so its largest component equals 1.
    """
    ph = phases(p)
    rotated = ep_vector_rotated(p, sign, ph)
    upper, lower = explicit_components(p, sign, ph.xi)

    if abs(lower) < EPS_TOL:
        logger.warning("Lower EP vector component vanishes for branch %s", sign_label(sign))
        k = int(np.argmax(np.abs(rotated)))
        return rotated / rotated[k], True

    explicit = np.array([upper, lower], dtype=complex)
    defect = collinearity_defect(explicit, rotated)
    if defect > CONSTRUCTION_TOL:
        logger.warning("EP vector constructions disagree: collinearity defect %.3e", defect)
    return unit(explicit), False


def _vector_residual(h: CMatrix2, e_c: complex, v: CVector2) -> float:
    scale = max(frobenius(h), 1.0) * frobenius(v)
    return frobenius(h @ v - e_c * v) / scale


def attach_vectors(p: ModelParams, solutions: Iterable["EPSolution"]) -> List["EPSolution"]:
    """Fills in each solution's vector, choosing the sign with the smallest residual."""
    candidates = {sign: ep_vector_general(p, sign) for sign in ("+", "-")}
    attached = []
    for solution in solutions:
        h = build_hamiltonian(p, solution.lambda_c)
        scored = sorted(
            (_vector_residual(h, solution.e_c, vec), sign)
            for sign, (vec, _) in candidates.items()
        )
        residual, sign = scored[0]
        vec, lower_vanishes = candidates[sign]
        logger.debug("Branch %s paired with vector sign %s (residual %.3e)",
                     solution.branch, sign, residual)
        attached.append(replace(
            solution,
            vec=vec,
            vector_sign=sign,
            vector_residual=residual,
            lower_vanishes=lower_vanishes,
        ))
    return attached


def ep_left_vector(p: ModelParams, solution: "EPSolution") -> CVector2:
    """Unit left (row) eigenvector at the EP, from the kernel of H(lambda_c) - e_c."""
    n = build_hamiltonian(p, solution.lambda_c) - solution.e_c * np.eye(2)
    return unit(left_kernel(n))


def group_eigenrelation_check(phi: float, tau: float, sign: Any) -> float:
    """||U(phi, tau) v - e^{+-i phi} v|| for the tau0 = tau1 EP vector v."""
    right, _ = ep_vector_special(tau, sign)
    factor = cmath.exp(1j * sign_value(sign) * phi)
    return frobenius(make_unitary(phi, tau) @ right - factor * right)


def stokes_parameters(v: CVector2) -> Tuple[float, float, float, float]:
    """S0..S3 of v read as the Jones vector (a, b)."""
    a, b = complex(v[0]), complex(v[1])
    cross = a * b.conjugate()
    return (
        abs(a) ** 2 + abs(b) ** 2,
        abs(a) ** 2 - abs(b) ** 2,
        2.0 * cross.real,
        2.0 * cross.imag,
    )


def polarization(v: CVector2) -> PolarizationDescriptor:
    s0, s1, s2, s3 = stokes_parameters(v)
    if s0 == 0.0:
        raise InvalidArgumentError("polarization of the zero vector is undefined")
    ellipticity = min(max(s3 / s0, -1.0), 1.0)
    axial_ratio = min(abs(math.tan(0.5 * math.asin(ellipticity))), 1.0)
    orientation = 0.5 * math.atan2(s2, s1)

    if axial_ratio < POL_TOL:
        return PolarizationDescriptor(PolarizationKind.LINEAR, Handedness.NONE, axial_ratio, orientation)
    kind = PolarizationKind.CIRCULAR if axial_ratio > 1.0 - POL_TOL else PolarizationKind.ELLIPTIC
    handedness = Handedness.PLUS if s3 > 0.0 else Handedness.MINUS
    return PolarizationDescriptor(kind, handedness, axial_ratio, orientation)


def vector_report(v: CVector2) -> Dict[str, Any]:
    """JSON-ready view of a vector with its Stokes parameters."""
    s0, s1, s2, s3 = stokes_parameters(v)
    return {
        "components": vector_to_json(v),
        "stokes": [s0, s1, s2, s3],
    }
