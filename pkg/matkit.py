"""
Matrix construction for the two-level model H = H0 + lambda * H1.

This module builds the two-angle unitaries U(phi, tau), the general unitary
with its two extra phases, the phase matrix z(tau), the Hermitian parts H0
and H1, and the full Hamiltonians H(lambda) and H~(lambda) in the eigenbasis
of H0. It also holds ModelParams, the eight real numbers defining a model.
"""

import cmath
import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Dict, Mapping

import numpy as np

from config import (
    ANGLE_KEYS,
    DEGREE_SUFFIX,
    EPS_TOL,
    PARAM_KEYS,
    RANDOM_ENERGY_RANGE,
    RANDOM_MARGIN,
)
from errors import (
    DegenerateModelError,
    InvalidArgumentError,
    ModelValidationError,
)
from utils import canonical_angle, ensure_finite, frobenius

logger = logging.getLogger(__name__)

# 2x2 complex matrix / 2-component complex vector carriers
CMatrix2 = np.ndarray
CVector2 = np.ndarray


@dataclass(frozen=True)
class ModelParams:
    """Energies eps1, eps2, couplings omega1, omega2 and the angles of U0, U1.

    Angles are canonicalized to [-pi, pi) on construction. Construction fails
    with ModelValidationError when eps or omega is a multiple of the unit
    matrix, and with DegenerateModelError when H0 and H1 commute.
    """

    eps1: float
    eps2: float
    omega1: float
    omega2: float
    phi0: float = 0.0
    tau0: float = 0.0
    phi1: float = 0.0
    tau1: float = 0.0

    def __post_init__(self):
        for key in PARAM_KEYS:
            value = getattr(self, key)
            try:
                value = float(value)
            except (TypeError, ValueError) as e:
                raise ModelValidationError(f"{key} must be a real number, got {value!r}") from e
            if not math.isfinite(value):
                raise ModelValidationError(f"{key} must be finite, got {value!r}")
            if key in ANGLE_KEYS:
                value = canonical_angle(value)
            object.__setattr__(self, key, value)

        _check_split(self.eps1, self.eps2, "eps1", "eps2")
        _check_split(self.omega1, self.omega2, "omega1", "omega2")

        comm = frobenius(commutator(build_h0(self), build_h1(self)))
        if comm <= EPS_TOL * self.scale ** 2:
            raise DegenerateModelError(
                f"H0 and H1 commute (||[H0,H1]||_F = {comm:.3e}); the operators "
                "H0 and H1 must not commute for exceptional points to exist"
            )

    @property
    def scale(self) -> float:
        """Largest energy-like input magnitude, at least 1."""
        return max(abs(self.eps1), abs(self.eps2), abs(self.omega1), abs(self.omega2), 1.0)

    @property
    def eps_split(self) -> float:
        return self.eps1 - self.eps2

    @property
    def omega_split(self) -> float:
        return self.omega1 - self.omega2

    @property
    def ep_modulus(self) -> float:
        """|eps1 - eps2| / |omega1 - omega2|, the common modulus of both EPs."""
        return abs(self.eps_split) / abs(self.omega_split)

    def replace(self, **changes: float) -> "ModelParams":
        """Copy with some fields changed; the copy is validated again."""
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, float]:
        return {key: getattr(self, key) for key in PARAM_KEYS}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ModelParams":
        """Builds params from a flat mapping; angles may use a '_deg' suffix."""
        return cls(**parse_model_mapping(data))


def parse_model_mapping(data: Mapping[str, Any]) -> Dict[str, float]:
    """Normalizes a model mapping to the eight PARAM_KEYS, angles in radians.

    Missing angles default to 0. Unlike ModelParams itself this does not run
    the model gates, so sweeps can start from a degenerate base point.
    """
    if not isinstance(data, Mapping):
        raise InvalidArgumentError(f"model must be a JSON object, got {type(data).__name__}")
    known = set(PARAM_KEYS) | {key + DEGREE_SUFFIX for key in ANGLE_KEYS}
    unknown = sorted(set(data) - known)
    if unknown:
        raise InvalidArgumentError(f"unknown model keys: {', '.join(unknown)}")

    values: Dict[str, float] = {}
    for key in PARAM_KEYS:
        deg_key = key + DEGREE_SUFFIX
        if key in data and deg_key in data:
            raise InvalidArgumentError(f"give either {key} or {deg_key}, not both")
        if key in data:
            values[key] = _as_number(data[key], key)
        elif key in ANGLE_KEYS and deg_key in data:
            values[key] = math.radians(_as_number(data[deg_key], deg_key))
        elif key in ANGLE_KEYS:
            values[key] = 0.0
        else:
            raise InvalidArgumentError(f"model is missing required key {key}")
    return values


def _as_number(value: Any, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidArgumentError(f"{key} must be a number, got {value!r}")
    return float(value)


def _check_split(a: float, b: float, name_a: str, name_b: str) -> None:
    if abs(a - b) <= EPS_TOL * max(abs(a), abs(b), 1.0):
        raise ModelValidationError(
            f"{name_a} and {name_b} must differ ({name_a}={a}, {name_b}={b}); "
            "a multiple of the unit matrix is not allowed"
        )


def _diag(a: complex, b: complex) -> CMatrix2:
    return np.array([[a, 0.0], [0.0, b]], dtype=complex)


def _similarity(u: CMatrix2, d: CMatrix2) -> CMatrix2:
    """u d u^dagger, symmetrized so a Hermitian d gives an exactly Hermitian result."""
    m = u @ d @ u.conj().T
    return 0.5 * (m + m.conj().T)


def make_unitary(phi: float, tau: float) -> CMatrix2:
    """U(phi, tau) = [[cos phi, -sin phi e^{i tau}], [sin phi e^{-i tau}, cos phi]]."""
    ensure_finite(phi, tau, what="unitary angles")
    c, s = math.cos(phi), math.sin(phi)
    e = cmath.exp(1j * tau)
    return np.array([[c, -s * e], [s * e.conjugate(), c]], dtype=complex)


def make_general_unitary(phi: float, tau: float, gamma1: float, gamma2: float) -> CMatrix2:
    """U(phi, tau) diag(e^{i gamma1}, e^{i gamma2}), the four-parameter unitary."""
    ensure_finite(gamma1, gamma2, what="unitary phases")
    return make_unitary(phi, tau) @ _diag(cmath.exp(1j * gamma1), cmath.exp(1j * gamma2))


def make_z(tau: float) -> CMatrix2:
    """Phase matrix z(tau) = diag(e^{i tau/2}, e^{-i tau/2})."""
    ensure_finite(tau, what="z angle")
    half = cmath.exp(0.5j * tau)
    return _diag(half, half.conjugate())


def commutator(a: CMatrix2, b: CMatrix2) -> CMatrix2:
    return a @ b - b @ a


def build_h0(p: ModelParams) -> CMatrix2:
    """H0 = U(phi0, tau0) diag(eps1, eps2) U(phi0, tau0)^dagger."""
    return _similarity(make_unitary(p.phi0, p.tau0), _diag(p.eps1, p.eps2))


def build_h1(p: ModelParams) -> CMatrix2:
    """H1 = U(phi1, tau1) diag(omega1, omega2) U(phi1, tau1)^dagger."""
    return _similarity(make_unitary(p.phi1, p.tau1), _diag(p.omega1, p.omega2))


def build_hamiltonian(p: ModelParams, lam: complex) -> CMatrix2:
    """H(lambda) = H0 + lambda H1."""
    ensure_finite(lam, what="lambda")
    return build_h0(p) + complex(lam) * build_h1(p)


def overlap(p: ModelParams) -> CMatrix2:
    """U0^dagger U1, the relative rotation between the eigenbases of H0 and H1."""
    return make_unitary(p.phi0, p.tau0).conj().T @ make_unitary(p.phi1, p.tau1)


def build_h_tilde(p: ModelParams, lam: complex) -> CMatrix2:
    """H in the eigenbasis of H0: eps + lambda U0^dagger U1 omega U1^dagger U0."""
    ensure_finite(lam, what="lambda")
    rotated = _similarity(overlap(p), _diag(p.omega1, p.omega2))
    return _diag(p.eps1, p.eps2) + complex(lam) * rotated


def trs_defect(p: ModelParams) -> float:
    """||H0 - conj(H0)||_F + ||H1 - conj(H1)||_F; zero iff both are real (T = K)."""
    h0, h1 = build_h0(p), build_h1(p)
    return frobenius(h0 - h0.conj()) + frobenius(h1 - h1.conj())


def random_params(rng: np.random.Generator, margin: float = RANDOM_MARGIN,
                  max_tries: int = 10000, **fixed: float) -> ModelParams:
    """Draws a well-posed random model.

    Energies and couplings are uniform in RANDOM_ENERGY_RANGE, angles uniform
    in [-pi, pi). Draws closer than `margin` to a degenerate configuration
    (equal energies, equal couplings, U0^dagger U1 diagonal or off-diagonal)
    are rejected. Keyword arguments pin individual parameters.
    """
    low, high = RANDOM_ENERGY_RANGE
    for _ in range(max_tries):
        draw = {
            "eps1": rng.uniform(low, high),
            "eps2": rng.uniform(low, high),
            "omega1": rng.uniform(low, high),
            "omega2": rng.uniform(low, high),
        }
        for key in ANGLE_KEYS:
            draw[key] = rng.uniform(-math.pi, math.pi)
        draw.update(fixed)
        if abs(draw["eps1"] - draw["eps2"]) < margin or abs(draw["omega1"] - draw["omega2"]) < margin:
            continue
        w = make_unitary(draw["phi0"], draw["tau0"]).conj().T @ make_unitary(draw["phi1"], draw["tau1"])
        if abs(w[0, 0]) < margin or abs(w[0, 1]) < margin:
            continue
        try:
            return ModelParams(**draw)
        except ModelValidationError:
            continue
    raise InvalidArgumentError(f"no admissible model found in {max_tries} draws")

