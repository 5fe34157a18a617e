"""
EP location module for the two-level model.

This module finds both exceptional points lambda_c+- three independent ways:
the closed form for a diagonal H0, the closed form in terms of the phase beta
of U0^dagger U1, and the roots of the discriminant polynomial D(lambda). It
also cross-validates the routes against each other.
"""

import cmath
import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config import DISC_TOL, EPS_TOL, NILP_TOL, ROUTE_TOL
from errors import DegenerateModelError, PreconditionError
from epvector import phases
from matkit import CVector2, ModelParams, build_h0, build_h1, build_hamiltonian
from spectral import discriminant, quadratic_roots
from utils import ensure_finite, frobenius, vector_to_json

logger = logging.getLogger(__name__)

# lambda_c+ and lambda_c- closer than COLLISION_FACTOR * sqrt(DISC_TOL) * max(1, |lambda_c|)
# count as one EP; a double root is only resolved to the square root of the rounding level
COLLISION_FACTOR = 10.0


class Route(str, Enum):
    SPECIAL = "special"
    GENERAL = "general_appendix"
    NUMERICAL = "numerical"


@dataclass(frozen=True, eq=False)
class EPSolution:
    """One EP branch. Vector fields are filled by epvector.attach_vectors."""

    branch: str
    lambda_c: complex
    e_c: complex
    route: Route
    vec: Optional[CVector2] = None
    gamma: Optional[float] = None
    beta: Optional[float] = None
    xi: Optional[float] = None
    vector_sign: Optional[str] = None
    vector_residual: Optional[float] = None
    lower_vanishes: bool = False

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "branch": self.branch,
            "route": self.route.value,
            "lambda_c": self.lambda_c,
            "e_c": self.e_c,
        }
        if self.gamma is not None:
            data.update(gamma=self.gamma, beta=self.beta, xi=self.xi)
        if self.vec is not None:
            data.update(
                vector=vector_to_json(self.vec),
                vector_sign=self.vector_sign,
                vector_residual=self.vector_residual,
                lower_vanishes=self.lower_vanishes,
            )
        return data


@dataclass
class RouteMatch:
    first: Route
    second: Route
    pairing: Dict[str, str]
    max_delta: float


@dataclass
class CrossValidation:
    """Outcome of running every applicable route on one model."""

    solutions: Dict[Route, Tuple[EPSolution, EPSolution]]
    matches: List[RouteMatch] = field(default_factory=list)
    max_delta: float = 0.0
    max_nilpotency: float = 0.0
    max_discriminant: float = 0.0
    collision: bool = False
    diagnostic: Optional[str] = None

    @property
    def ok(self) -> bool:
        deltas_ok = self.collision or self.max_delta < ROUTE_TOL
        return deltas_ok and self.max_nilpotency < NILP_TOL and self.max_discriminant < DISC_TOL

    def to_dict(self) -> Dict[str, Any]:
        return {
            "routes": {
                route.value: [solution.to_dict() for solution in pair]
                for route, pair in self.solutions.items()
            },
            "agreement": [
                {
                    "routes": [match.first.value, match.second.value],
                    "pairing": match.pairing,
                    "max_delta": match.max_delta,
                }
                for match in self.matches
            ],
            "max_delta": self.max_delta,
            "max_nilpotency": self.max_nilpotency,
            "max_discriminant": self.max_discriminant,
            "collision": self.collision,
            "diagnostic": self.diagnostic,
            "ok": self.ok,
        }


def coalesced_energy(p: ModelParams, lam: complex) -> complex:
    """(eps1 + eps2 + lambda (omega1 + omega2)) / 2, half the trace of H(lambda)."""
    return 0.5 * (p.eps1 + p.eps2 + complex(lam) * (p.omega1 + p.omega2))


def _pair_from_factor(p: ModelParams, angle: float, route: Route, **extra: float) -> Tuple[EPSolution, EPSolution]:
    """lambda_c+- = -(d_eps / d_omega) e^{+-2i angle}."""
    ratio = -p.eps_split / p.omega_split
    solutions = []
    for branch, sigma in (("+", 1.0), ("-", -1.0)):
        lam = ratio * cmath.exp(2j * sigma * angle)
        solutions.append(EPSolution(branch, lam, coalesced_energy(p, lam), route, **extra))
    return solutions[0], solutions[1]


def ep_special(p: ModelParams) -> Tuple[EPSolution, EPSolution]:
    """Closed-form EPs when H0 is diagonal (phi0 = 0)."""
    if abs(math.sin(p.phi0)) > EPS_TOL:
        raise PreconditionError(f"diagonal H0 required (phi0 = 0), got phi0 = {p.phi0}")
    if abs(math.sin(2.0 * p.phi1)) < EPS_TOL:
        raise DegenerateModelError(f"phi1 = {p.phi1} leaves H0 and H1 commuting; no EP exists")
    return _pair_from_factor(p, p.phi1, Route.SPECIAL)


def ep_general(p: ModelParams) -> Tuple[EPSolution, EPSolution]:
    """Closed-form EPs for arbitrary angles, through the phase beta of U0^dagger U1."""
    ph = phases(p)
    if ph.cos_beta >= 1.0 - EPS_TOL or math.sin(ph.beta) < EPS_TOL:
        raise DegenerateModelError(f"beta = {ph.beta} makes U0^dagger U1 diagonal; no EP exists")
    return _pair_from_factor(p, ph.beta, Route.GENERAL, gamma=ph.gamma, beta=ph.beta, xi=ph.xi)


def discriminant_coefficients(p: ModelParams) -> Tuple[complex, complex, complex, float]:
    """Coefficients (a, b, c) of D(s mu) = a mu^2 + b mu + c, and the scale s.

    D does not change when multiples of the identity are added to H0 or H1,
    so both are made traceless first.
    """
    h0, h1 = build_h0(p), build_h1(p)
    h0 = h0 - 0.5 * np.trace(h0) * np.eye(2)
    h1 = h1 - 0.5 * np.trace(h1) * np.eye(2)
    s = p.ep_modulus
    d_zero = discriminant(h0)
    d_plus = discriminant(h0 + s * h1)
    d_minus = discriminant(h0 - s * h1)
    a = 0.5 * (d_plus + d_minus) - d_zero
    b = 0.5 * (d_plus - d_minus)
    return a, b, d_zero, s


def ep_numerical(p: ModelParams) -> Tuple[EPSolution, EPSolution]:
    """EPs as the roots of the discriminant polynomial, found without any closed form."""
    a, b, c, s = discriminant_coefficients(p)
    if abs(a) < EPS_TOL * max(abs(b), abs(c), EPS_TOL):
        raise DegenerateModelError(f"discriminant is not quadratic in lambda (leading coefficient {abs(a):.3e})")
    roots = [s * mu for mu in quadratic_roots(a, b, c)]

    def label_key(lam: complex) -> Tuple[float, float]:
        # e^{2i beta} = -lambda d_omega / d_eps has positive imaginary part on the + branch
        w = -lam * p.omega_split / p.eps_split
        return (w.imag, lam.imag)

    minus_lam, plus_lam = sorted(roots, key=label_key)
    solutions = []
    for branch, lam in (("+", plus_lam), ("-", minus_lam)):
        e_c = 0.5 * complex(np.trace(build_hamiltonian(p, lam)))
        solutions.append(EPSolution(branch, lam, e_c, Route.NUMERICAL))
    return solutions[0], solutions[1]


def nilpotency_residual(p: ModelParams, lambda_c: complex, e_c: complex) -> float:
    """||(H(lambda_c) - e_c)^2||_F / max(1, ||H(lambda_c)||_F^2); zero at a Jordan block."""
    ensure_finite(lambda_c, e_c, what="EP")
    h = build_hamiltonian(p, lambda_c)
    n = h - complex(e_c) * np.eye(2)
    return frobenius(n @ n) / max(1.0, frobenius(h) ** 2)


def discriminant_residual(p: ModelParams, lambda_c: complex) -> float:
    """|D(H(lambda_c))| / max(1, ||H(lambda_c)||_F^2)."""
    h = build_hamiltonian(p, lambda_c)
    return abs(discriminant(h)) / max(1.0, frobenius(h) ** 2)


def _match(first: Tuple[EPSolution, EPSolution],
           second: Tuple[EPSolution, EPSolution]) -> Tuple[Dict[str, str], float]:
    """Pairs the branches of two routes by proximity; returns the pairing and max relative delta."""
    best = None
    for order in ((0, 1), (1, 0)):
        deltas = [
            abs(first[i].lambda_c - second[j].lambda_c) / max(abs(second[j].lambda_c), EPS_TOL)
            for i, j in zip((0, 1), order)
        ]
        total = sum(deltas)
        if best is None or total < best[0]:
            pairing = {first[i].branch: second[j].branch for i, j in zip((0, 1), order)}
            best = (total, pairing, max(deltas))
    return best[1], best[2]


def cross_validate(p: ModelParams) -> CrossValidation:
    """Runs every applicable route and compares them.

    A DegenerateModelError from any route propagates, so a degenerate model
    fails the same way whichever route notices first.
    """
    solutions: Dict[Route, Tuple[EPSolution, EPSolution]] = {}
    if abs(math.sin(p.phi0)) <= EPS_TOL:
        solutions[Route.SPECIAL] = ep_special(p)
    solutions[Route.GENERAL] = ep_general(p)
    solutions[Route.NUMERICAL] = ep_numerical(p)

    report = CrossValidation(solutions=solutions)
    reference = solutions[Route.NUMERICAL]
    separation = abs(reference[0].lambda_c - reference[1].lambda_c)
    if separation < COLLISION_FACTOR * math.sqrt(DISC_TOL) * max(1.0, abs(reference[0].lambda_c)):
        report.collision = True
        report.diagnostic = "EP collision"
        logger.warning("EP collision: |lambda_c+ - lambda_c-| = %.3e", separation)

    for first, second in itertools.combinations(solutions, 2):
        pairing, delta = _match(solutions[first], solutions[second])
        report.matches.append(RouteMatch(first, second, pairing, delta))
        if not report.collision:
            report.max_delta = max(report.max_delta, delta)

    for pair in solutions.values():
        for solution in pair:
            report.max_nilpotency = max(
                report.max_nilpotency, nilpotency_residual(p, solution.lambda_c, solution.e_c)
            )
            report.max_discriminant = max(
                report.max_discriminant, discriminant_residual(p, solution.lambda_c)
            )

    if not report.ok:
        logger.error("Routes disagree: max delta %.3e, nilpotency %.3e, discriminant %.3e",
                     report.max_delta, report.max_nilpotency, report.max_discriminant)
    return report
