"""
Monodromy module for eigenvalue branches around exceptional points.

This module walks lambda around a circle in the complex plane, tracks the two
eigenvalue branches continuously (nearest-neighbour assignment with step
halving), and reports whether the loop swaps the branches or leaves them in
place. A single EP is a square-root branch point, so a loop around exactly one
EP swaps the branches and a second loop restores them.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import DEFAULT_STEPS, GAP_TOL, MAX_REFINEMENTS, MIN_STEPS, RESTORE_TOL
from eplocate import ep_numerical
from errors import InvalidArgumentError, PathDegeneracyError, TrackingFailureError
from matkit import CVector2, ModelParams, build_h0, build_h1, build_hamiltonian
from spectral import characteristic_roots, eigenvalue_pair
from utils import ensure_finite, frobenius, sign_label

logger = logging.getLogger(__name__)

Branches = Tuple[complex, complex]

# the closing point must reproduce one of the starting assignments this closely
CLOSURE_TOL = 1e-10


class Permutation(str, Enum):
    IDENTITY = "identity"
    SWAP = "swap"


@dataclass(eq=False)
class LoopTrace:
    """Closed lambda path with both eigenvalue branches tracked along it."""

    center: complex
    radius: float
    steps: int
    turns: int
    clockwise: bool
    lambdas: List[complex] = field(default_factory=list)
    branch1: List[complex] = field(default_factory=list)
    branch2: List[complex] = field(default_factory=list)
    vectors1: List[CVector2] = field(default_factory=list)
    vectors2: List[CVector2] = field(default_factory=list)
    permutation: Permutation = Permutation.IDENTITY
    min_gap: float = math.inf
    refinements: int = 0

    def rows(self) -> List[Tuple[Any, ...]]:
        """One CSV row per path point: step, lambda, E1, E2 split into re/im."""
        return [
            (k, lam.real, lam.imag, e1.real, e1.imag, e2.real, e2.imag)
            for k, (lam, e1, e2) in enumerate(zip(self.lambdas, self.branch1, self.branch2))
        ]

    def summary(self) -> Dict[str, Any]:
        return {
            "center": self.center,
            "radius": self.radius,
            "steps": self.steps,
            "turns": self.turns,
            "clockwise": self.clockwise,
            "permutation": self.permutation.value,
            "min_gap": self.min_gap,
            "refinements": self.refinements,
            "start": [self.branch1[0], self.branch2[0]],
            "end": [self.branch1[-1], self.branch2[-1]],
        }


@dataclass
class DoubleLoopReport:
    trace: LoopTrace
    first_turn: Permutation
    restored: bool
    max_deviation: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "first_turn": self.first_turn.value,
            "restored": self.restored,
            "max_deviation": self.max_deviation,
        }


def permutation_between(start: Branches, end: Branches) -> Permutation:
    same = abs(end[0] - start[0]) + abs(end[1] - start[1])
    crossed = abs(end[0] - start[1]) + abs(end[1] - start[0])
    return Permutation.IDENTITY if same <= crossed else Permutation.SWAP


class _Tracker:
    """Carries the branch assignment from one path point to the next.

    H0 and H1 are held as four plain complex entries each, so a step costs a
    handful of scalar operations.
    """

    def __init__(self, p: ModelParams, center: complex, radius: float):
        h0, h1 = build_h0(p), build_h1(p)
        self.h0 = tuple(complex(x) for x in h0.ravel())
        self.h1 = tuple(complex(x) for x in h1.ravel())
        self.center = center
        self.radius = radius
        energy_scale = max(1.0, frobenius(h0) + (abs(center) + radius) * frobenius(h1))
        self.gap_floor = GAP_TOL * energy_scale
        self.min_gap = math.inf
        self.refinements = 0

    def point(self, theta: float) -> complex:
        return self.center + self.radius * cmath.exp(1j * theta)

    def eigenvalues(self, lam: complex) -> Branches:
        a0, b0, c0, d0 = self.h0
        a1, b1, c1, d1 = self.h1
        t1, t2, _ = characteristic_roots(a0 + lam * a1, b0 + lam * b1, c0 + lam * c1, d0 + lam * d1)
        return t1, t2

    def advance(self, theta_a: float, theta_b: float, branches: Branches,
                depth: int = 0, lam_b: Optional[complex] = None) -> Branches:
        lam_b = self.point(theta_b) if lam_b is None else lam_b
        x, y = self.eigenvalues(lam_b)
        gap = abs(x - y)
        self.min_gap = min(self.min_gap, gap)
        if gap <= self.gap_floor:
            raise PathDegeneracyError(
                f"eigenvalue gap {gap:.3e} at lambda = {lam_b:.6g} is below {self.gap_floor:.3e}"
            )

        # compare the pairs relative to their means; the common shift carries no branch information
        old_mean = 0.5 * (branches[0] + branches[1])
        new_mean = 0.5 * (x + y)
        b1, b2 = branches[0] - old_mean, branches[1] - old_mean
        c1, c2 = x - new_mean, y - new_mean
        kept = abs(c1 - b1) + abs(c2 - b2)
        crossed = abs(c2 - b1) + abs(c1 - b2)
        motion = min(kept, crossed)
        margin = abs(kept - crossed)

        if margin >= 2.0 * motion:
            return (x, y) if kept <= crossed else (y, x)
        if depth >= MAX_REFINEMENTS:
            raise TrackingFailureError(
                f"branch assignment still ambiguous after {MAX_REFINEMENTS} refinements "
                f"near lambda = {lam_b:.6g}"
            )
        self.refinements += 1
        middle = 0.5 * (theta_a + theta_b)
        branches = self.advance(theta_a, middle, branches, depth + 1)
        return self.advance(middle, theta_b, branches, depth + 1, lam_b)

    def branch_vectors(self, lambdas: Sequence[complex], energies: Sequence[complex]) -> List[CVector2]:
        """Unit right eigenvectors along one tracked branch, with continuous phases.

        Each vector is the larger column of adj(H(lambda) - E). The first one
        has its largest component real positive; every later one is rephased
        so its overlap with the previous vector is real positive.
        """
        lam = np.asarray(lambdas, dtype=complex)
        e = np.asarray(energies, dtype=complex)
        (a0, b0, c0, d0), (a1, b1, c1, d1) = self.h0, self.h1
        a, b = a0 + lam * a1 - e, b0 + lam * b1
        c, d = c0 + lam * c1, d0 + lam * d1 - e
        first = np.stack([d, -c], axis=1)
        second = np.stack([-b, a], axis=1)
        use_first = np.linalg.norm(first, axis=1) >= np.linalg.norm(second, axis=1)
        v = np.where(use_first[:, None], first, second)
        v = v / np.linalg.norm(v, axis=1)[:, None]

        k = int(np.argmax(np.abs(v[0])))
        start_phase = abs(v[0, k]) / v[0, k]
        overlaps = np.sum(np.conj(v[:-1]) * v[1:], axis=1)
        sizes = np.abs(overlaps)
        rotations = np.ones_like(overlaps)
        moving = sizes > 0.0
        rotations[moving] = np.conj(overlaps[moving]) / sizes[moving]
        factors = start_phase * np.concatenate(([1.0 + 0j], np.cumprod(rotations)))
        return list(v * factors[:, None])


def _check_clearance(p: ModelParams, center: complex, radius: float) -> None:
    for solution in ep_numerical(p):
        clearance = abs(abs(solution.lambda_c - center) - radius)
        if clearance <= GAP_TOL * max(1.0, abs(solution.lambda_c)):
            raise PathDegeneracyError(
                f"loop passes within {clearance:.3e} of the EP lambda_c{solution.branch} = "
                f"{solution.lambda_c:.6g}"
            )


def encircle(p: ModelParams, center: complex, radius: float, steps: int = DEFAULT_STEPS,
             clockwise: bool = False, turns: int = 1) -> LoopTrace:
    """Tracks both eigenvalue branches once (or `turns` times) around a circle."""
    ensure_finite(center, radius, what="loop geometry")
    center, radius = complex(center), float(radius)
    if radius <= 0.0:
        raise InvalidArgumentError(f"radius must be positive, got {radius}")
    if int(steps) != steps or steps < MIN_STEPS:
        raise InvalidArgumentError(f"steps must be an integer >= {MIN_STEPS}, got {steps}")
    if int(turns) != turns or turns < 1:
        raise InvalidArgumentError(f"turns must be a positive integer, got {turns}")
    steps, turns = int(steps), int(turns)
    _check_clearance(p, center, radius)

    tracker = _Tracker(p, center, radius)
    direction = -1.0 if clockwise else 1.0
    delta = direction * 2.0 * math.pi / steps
    start_lam = tracker.point(0.0)

    branches: Branches = eigenvalue_pair(build_hamiltonian(p, start_lam))
    tracker.min_gap = abs(branches[0] - branches[1])
    if tracker.min_gap <= tracker.gap_floor:
        raise PathDegeneracyError(f"eigenvalue gap {tracker.min_gap:.3e} at the start of the loop")

    trace = LoopTrace(center=center, radius=radius, steps=steps, turns=turns, clockwise=clockwise)
    trace.lambdas.append(start_lam)
    trace.branch1.append(branches[0])
    trace.branch2.append(branches[1])

    for k in range(1, steps * turns + 1):
        # every full turn lands exactly on the starting point
        lam = start_lam if k % steps == 0 else tracker.point(k * delta)
        branches = tracker.advance((k - 1) * delta, k * delta, branches, lam_b=lam)
        trace.lambdas.append(lam)
        trace.branch1.append(branches[0])
        trace.branch2.append(branches[1])
    trace.vectors1 = tracker.branch_vectors(trace.lambdas, trace.branch1)
    trace.vectors2 = tracker.branch_vectors(trace.lambdas, trace.branch2)

    start = (trace.branch1[0], trace.branch2[0])
    end = (trace.branch1[-1], trace.branch2[-1])
    trace.permutation = permutation_between(start, end)
    closure = min(
        abs(end[0] - start[0]) + abs(end[1] - start[1]),
        abs(end[0] - start[1]) + abs(end[1] - start[0]),
    )
    if closure > CLOSURE_TOL * max(1.0, abs(start[0]), abs(start[1])):
        raise TrackingFailureError(f"loop does not close: end branches off by {closure:.3e}")

    trace.min_gap = tracker.min_gap
    trace.refinements = tracker.refinements
    logger.info("Loop around %s (r=%.4g, %d steps x %d): %s, min gap %.3e, %d refinements",
                center, radius, steps, turns, trace.permutation.value,
                trace.min_gap, trace.refinements)
    return trace


def double_loop_check(p: ModelParams, which: Optional[str] = None, radius: Optional[float] = None,
                      steps: int = DEFAULT_STEPS, center: Optional[complex] = None,
                      clockwise: bool = False) -> DoubleLoopReport:
    """Runs the same loop twice in a row and checks that the branches come back.

    `which` centres the loop on lambda_c+ or lambda_c- (default radius a
    quarter of the EP separation). Without it the loop is centred on `center`,
    or on the origin when that is None too, with half the EP modulus as the
    default radius.
    """
    if which is not None:
        if center is not None:
            raise InvalidArgumentError("give either an EP label or a center for the double loop, not both")
        plus, minus = ep_numerical(p)
        target = plus if sign_label(which) == "+" else minus
        center = target.lambda_c
        radius = 0.25 * abs(plus.lambda_c - minus.lambda_c) if radius is None else radius
    else:
        center = 0j if center is None else center
        radius = 0.5 * p.ep_modulus if radius is None else radius

    trace = encircle(p, center, radius, steps, clockwise=clockwise, turns=2)
    start = (trace.branch1[0], trace.branch2[0])
    first_turn = permutation_between(start, (trace.branch1[steps], trace.branch2[steps]))
    scale = max(1.0, abs(start[0]), abs(start[1]))
    deviation = max(abs(trace.branch1[-1] - start[0]), abs(trace.branch2[-1] - start[1])) / scale
    restored = deviation <= RESTORE_TOL
    if not restored:
        logger.error("Branches not restored after two loops: deviation %.3e", deviation)
    return DoubleLoopReport(trace, first_turn, restored, deviation)
