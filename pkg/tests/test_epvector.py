"""Tests for phases, EP vectors and polarization."""

import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from eplocate import ep_general, ep_numerical
from epvector import (
    Handedness,
    PolarizationKind,
    attach_vectors,
    ep_left_vector,
    ep_vector_general,
    ep_vector_rotated,
    ep_vector_special,
    ep_vector_symmetric,
    explicit_components,
    group_eigenrelation_check,
    phases,
    polarization,
    reconstruct_overlap,
    stokes_parameters,
)
from errors import InvalidArgumentError
from matkit import ModelParams, build_hamiltonian, overlap, random_params
from spectral import self_orthogonality
from utils import collinearity_defect, frobenius

angles = st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False)


def _min_defect(v, candidates):
    return min(collinearity_defect(v, c) for c in candidates)


def test_phases_of_worked_model(worked_model):
    ph = phases(worked_model)
    assert ph.gamma == pytest.approx(0.0, abs=1e-15)
    assert ph.beta == pytest.approx(math.pi / 4)
    assert ph.cos_beta == pytest.approx(math.sqrt(0.5))
    assert ph.xi == pytest.approx(-math.pi)


def test_phases_with_complex_overlap():
    p = ModelParams(1.0, -1.0, 1.0, -1.0, phi0=math.pi / 4, tau0=0.0, phi1=math.pi / 4, tau1=math.pi / 2)
    ph = phases(p)
    assert ph.cos_beta == pytest.approx(math.sqrt(0.5))
    assert 0.0 <= ph.beta <= math.pi / 2
    assert -math.pi <= ph.xi < math.pi


def test_overlap_is_reassembled_from_its_phases(random_models):
    for p in random_models:
        assert np.allclose(reconstruct_overlap(phases(p)), overlap(p), rtol=0, atol=1e-12)


def test_symmetric_vector():
    assert np.allclose(ep_vector_symmetric("+"), np.array([1j, 1]) / math.sqrt(2))
    assert np.allclose(ep_vector_symmetric(-1), np.array([-1j, 1]) / math.sqrt(2))
    with pytest.raises(InvalidArgumentError):
        ep_vector_symmetric(0)


def test_special_vector_at_quarter_turn():
    right, left = ep_vector_special(math.pi / 2, "+")
    assert collinearity_defect(right, np.array([-1.0, 1.0])) < 1e-15
    assert abs(self_orthogonality(left, right)) < 1e-15


@pytest.mark.parametrize("sign", ["+", "-"])
def test_group_eigenrelation_on_a_grid(sign):
    grid = np.linspace(-math.pi, math.pi, 32, endpoint=False)
    for phi in grid:
        for tau in grid:
            assert group_eigenrelation_check(phi, tau, sign) < 1e-14


@seed(20240601)
@settings(max_examples=200, deadline=None)
@given(angles)
def test_special_vectors_are_self_orthogonal(tau):
    for sign in ("+", "-"):
        right, left = ep_vector_special(tau, sign)
        assert abs(self_orthogonality(left, right)) < 1e-15
        assert frobenius(right) == pytest.approx(1.0)


def test_vectors_solve_the_eigenproblem_at_the_ep(random_models):
    for p in random_models:
        for solution in attach_vectors(p, ep_numerical(p)):
            h = build_hamiltonian(p, solution.lambda_c)
            residual = frobenius(h @ solution.vec - solution.e_c * solution.vec)
            assert residual < 1e-8 * max(1.0, frobenius(h)) * frobenius(solution.vec)
            assert solution.vector_residual < 1e-8


def test_each_ep_gets_its_own_sign(random_models):
    for p in random_models[:100]:
        signs = {solution.vector_sign for solution in attach_vectors(p, ep_general(p))}
        assert signs == {"+", "-"}


def test_explicit_and_rotated_constructions_are_collinear(random_models):
    for p in random_models:
        ph = phases(p)
        for sign in ("+", "-"):
            upper, lower = explicit_components(p, sign, ph.xi)
            if abs(lower) < 1e-6:
                continue
            rotated = ep_vector_rotated(p, sign, ph)
            assert collinearity_defect(np.array([upper, lower]), rotated) < 1e-12
            assert lower == pytest.approx(abs(rotated[1]) ** 2, abs=1e-12)


def test_general_vector_is_unit_with_real_lower_component(random_models):
    for p in random_models[:100]:
        for sign in ("+", "-"):
            v, lower_vanishes = ep_vector_general(p, sign)
            if lower_vanishes:
                continue
            assert frobenius(v) == pytest.approx(1.0)
            assert v[1].imag == 0.0 and v[1].real >= 0.0


def test_left_vector_is_self_orthogonal(random_models):
    for p in random_models:
        for solution in attach_vectors(p, ep_numerical(p)):
            left = ep_left_vector(p, solution)
            assert abs(self_orthogonality(left, solution.vec)) < 1e-10


def test_diagonal_h0_reduces_to_the_special_vector(special_models):
    for p in special_models[:100]:
        candidates = [ep_vector_special(p.tau1, sign)[0] for sign in ("+", "-")]
        for sign in ("+", "-"):
            v, _ = ep_vector_general(p, sign)
            assert _min_defect(v, candidates) < 1e-12


def test_equal_taus_reduce_to_the_special_vector(rng):
    for _ in range(100):
        tau = rng.uniform(-math.pi, math.pi)
        p = random_params(rng, tau0=tau, tau1=tau)
        candidates = [ep_vector_special(tau, sign)[0] for sign in ("+", "-")]
        for sign in ("+", "-"):
            v, _ = ep_vector_general(p, sign)
            assert _min_defect(v, candidates) < 1e-12


def test_real_models_reduce_to_the_symmetric_vector(rng):
    candidates = [ep_vector_symmetric(sign) for sign in ("+", "-")]
    for phi0 in np.linspace(-math.pi, math.pi, 16, endpoint=False):
        p = random_params(rng, phi0=phi0, tau0=0.0, tau1=0.0)
        for sign in ("+", "-"):
            v, _ = ep_vector_general(p, sign)
            assert _min_defect(v, candidates) < 1e-12


def test_vanishing_lower_component():
    p = ModelParams(1.0, -1.0, 1.0, -1.0, phi0=math.pi / 4, tau0=0.0, phi1=-math.pi / 4, tau1=math.pi / 2)
    assert phases(p).xi == pytest.approx(math.pi / 2)
    v, lower_vanishes = ep_vector_general(p, "+")
    assert lower_vanishes
    assert np.allclose(v, [1.0, 0.0], atol=1e-12)
    _, other = ep_vector_general(p, "-")
    assert not other

    solutions = attach_vectors(p, ep_general(p))
    flagged = [s for s in solutions if s.lower_vanishes]
    assert len(flagged) == 1
    assert flagged[0].vector_residual < 1e-8


def test_stokes_parameters():
    assert stokes_parameters(np.array([1.0, 0.0])) == (1.0, 1.0, 0.0, 0.0)
    s0, s1, s2, s3 = stokes_parameters(np.array([1j, 1.0]) / math.sqrt(2))
    assert (s0, s1, s2, s3) == pytest.approx((1.0, 0.0, 0.0, 1.0))


@pytest.mark.parametrize("vector, kind, handedness, ratio", [
    ([1j, 1], PolarizationKind.CIRCULAR, Handedness.PLUS, 1.0),
    ([-1j, 1], PolarizationKind.CIRCULAR, Handedness.MINUS, 1.0),
    ([1, 0], PolarizationKind.LINEAR, Handedness.NONE, 0.0),
    ([1, 1], PolarizationKind.LINEAR, Handedness.NONE, 0.0),
    ([1, 0.5j], PolarizationKind.ELLIPTIC, Handedness.MINUS, 0.5),
    ([1, -0.5j], PolarizationKind.ELLIPTIC, Handedness.PLUS, 0.5),
])
def test_polarization_examples(vector, kind, handedness, ratio):
    descriptor = polarization(np.array(vector, dtype=complex))
    assert descriptor.kind is kind
    assert descriptor.handedness is handedness
    assert descriptor.axial_ratio == pytest.approx(ratio, abs=1e-12)


def test_polarization_orientation():
    assert polarization(np.array([1, 1], dtype=complex)).orientation == pytest.approx(math.pi / 4)
    assert polarization(np.array([1, 0], dtype=complex)).orientation == pytest.approx(0.0)


def test_axial_ratio_matches_the_traced_ellipse():
    v = np.array([1.0, 0.5j])
    t = np.linspace(0.0, 2.0 * math.pi, 20001)
    points = np.real(v[:, None] * np.exp(-1j * t)[None, :])
    radii = np.hypot(points[0], points[1])
    assert radii.min() / radii.max() == pytest.approx(polarization(v).axial_ratio, abs=1e-6)


def test_zero_vector_has_no_polarization():
    with pytest.raises(InvalidArgumentError):
        polarization(np.zeros(2, dtype=complex))


def test_tied_tau_vector_is_circular_only_on_the_real_axis():
    for k, tau in enumerate(np.linspace(-math.pi, math.pi, 32, endpoint=False)):
        kind = polarization(ep_vector_special(tau, "+")[0]).kind
        assert (kind is PolarizationKind.CIRCULAR) == (k % 16 == 0)
        if k % 16 == 8:
            assert kind is PolarizationKind.LINEAR


def test_real_models_have_circular_ep_vectors(rng):
    for _ in range(50):
        p = random_params(rng, tau0=0.0, tau1=0.0)
        for solution in attach_vectors(p, ep_general(p)):
            assert polarization(solution.vec).kind is PolarizationKind.CIRCULAR


def test_linear_ep_vector():
    p = ModelParams(1.0, -1.0, 1.0, -1.0, phi1=0.6, tau1=-math.pi / 2)
    for sign in ("+", "-"):
        v, _ = ep_vector_general(p, sign)
        s0, _, _, s3 = stokes_parameters(v)
        assert abs(s3) / s0 < 1e-9
        assert polarization(v).kind is PolarizationKind.LINEAR


def test_generic_ep_vector_is_elliptic():
    p = ModelParams(1.3, -0.4, 0.9, -1.1, phi0=0.3, tau0=0.7, phi1=1.1, tau1=-0.4)
    for sign in ("+", "-"):
        v, _ = ep_vector_general(p, sign)
        assert polarization(v).kind is PolarizationKind.ELLIPTIC
