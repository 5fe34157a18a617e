"""Tests for the closed-form 2x2 eigensolver."""

import math

import numpy as np
import pytest

from eplocate import ep_numerical
from errors import InvalidArgumentError, PreconditionError
from matkit import ModelParams, build_h_tilde, build_hamiltonian
from spectral import (
    discriminant,
    eigen2,
    eigenvalue_pair,
    eigenvalues_special,
    quadratic_roots,
    self_orthogonality,
)


def _same_pair(x, y, tol):
    direct = abs(x[0] - y[0]) + abs(x[1] - y[1])
    crossed = abs(x[0] - y[1]) + abs(x[1] - y[0])
    scale = max(1.0, abs(x[0]), abs(x[1]))
    return min(direct, crossed) <= tol * scale


def _unit(v):
    return v / np.linalg.norm(v)


def test_diagonal_matrix():
    s = eigen2(np.diag([2.0, 1.0]).astype(complex))
    assert (s.e1, s.e2) == (1.0, 2.0)
    assert np.allclose(s.r1, [0, 1]) and np.allclose(s.r2, [1, 0])
    assert s.biorthogonal_ok and s.condition == pytest.approx(1.0)


def test_symmetric_textbook_matrix():
    s = eigen2(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert s.e1 == pytest.approx(1.0) and s.e2 == pytest.approx(3.0)


def test_random_matrices(rng):
    for _ in range(500):
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        s = eigen2(m)
        scale = np.linalg.norm(m)
        tr, det = np.trace(m), np.linalg.det(m)
        for e in s.eigenvalues:
            assert abs(e * e - tr * e + det) < 1e-10 * scale ** 2
        assert s.biorthogonal_ok
        for e, r, l in ((s.e1, s.r1, s.l1), (s.e2, s.r2, s.l2)):
            assert np.linalg.norm(m @ r - e * r) < 1e-10 * scale
            assert np.linalg.norm(l @ m - e * l) < 1e-10 * scale * np.linalg.norm(l)
            assert self_orthogonality(l, r) == pytest.approx(1.0, abs=1e-12)
        assert abs(self_orthogonality(_unit(s.l1), s.r2)) < 1e-10
        assert abs(self_orthogonality(_unit(s.l2), s.r1)) < 1e-10
        assert _same_pair(eigenvalue_pair(m), s.eigenvalues, 1e-14)


def test_right_vectors_have_real_positive_largest_component(rng):
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    s = eigen2(m)
    for r in (s.r1, s.r2):
        k = int(np.argmax(np.abs(r)))
        assert r[k].imag == pytest.approx(0.0, abs=1e-15) and r[k].real > 0
        assert np.linalg.norm(r) == pytest.approx(1.0)


def test_jordan_block_is_not_biorthogonal():
    s = eigen2(np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert s.coalesced and not s.biorthogonal_ok
    assert s.condition == math.inf
    assert np.allclose(s.r1, [1, 0])
    assert abs(self_orthogonality(s.l1, s.r1)) < 1e-15


def test_scalar_matrix_keeps_two_eigenvectors():
    s = eigen2(3.0 * np.eye(2))
    assert s.coalesced and s.biorthogonal_ok
    assert s.eigenvalues == (3.0, 3.0)


def test_bad_input():
    with pytest.raises(InvalidArgumentError):
        eigen2(np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(InvalidArgumentError):
        eigen2(np.eye(3))


def test_special_eigenvalues_examples(worked_model):
    e1, e2, radical = eigenvalues_special(worked_model, 0.0)
    assert {e1, e2} == {1.0, -1.0}
    assert radical.value == pytest.approx(1.0)

    e1, e2, radical = eigenvalues_special(worked_model, 1.0)
    assert radical.value == pytest.approx(math.sqrt(2))
    assert e1 == pytest.approx(math.sqrt(2)) and e2 == pytest.approx(-math.sqrt(2))
    assert _same_pair((e1, e2), eigen2(build_hamiltonian(worked_model, 1.0)).eigenvalues, 1e-12)

    _, _, radical = eigenvalues_special(worked_model, -1j)
    assert abs(radical.value) < 1e-7
    assert radical.value ** 2 == pytest.approx(radical.squared, abs=1e-15)


def test_special_eigenvalues_match_eigen2(special_models, rng):
    for p in special_models:
        lam = complex(rng.normal(), rng.normal())
        e1, e2, _ = eigenvalues_special(p, lam)
        assert _same_pair((e1, e2), eigen2(build_hamiltonian(p, lam)).eigenvalues, 1e-10)


def test_special_eigenvalues_need_diagonal_h0():
    p = ModelParams(1.0, -1.0, 1.0, -1.0, phi0=0.3, phi1=0.9)
    with pytest.raises(PreconditionError):
        eigenvalues_special(p, 1.0)


def test_similarity_invariance(random_models, rng):
    for p in random_models[:200]:
        lam = complex(rng.normal(), rng.normal())
        assert _same_pair(
            eigen2(build_hamiltonian(p, lam)).eigenvalues,
            eigen2(build_h_tilde(p, lam)).eigenvalues,
            1e-10,
        )


def test_eigen2_flags_every_located_ep(random_models):
    for p in random_models:
        for solution in ep_numerical(p):
            s = eigen2(build_hamiltonian(p, solution.lambda_c))
            assert not s.biorthogonal_ok
            assert s.coalesced


@pytest.mark.parametrize("tau", [0.0, 0.4, -2.0])
def test_self_orthogonality_examples(tau):
    phase = np.exp(1j * tau)
    for sign in (1, -1):
        left = np.array([sign * 1j / phase, 1.0])
        right = np.array([sign * 1j * phase, 1.0])
        assert abs(self_orthogonality(left, right)) < 1e-15
    assert self_orthogonality(np.array([1, 0]), np.array([1, 0])) == 1


def test_discriminant_matches_trace_and_determinant(rng):
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    expected = np.trace(m) ** 2 - 4 * np.linalg.det(m)
    assert discriminant(m) == pytest.approx(expected, abs=1e-12)


def test_quadratic_roots():
    assert sorted(quadratic_roots(1, -3, 2), key=abs) == pytest.approx([1, 2])
    big, small = quadratic_roots(1, 1e8, 1)
    assert small == pytest.approx(-1e-8, rel=1e-12)
    assert big == pytest.approx(-1e8, rel=1e-12)
    r1, r2 = quadratic_roots(1, 0, 1)
    assert {round(r1.imag), round(r2.imag)} == {1, -1}
    with pytest.raises(InvalidArgumentError):
        quadratic_roots(0, 1, 1)
