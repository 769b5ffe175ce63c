import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magnon_entangle.entanglement import concurrence, concurrence_block, is_block_form, purity

from conftest import random_density_matrix, random_unitary

SINGLET = np.array([0, 1, -1, 0]) / math.sqrt(2)


def werner(p):
    return p * np.outer(SINGLET, SINGLET) + (1 - p) * np.eye(4) / 4


def wootters_bruteforce(rho):
    """Independent route: Hermitian R = sqrt(rho) rho~ sqrt(rho)."""
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
    w, v = np.linalg.eigh(rho)
    sq = v @ np.diag(np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    r = sq @ yy @ rho.conj() @ yy @ sq
    lam = np.sort(np.sqrt(np.clip(np.linalg.eigvalsh((r + r.conj().T) / 2), 0, None)))[::-1]
    return max(0.0, lam[0] - lam[1:].sum())


def random_block_state(rng):
    p = rng.dirichlet(np.ones(4))
    bound = math.sqrt(p[1] * p[2])
    c = bound * rng.uniform() * np.exp(2j * math.pi * rng.uniform())
    rho = np.diag(p).astype(complex)
    rho[1, 2], rho[2, 1] = c, np.conj(c)
    return rho


def test_singlet():
    res = concurrence(np.outer(SINGLET, SINGLET))
    assert res.value == pytest.approx(1.0, abs=1e-12)
    assert list(res.lambdas) == sorted(res.lambdas, reverse=True)


def test_maximally_mixed():
    assert concurrence(np.eye(4) / 4).value == 0.0


def test_werner():
    assert concurrence(werner(0.5)).value == pytest.approx(0.25, abs=1e-12)
    assert wootters_bruteforce(werner(0.5)) == pytest.approx(0.25, abs=1e-12)
    for p in np.linspace(0, 1, 21):
        assert concurrence(werner(p)).value == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-10)


def test_matches_bruteforce(rng):
    for _ in range(100):
        rho = random_density_matrix(rng)
        if rng.uniform() < 0.5:  # bias towards entangled states
            rho = 0.3 * rho + 0.7 * np.outer(SINGLET, SINGLET)
        assert concurrence(rho).value == pytest.approx(wootters_bruteforce(rho), abs=1e-9)


def test_rejects_invalid_state():
    with pytest.raises(ValueError):
        concurrence(np.diag([1.2, -0.2, 0, 0]))
    with pytest.raises(ValueError):
        concurrence(np.eye(3) / 3)


def test_block_examples():
    assert concurrence_block(np.diag([0.1, 0.2, 0.3, 0.4])) == 0.0
    rho = np.zeros((4, 4), dtype=complex)
    rho[1, 1] = rho[2, 2] = rho[1, 2] = rho[2, 1] = 0.5
    assert concurrence_block(rho) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        concurrence_block(np.ones((4, 4)) / 4)


def test_block_agrees_with_general(rng):
    for _ in range(100):
        rho = random_block_state(rng)
        assert is_block_form(rho)
        assert abs(concurrence_block(rho) - concurrence(rho).value) <= 1e-9


def test_local_unitary_invariance(rng):
    for _ in range(50):
        rho = random_density_matrix(rng)
        if rng.uniform() < 0.5:
            rho = 0.4 * rho + 0.6 * np.outer(SINGLET, SINGLET)
        u = np.kron(random_unitary(rng), random_unitary(rng))
        rotated = u @ rho @ u.conj().T
        assert abs(concurrence(rotated).value - concurrence(rho).value) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_product_states_and_range(seed):
    rng = np.random.default_rng(seed)
    a, b = random_density_matrix(rng, 2), random_density_matrix(rng, 2)
    assert concurrence(np.kron(a, b)).value <= 1e-10
    rho = random_density_matrix(rng)
    assert 0.0 <= concurrence(rho).value <= 1.0


def test_purity():
    assert purity(np.eye(4) / 4) == pytest.approx(0.25)
    assert purity(np.outer(SINGLET, SINGLET)) == pytest.approx(1.0)
    for a, b in itertools.combinations(range(4), 2):
        assert purity(np.diag(np.eye(4)[a] / 2 + np.eye(4)[b] / 2)) == pytest.approx(0.5)
