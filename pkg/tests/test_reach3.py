import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dlakit.closure import generators, named_basis
from dlakit.errors import InvarianceError, StructuralError
from dlakit.pauli import OperatorElement
from dlakit.reach3 import (
    A_BLOCK,
    B_BLOCK,
    ReachableParams,
    SymmetricState,
    block_factor,
    cyclic_shift,
    dicke_basis,
    family_curve,
    family_state,
    max_tangle,
    project_to_dicke,
    reachable_state,
    run_suite,
    split_invariance_residual,
    tangle_family,
    tangle_general,
    v_split,
)
from dlakit.structure import center, ideal

angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)


def test_dicke_basis():
    d = dicke_basis()
    assert abs(np.vdot(d.phi[2], d.phi[3])) == 0
    assert abs(np.linalg.norm(d.phi[2]) - 1) < 1e-15
    assert np.abs(d.gram() - np.eye(4)).max() < 1e-15
    p = cyclic_shift()
    for v in d.phi:
        assert np.abs(p @ v - v).max() == 0


def test_ideal_elements_have_block_form():
    for lam, k in ((1, A_BLOCK), (-1, B_BLOCK)):
        for el in ideal(lam, 3).basis:
            sigma, res = block_factor(project_to_dicke(el), k)
            assert res < 1e-12
            assert np.abs(sigma + sigma.conj().T).max() < 1e-12
            assert abs(np.trace(sigma)) < 1e-12


def test_ideal_sigmas_span_su2():
    for lam, k in ((1, A_BLOCK), (-1, B_BLOCK)):
        sig = [block_factor(project_to_dicke(el), k)[0] for el in ideal(lam, 3).basis]
        rows = np.array([np.concatenate([s.real.ravel(), s.imag.ravel()]) for s in sig])
        assert np.linalg.matrix_rank(rows, tol=1e-9) == 3


def test_center_forms():
    c = center(3)
    sx = np.array([[0, 1], [1, 0]])
    assert np.abs(project_to_dicke(c.c1) - (-3j) * np.kron(np.eye(2), sx)).max() < 1e-12
    assert np.abs(project_to_dicke(c.c2) - 3j * np.eye(4)).max() < 1e-12


def test_projection_leak_is_an_error():
    with pytest.raises(InvarianceError):
        project_to_dicke(OperatorElement.from_label("X11"))
    with pytest.raises(StructuralError):
        project_to_dicke(generators(4).X)


def test_split_subspaces_invariant():
    assert split_invariance_residual() < 1e-12


def test_initial_state_decomposition():
    e0 = np.array([1, 0])
    v = 0.5 * np.kron(e0, [1, 1]) + 0.5 * np.kron(e0, [1, -1])
    assert np.array_equal(v, [1, 0, 0, 0])
    assert np.array_equal(reachable_state(ReachableParams()).amplitudes, [1, 0, 0, 0])


def test_family_is_reachable():
    for t in np.linspace(-3, 3, 13):
        s = reachable_state(ReachableParams(theta=t, gamma=t))
        assert np.abs(s.amplitudes - [math.cos(t), 0, math.sin(t), 0]).max() < 1e-15


@given(st.tuples(angles, angles, angles, angles, angles, angles, angles))
def test_reachable_states_have_equal_split_weights(a):
    s = reachable_state(ReachableParams(*a))
    r1, r2 = v_split(s)
    assert abs(r1 - r2) < 1e-12 and abs(r1 - 0.5) < 1e-12
    assert tangle_general(s.embed()) <= 1 + 1e-9


def test_not_every_symmetric_state_is_reachable():
    ghz = SymmetricState(np.array([1, 1, 0, 0]) / math.sqrt(2))
    r1, r2 = v_split(ghz)
    assert abs(r1 - r2) > 0.5


def test_state_validation():
    with pytest.raises(StructuralError):
        SymmetricState(np.array([1, 1, 0, 0]))


def test_tangle_family_values():
    assert tangle_family(0) == 0
    assert abs(tangle_family(math.pi / 3) - 1) < 1e-15
    assert abs(tangle_family(math.pi / 4) - 4 / (3 * math.sqrt(3))) < 1e-15


def test_tangle_general_examples():
    e = np.eye(8)
    assert tangle_general(e[0]) == 0
    assert abs(tangle_general((e[0] + e[7]) / math.sqrt(2)) - 1) < 1e-15
    w = (e[1] + e[2] + e[4]) / math.sqrt(3)
    assert tangle_general(w) < 1e-15
    with pytest.raises(StructuralError):
        tangle_general(e[0] * 2)


def test_family_formula_matches_hyperdeterminant():
    for t in np.linspace(0, 2 * math.pi, 2001):
        assert abs(tangle_general(family_state(t).embed()) - tangle_family(t)) < 1e-10


def _random_unitary(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / abs(np.diag(r)))


def test_tangle_local_unitary_and_permutation_invariance():
    rng = np.random.default_rng(7)
    for _ in range(50):
        psi = rng.normal(size=8) + 1j * rng.normal(size=8)
        psi /= np.linalg.norm(psi)
        t = tangle_general(psi)
        assert 0 <= t <= 1 + 1e-9
        u = np.kron(np.kron(_random_unitary(rng), _random_unitary(rng)), _random_unitary(rng))
        assert abs(tangle_general(u @ psi) - t) < 1e-9
        cube = psi.reshape(2, 2, 2)
        for perm in [(1, 0, 2), (0, 2, 1), (2, 0, 1)]:
            assert abs(tangle_general(cube.transpose(perm).ravel()) - t) < 1e-12


def test_max_tangle():
    t, tau = max_tangle(10_000)
    assert abs(tau - 1) < 1e-9
    assert abs(abs(math.cos(t)) - 0.5) < 1e-6
    assert abs(abs(math.sin(t)) - math.sqrt(3) / 2) < 1e-6
    h = 1e-6
    slope = (tangle_family(t + h) - tangle_family(t - h)) / (2 * h)
    assert abs(slope) < 1e-6
    t2, _ = max_tangle(100_000)
    assert abs(t2 - math.asin(math.sqrt(3) / 2)) < 1e-7
    with pytest.raises(ValueError):
        max_tangle(999)


def test_curve_and_suite():
    curve = family_curve()
    assert curve[0] == (0.0, 0.0) and len(curve) == 181
    rep = run_suite(grid=2000, oracle_points=500)
    assert rep.passed, [c for c in rep.checks if not c.passed]
    j = rep.to_json()
    assert set(j) >= {"theta_star", "tau_star", "grid", "family_curve"}
