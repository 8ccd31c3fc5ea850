import ast
import inspect

import numpy as np
import pytest

from dlakit import oracle
from dlakit.closure import generators, named_basis
from dlakit.errors import RankInstabilityError, SizeCapError
from dlakit.oracle import (
    DenseOperator,
    decide_rank,
    dense_closure,
    dense_commutant_dim,
    dense_generators,
    dense_recheck,
    to_dense,
)
from dlakit.pauli import OperatorElement
from dlakit.structure import center

SZ = np.diag([1, -1]).astype(complex)
I2 = np.eye(2)


def test_z0_n3_dense_form():
    d = to_dense(generators(3).Z0)
    k = np.kron
    expect = 1j * (k(k(SZ, SZ), I2) + k(k(I2, SZ), SZ) + k(k(SZ, I2), SZ))
    assert np.abs(d.matrix - expect).max() == 0
    assert d.skew_residual() == 0
    assert d.trace() == 0


def test_sigma_y_convention():
    assert np.array_equal(oracle.SY, np.array([[0, 1j], [-1j, 0]]))
    y = to_dense(OperatorElement.from_label("Y11")).matrix
    assert np.array_equal(y, 1j * np.kron(oracle.SY, np.eye(4)))
    # [iX, iY] = 2 iZ under this convention
    ix, iy, iz = 1j * oracle.SX, 1j * oracle.SY, 1j * oracle.SZ
    assert np.abs(ix @ iy - iy @ ix - 2 * iz).max() == 0


def test_dense_generators_match_symbolic():
    for n in (3, 4, 6):
        x, z0 = dense_generators(n)
        g = generators(n)
        assert np.abs(x.matrix - to_dense(g.X).matrix).max() == 0
        assert np.abs(z0.matrix - to_dense(g.Z0).matrix).max() == 0


def test_size_caps():
    with pytest.raises(SizeCapError):
        to_dense(generators(9).X)
    with pytest.raises(SizeCapError):
        dense_closure(dense_generators(7))


@pytest.mark.parametrize("n,dim", [(3, 8), (4, 11), (5, 14)])
def test_dense_closure_dimension(n, dim):
    cl = dense_closure(dense_generators(n))
    assert cl.dimension == dim
    assert cl.decision.min_kept > 10 * cl.decision.tol
    assert cl.decision.max_dropped < cl.decision.tol


@pytest.mark.parametrize("n", [3, 4])
def test_commutant(n):
    g = dense_generators(n)
    cm = dense_commutant_dim(g)
    assert cm.dimension == 2
    for c in center(n).elements:
        assert cm.fit_residual(to_dense(c)) < 1e-9
    for b in cm.basis:
        for x in g:
            assert oracle.commutator(b, x).norm() < 1e-9


def test_rank_instability_detected():
    rows = np.diag([1.0, 0.5, 3e-9])
    with pytest.raises(RankInstabilityError):
        decide_rank(rows)
    ok = decide_rank(np.diag([1.0, 0.5, 1e-14]))
    assert ok.rank == 2 and ok.gap > 1e10


@pytest.mark.parametrize("n", [3, 4, 5])
def test_dense_recheck(n):
    checks = dense_recheck(n)
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]


def test_oracle_does_not_use_symbolic_brackets():
    tree = ast.parse(inspect.getsource(oracle))
    imported = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.ImportFrom):
            imported |= {a.name for a in node.names}
    banned = {"element_bracket", "string_bracket", "bracket_bits", "invariant_bracket", "symmetrized_bracket"}
    assert not imported & banned


def test_dense_operator_arithmetic():
    a = to_dense(named_basis(3)["X"])
    b = to_dense(named_basis(3)["Z0"])
    assert isinstance(a + b, DenseOperator)
    assert np.abs(((a - b) * 2).matrix - 2 * (a.matrix - b.matrix)).max() == 0
