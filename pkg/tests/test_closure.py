from fractions import Fraction

import pytest

from dlakit import closure as cl
from dlakit.closure import (
    basis_names,
    commutator_table,
    compute_closure,
    generators,
    hamiltonian,
    named_basis,
    span_equal,
    table_closed_form,
    table_to_json,
)
from dlakit.errors import InconsistencyError, StructuralError
from dlakit.pauli import OperatorElement, PauliString, element_inner
from dlakit.symmetry import is_invariant, symmetrize


def test_generators_are_symmetrizations():
    g = generators(5)
    assert g.X == symmetrize(PauliString.from_label("X1111"))
    assert g.Z0 == symmetrize(PauliString.from_label("ZZ111"))
    assert g.names == ("X", "Z0")


def test_hamiltonian_endpoints():
    g = generators(4)
    assert hamiltonian(4, 0) == g.Z0
    assert hamiltonian(4, 1) == g.X
    h = hamiltonian(3, Fraction(1, 2))
    assert len(h) == 6 and all(c == Fraction(1, 2) for c in h.terms.values())
    with pytest.raises(StructuralError):
        hamiltonian(2, 0)


def test_named_basis_n3_and_n4():
    assert named_basis(3).names == ["Y0", "Y1", "Z0", "Z1", "YZ0", "YZ1", "X", "XX"]
    assert len(named_basis(4)) == 11
    with pytest.raises(StructuralError):
        named_basis(2)


def test_named_basis_is_orthogonal_and_invariant():
    b = named_basis(5)
    for i, p in enumerate(b.names):
        assert is_invariant(b[p])
        for q in b.names[i + 1:]:
            assert element_inner(b[p], b[q]) == 0
        expect = 2 if p.startswith("YZ") else 1
        assert element_inner(b[p], b[p]) == expect


def test_yz_is_two_term_sum():
    n = 5
    b = named_basis(n)
    P = PauliString.from_label
    assert b["YZ1"] == symmetrize(P("ZXY11")) + symmetrize(P("YXZ11"))
    assert b["XX"] == symmetrize(P("XXXX1"))


def test_expand_rejects_outside_span():
    b = named_basis(3)
    with pytest.raises(InconsistencyError):
        b.expand(OperatorElement.from_label("XXX"))


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_closure_dimension(n):
    res = compute_closure(generators(n))
    assert res.dimension == 3 * n - 1
    assert span_equal(res.elements, named_basis(n).elements)


def test_closure_unpacks_and_first_admission():
    elements, trace = compute_closure(generators(6))
    first = trace.at_depth(1)
    assert len(first) == 1
    assert first[0].left == "X" and first[0].right == "Z0"
    # primitive with positive pivot: YZ0 itself
    assert elements[2] == named_basis(6)["YZ0"]
    assert [e.name for e in trace.at_depth(0)] == ["X", "Z0"]


def _predicted(n, depth):
    """Cumulative names the depth schedule predicts up to ``depth``."""
    names = ["X", "Z0"]
    for d in range(1, depth + 1):
        if d % 2:
            names.append(f"YZ{(d - 1) // 2}")
        else:
            k = d // 2
            if k <= n - 2:
                names += [f"Y{k - 1}", f"Z{k}"]
            else:
                names += [f"Y{n - 2}", "XX"]
    return names


@pytest.mark.parametrize("n", [4, 5, 6, 8])
def test_depth_schedule(n):
    res = compute_closure(generators(n))
    b = named_basis(n)
    assert res.trace.max_depth == 2 * (n - 1)
    upto = []
    for d in range(res.trace.max_depth + 1):
        upto += [res.elements[res.names.index(e.name)] for e in res.trace.at_depth(d)]
        assert span_equal(upto, [b[k] for k in _predicted(n, d)]), d


def test_closure_is_independent_of_thread_count(monkeypatch):
    monkeypatch.setenv("DLAKIT_THREADS", "1")
    serial = compute_closure(generators(7))
    monkeypatch.setenv("DLAKIT_THREADS", "8")
    parallel = compute_closure(generators(7))
    assert serial.trace.to_json() == parallel.trace.to_json()


def test_trace_json_shape():
    entries = compute_closure(generators(3)).trace.to_json()
    assert entries[0] == {"depth": 0, "name": "X", "produced_by": None,
                          "element": [{"rep": "11X", "period": 3, "coeff": "1"}]}
    assert entries[2]["produced_by"] == {"left": "X", "right": "Z0"}


def test_span_equal_examples():
    b = named_basis(5)
    assert not span_equal(b.elements, [b[k] for k in b.names if k != "XX"])
    g = generators(5)
    assert span_equal(list(g.gens), [x * 7 for x in g.gens])
    with pytest.raises(StructuralError):
        span_equal([generators(3).X], [generators(4).X])
    with pytest.raises(TypeError):
        span_equal([g.X.to_float()], [g.X])


def test_table_entries():
    t = commutator_table(6)
    F = Fraction
    assert t["Y2"]["X"] == {"YZ2": F(-2)}
    assert t["YZ3"]["X"] == {"Z3": F(-4), "Y3": F(4)}
    assert t["XX"]["X"] == {}
    assert t["X"]["Z0"] == {"YZ0": F(-2)}


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_table_matches_closed_form(n):
    assert commutator_table(n) == table_closed_form(n)


def test_table_json():
    j = table_to_json(table_closed_form(3))
    assert j["YZ0"]["Z0"] == {"X": "4", "Z1": "4"}
    assert set(j) == set(basis_names(3))


def test_worker_count(monkeypatch):
    monkeypatch.setenv("DLAKIT_THREADS", "3")
    assert cl.worker_count() == 3
    monkeypatch.setenv("DLAKIT_THREADS", "0")
    assert cl.worker_count() == 1
