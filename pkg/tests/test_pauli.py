import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import elements, random_element, strings
from dlakit import pauli
from dlakit.closure import generators, named_basis
from dlakit.errors import StructuralError
from dlakit.oracle import commutator, string_matrix, to_dense
from dlakit.pauli import (
    OperatorElement,
    PauliString,
    Symbol,
    element_bracket,
    element_inner,
    scale_add,
    site_product,
    string_bracket,
)

P = PauliString.from_label


def E(label, c=1):
    return OperatorElement.from_label(label, c)


# --- site products -----------------------------------------------------


def test_site_product_cyclic_rule():
    assert site_product(Symbol.X, Symbol.Y)[:2] == (Symbol.Z, 1)
    assert site_product(Symbol.Y, Symbol.Z)[:2] == (Symbol.X, 1)
    assert site_product(Symbol.Z, Symbol.X)[:2] == (Symbol.Y, 1)


def test_site_product_reversed_and_degenerate():
    assert site_product(Symbol.Y, Symbol.X)[:2] == (Symbol.Z, -1)
    assert site_product(Symbol.Z, Symbol.Z) == (Symbol.I, 0, "same")
    for s in Symbol:
        assert site_product(Symbol.I, s).symbol is s
        assert site_product(s, Symbol.I).symbol is s
    assert site_product(Symbol.I, Symbol.X).kind == "identity"


def test_identity_is_the_only_neutral_symbol():
    neutral = [a for a in Symbol if all(site_product(a, b).symbol is b for b in Symbol)]
    assert neutral == [Symbol.I]


# --- strings -----------------------------------------------------------


def test_labels_round_trip():
    for label in ["XYZ11ZX1", "1YZX1XZZ", "ZZ1", "XXX"]:
        assert P(label).label == label
    assert P("XII") == P("X11")
    assert hash(P("XII")) == hash(P("X11"))


def test_bad_labels():
    with pytest.raises(StructuralError):
        P("XQ1")


def test_worked_bracket_with_two_differences_vanishes():
    assert string_bracket(P("XYZ11ZX1"), P("1YZX1XZZ")) is None


def test_small_tableaux():
    t = string_bracket(P("X11"), P("ZZ1"))
    assert t.coeff == -2 and t.string == P("YZ1")
    assert string_bracket(P("X11"), P("1ZZ")) is None


def test_self_bracket_vanishes():
    for label in ["XYZ", "1ZY", "YYY"]:
        assert string_bracket(P(label), P(label)) is None


def test_three_differences_sign():
    # k = 1 so the base sign is -1; all three sites cyclic
    t = string_bracket(P("XYZ"), P("YZX"))
    assert t.coeff == -2 and t.string == P("ZXY")


def test_length_mismatch():
    with pytest.raises(StructuralError):
        string_bracket(P("X11"), P("X111"))
    with pytest.raises(StructuralError):
        element_bracket(E("X11"), E("X111"))


# --- elements ------------------------------------------------------------


def test_identity_string_rejected():
    with pytest.raises(StructuralError):
        OperatorElement(3, {P("111"): 1})


def test_minimum_sites_enforced():
    with pytest.raises(StructuralError):
        OperatorElement(2, {P("X1"): 1})


def test_zero_coefficients_pruned():
    a = OperatorElement(3, {P("X11"): 0, P("1X1"): Fraction(1, 2)})
    assert len(a) == 1 and a.coeff("1X1") == Fraction(1, 2)


def test_self_bracket_empty():
    a = named_basis(4)["YZ1"]
    assert element_bracket(a, a).is_zero()


def test_generators_bracket():
    g = generators(3)
    assert element_bracket(g.X, g.Z0) == named_basis(3)["YZ0"] * -2


def test_inner_products():
    b = named_basis(3)
    assert element_inner(b["X"], b["X"]) == 1
    assert element_inner(b["YZ0"], b["YZ0"]) == 2
    assert element_inner(b["X"], b["Z0"]) == 0


def test_scale_add():
    a = named_basis(3)["Y1"]
    assert scale_add(1, a, -1, a).is_zero()
    b = named_basis(3)
    s = scale_add(1, b["Y0"], 1, b["Z0"])
    assert s == b["Y0"] + b["Z0"]
    assert scale_add(2, E("X11"), 3, E("X11")).coeff("X11") == 5


def test_records_round_trip():
    a = named_basis(4)["YZ2"] * Fraction(-3, 7)
    recs = a.to_records()
    assert all(isinstance(r["coeff"], str) for r in recs)
    assert OperatorElement.from_records(recs) == a


def test_float_coefficients_kept_as_floats():
    a = E("XY1", 0.25)
    assert not a.is_exact
    assert a.to_records()[0]["coeff"] == 0.25


# --- properties ----------------------------------------------------------


@given(st.integers(3, 6).flatmap(lambda n: st.tuples(elements(n), elements(n))))
def test_antisymmetry(pair):
    a, b = pair
    assert element_bracket(a, b) == -element_bracket(b, a)


@given(st.integers(3, 5).flatmap(lambda n: st.tuples(elements(n, 3), elements(n, 3), elements(n, 3))))
def test_jacobi(triple):
    a, b, c = triple
    total = (element_bracket(a, element_bracket(b, c))
             + element_bracket(b, element_bracket(c, a))
             + element_bracket(c, element_bracket(a, b)))
    assert total.is_zero()


@given(st.integers(3, 5).flatmap(lambda n: st.tuples(elements(n), elements(n), elements(n))),
       st.integers(-9, 9), st.integers(1, 5))
def test_bilinearity(triple, num, den):
    a, b, c = triple
    q = Fraction(num, den)
    assert element_bracket(a * q + b, c) == element_bracket(a, c) * q + element_bracket(b, c)


# --- against dense matrices ----------------------------------------------


def _all_strings(n):
    for word in itertools.product("1XYZ", repeat=n):
        if set(word) != {"1"}:
            yield P("".join(word))


def test_even_rule_exhaustive_n3():
    strs = list(_all_strings(3))
    for a, b in itertools.product(strs, strs):
        ma, mb = 1j * string_matrix(a.label), 1j * string_matrix(b.label)
        dense = ma @ mb - mb @ ma
        t = string_bracket(a, b)
        if t is None:
            assert np.abs(dense).max() == 0, (a, b)
        else:
            expect = float(t.coeff) * 1j * string_matrix(t.string.label)
            assert np.abs(dense - expect).max() < 1e-12, (a, b)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_element_bracket_matches_dense(n, rng):
    for _ in range(40):
        a, b = random_element(rng, n), random_element(rng, n)
        lhs = to_dense(element_bracket(a, b)).matrix
        rhs = commutator(to_dense(a), to_dense(b)).matrix
        assert np.abs(lhs - rhs).max() < 1e-12


@pytest.mark.parametrize("n", [3, 4, 5])
def test_inner_product_is_normalised_trace(n, rng):
    for _ in range(20):
        a, b = random_element(rng, n), random_element(rng, n)
        da, db = to_dense(a).matrix, to_dense(b).matrix
        tr = np.trace(da @ db.conj().T).real
        assert abs(float(element_inner(a, b)) * n * 2**n - tr) <= 1e-9 * max(1.0, abs(tr))


def test_min_sites_can_be_lowered(monkeypatch):
    monkeypatch.setattr(pauli, "MIN_SITES", 2)
    d = to_dense(OperatorElement.from_label("X1")).matrix
    expect = 1j * np.kron(np.array([[0, 1], [1, 0]]), np.eye(2))
    assert np.abs(d - expect).max() == 0
