"""Generators, the named (3n-1)-element basis and the depth-ordered closure.

Named basis (all cyclic sums, strings written site 1 first)::

    Y^j  = C(Y X^j Y 1...1)          j = 0..n-2
    Z^j  = C(Z X^j Z 1...1)
    YZ^j = C(Z X^j Y 1...1) + C(Y X^j Z 1...1)
    X    = C(X 1...1)
    XX   = C(X...X 1)
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence, TypeVar

from .errors import InconsistencyError, InvarianceError, StructuralError
from .linalg import Echelon, primitive
from .pauli import (
    Coefficient,
    OperatorElement,
    PauliString,
    _check_sites,
    as_coefficient,
    element_bracket,
    element_inner,
    linear_combination,
    scale_add,
)
from .symmetry import (
    OrbitKey,
    SymmetricCoordinates,
    invariant_bracket,
    symmetrize,
    to_coordinates,
)

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    """Thread cap from ``DLAKIT_THREADS`` (default 1)."""
    raw = os.environ.get("DLAKIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """Order-preserving map, threaded when ``DLAKIT_THREADS`` > 1."""
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _word(*parts: str) -> PauliString:
    return PauliString.from_label("".join(parts))


@dataclass(frozen=True)
class GeneratorSet:
    """The two control generators ``X = iH_1`` and ``Z^0 = iH_0``."""

    n: int
    X: OperatorElement
    Z0: OperatorElement

    @property
    def gens(self) -> tuple[OperatorElement, OperatorElement]:
        return (self.X, self.Z0)

    @property
    def names(self) -> tuple[str, str]:
        return ("X", "Z0")


def generators(n: int) -> GeneratorSet:
    _check_sites(n)
    return GeneratorSet(
        n,
        symmetrize(_word("X", "1" * (n - 1))),
        symmetrize(_word("ZZ", "1" * (n - 2))),
    )


def hamiltonian(n: int, u) -> OperatorElement:
    """Skew-Hermitian form ``(1 - u) Z^0 + u X`` of the controlled Hamiltonian."""
    g = generators(n)
    u = as_coefficient(u)
    return scale_add(1 - u, g.Z0, u, g.X)


def basis_names(n: int) -> list[str]:
    return (
        [f"Y{j}" for j in range(n - 1)]
        + [f"Z{j}" for j in range(n - 1)]
        + [f"YZ{j}" for j in range(n - 1)]
        + ["X", "XX"]
    )


class DlaBasis(Mapping):
    """The named basis, addressable by name (``"Y0"``, ``"YZ3"``, ``"XX"``...)."""

    def __init__(self, n: int, elements: Mapping[str, OperatorElement]):
        self.n = n
        self._elements = dict(elements)
        self.names = list(self._elements)
        self.coords = {k: to_coordinates(v) for k, v in self._elements.items()}

    def __getitem__(self, name: str) -> OperatorElement:
        return self._elements[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __len__(self) -> int:
        return len(self._elements)

    @property
    def elements(self) -> list[OperatorElement]:
        return [self._elements[k] for k in self.names]

    def combine(self, coeffs: Mapping[str, object]) -> OperatorElement:
        """``sum_name coeffs[name] * basis[name]``."""
        return linear_combination(((c, self._elements[k]) for k, c in coeffs.items()), self.n)

    def expand(self, a: OperatorElement, exact: bool = True) -> dict[str, Coefficient]:
        """Coordinates of ``a`` in the (orthogonal) named basis.

        With ``exact`` the reconstruction must match ``a`` exactly, otherwise
        :class:`InconsistencyError` is raised.
        """
        out: dict[str, Coefficient] = {}
        for k in self.names:
            e = self._elements[k]
            c = element_inner(a, e) / element_inner(e, e)
            if c != 0:
                out[k] = c
        if exact and self.combine(out) != a:
            raise InconsistencyError("element does not lie in the span of the named basis")
        return out


def named_basis(n: int) -> DlaBasis:
    _check_sites(n)
    els: dict[str, OperatorElement] = {}
    for j in range(n - 1):
        pad = "1" * (n - j - 2)
        els[f"Y{j}"] = symmetrize(_word("Y", "X" * j, "Y", pad))
    for j in range(n - 1):
        pad = "1" * (n - j - 2)
        els[f"Z{j}"] = symmetrize(_word("Z", "X" * j, "Z", pad))
    for j in range(n - 1):
        pad = "1" * (n - j - 2)
        els[f"YZ{j}"] = symmetrize(_word("Z", "X" * j, "Y", pad)) + symmetrize(_word("Y", "X" * j, "Z", pad))
    els["X"] = symmetrize(_word("X", "1" * (n - 1)))
    els["XX"] = symmetrize(_word("X" * (n - 1), "1"))
    return DlaBasis(n, {k: els[k] for k in basis_names(n)})


# --------------------------------------------------------------------------
# closure


@dataclass(frozen=True)
class TraceEntry:
    depth: int
    name: str
    left: str | None
    right: str | None
    coords: SymmetricCoordinates

    def to_json(self) -> dict[str, object]:
        produced = None if self.left is None else {"left": self.left, "right": self.right}
        return {"depth": self.depth, "name": self.name, "produced_by": produced, "element": self.coords.to_json()}


@dataclass
class ClosureTrace:
    n: int
    entries: list[TraceEntry] = field(default_factory=list)

    def at_depth(self, depth: int) -> list[TraceEntry]:
        return [e for e in self.entries if e.depth == depth]

    @property
    def max_depth(self) -> int:
        return max(e.depth for e in self.entries)

    def to_json(self) -> list[dict[str, object]]:
        return [e.to_json() for e in self.entries]


@dataclass(frozen=True)
class ClosureResult:
    n: int
    elements: list[OperatorElement]
    names: list[str]
    trace: ClosureTrace

    @property
    def dimension(self) -> int:
        return len(self.elements)

    def __iter__(self):
        # unpacks as (elements, trace)
        return iter((self.elements, self.trace))


def _orbit_order(k: OrbitKey) -> tuple[int, ...]:
    return k.sort_key()


def compute_closure(g: GeneratorSet, check_invariance: bool = True, max_depth: int | None = None) -> ClosureResult:
    """Depth-ordered Lie closure of the generators, in exact arithmetic.

    Depth 0 holds the generators. Each later depth brackets the previous
    depth's admissions with both generators, reduces every result against
    the current span (reduced row echelon over orbit coordinates, pivots in
    lexicographic orbit order) and admits nonzero residuals, scaled to
    coprime integers with a positive pivot. Stops at the first depth that
    admits nothing.

    With ``check_invariance`` each admitted element is recomputed by the
    plain string-by-string bracket and must agree with the orbit-coordinate
    fast path, which also confirms its cyclic invariance.
    """
    n = g.n
    ech = Echelon(_orbit_order)
    trace = ClosureTrace(n)
    elements: list[OperatorElement] = []
    names: list[str] = []
    coords_of: dict[str, SymmetricCoordinates] = {}

    def admit(depth, name, left, right, vec) -> None:
        prim = primitive(vec, _orbit_order)
        coords = SymmetricCoordinates._raw(n, prim)
        elements.append(coords.to_element())
        names.append(name)
        coords_of[name] = coords
        trace.entries.append(TraceEntry(depth, name, left, right, coords))

    for name, gen in zip(g.names, g.gens):
        vec = dict(to_coordinates(gen).entries)
        if ech.add(vec) is not None:
            admit(0, name, None, None, vec)

    frontier = list(names)
    depth = 0
    limit = max_depth if max_depth is not None else 4**n
    while frontier and depth < limit:
        depth += 1
        jobs = [(f, gname, gen) for f in frontier for gname, gen in zip(g.names, g.gens)]
        results = pmap(lambda job: invariant_bracket(coords_of[job[0]], job[2]), jobs)
        new: list[str] = []
        for (f, gname, gen), res in zip(jobs, results):
            if not res:
                continue
            residual = ech.add(dict(res.entries))
            if residual is None:
                continue
            name = f"d{depth}.{len(new)}"
            if check_invariance:
                full = element_bracket(elements[names.index(f)], gen)
                try:
                    if to_coordinates(full) != res:
                        raise InconsistencyError(f"fast bracket disagrees with expansion at [{f}, {gname}]")
                except InvarianceError as exc:
                    raise InconsistencyError(f"[{f}, {gname}] is not cyclically invariant") from exc
            admit(depth, name, f, gname, residual)
            new.append(name)
        frontier = new
    return ClosureResult(n, elements, names, trace)


def _string_order(s: PauliString) -> tuple[int, ...]:
    return s.sort_key()


def _exact_vec(a: OperatorElement) -> dict[PauliString, Fraction]:
    if not a.is_exact:
        raise TypeError("exact span tests need rational coefficients")
    return dict(a.terms)


def span_rank(elements: Iterable[OperatorElement]) -> int:
    ech = Echelon(_string_order)
    for a in elements:
        ech.add(_exact_vec(a))
    return ech.rank


def span_contains(span: Iterable[OperatorElement], a: OperatorElement) -> bool:
    ech = Echelon(_string_order)
    for b in span:
        ech.add(_exact_vec(b))
    return ech.contains(_exact_vec(a))


def span_equal(a: Sequence[OperatorElement], b: Sequence[OperatorElement]) -> bool:
    """Exact test that ``span(a) == span(b)``."""
    ns = {x.n for x in list(a) + list(b)}
    if len(ns) > 1:
        raise StructuralError(f"mixed site counts {sorted(ns)}")
    ra = span_rank(a)
    return ra == span_rank(b) == span_rank(list(a) + list(b))


# --------------------------------------------------------------------------
# Table I


def table_closed_form(n: int) -> dict[str, dict[str, dict[str, Fraction]]]:
    """Brackets of every named element with ``X`` and ``Z^0`` as closed forms."""
    _check_sites(n)
    top = n - 2
    t: dict[str, dict[str, dict[str, Fraction]]] = {}

    def F(v) -> Fraction:
        return Fraction(v)

    for k in range(n - 1):
        t[f"Y{k}"] = {
            "X": {f"YZ{k}": F(-2)},
            "Z0": {f"YZ{k + 1}": F(2)} if k != top else {},
        }
        t[f"Z{k}"] = {
            "X": {f"YZ{k}": F(2)},
            "Z0": {f"YZ{k - 1}": F(-2)} if k != 0 else {},
        }
        z0: dict[str, Fraction] = {}
        if k == 0:
            z0["X"] = F(4)
        else:
            z0[f"Y{k - 1}"] = F(-4)
        if k == top:
            z0["XX"] = F(4)
        else:
            z0[f"Z{k + 1}"] = F(4)
        t[f"YZ{k}"] = {"X": {f"Z{k}": F(-4), f"Y{k}": F(4)}, "Z0": z0}
    t["X"] = {"X": {}, "Z0": {"YZ0": F(-2)}}
    t["XX"] = {"X": {}, "Z0": {f"YZ{top}": F(-2)}}
    return t


def commutator_table(n: int) -> dict[str, dict[str, dict[str, Fraction]]]:
    """Brackets ``[e, X]`` and ``[e, Z^0]`` for every named ``e``, computed and
    expanded in the named basis. Raises :class:`InconsistencyError` if a
    result leaves the span."""
    basis = named_basis(n)
    g = generators(n)
    out: dict[str, dict[str, dict[str, Fraction]]] = {}
    for name in basis.names:
        e = basis[name]
        out[name] = {
            "X": basis.expand(element_bracket(e, g.X)),
            "Z0": basis.expand(element_bracket(e, g.Z0)),
        }
    return out


def table_to_json(table: Mapping[str, Mapping[str, Mapping[str, Fraction]]]) -> dict[str, object]:
    return {
        name: {gen: {k: str(v) for k, v in exp.items()} for gen, exp in row.items()}
        for name, row in table.items()
    }
