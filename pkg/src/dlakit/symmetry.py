"""Cyclic-group action on Pauli strings and the symmetrizer.

``symmetrize`` sums over all ``n`` rotations, so a string whose orbit has
period ``d`` picks up coefficient ``n / d`` on each of its ``d`` distinct
rotations. Cyclically invariant elements are stored compactly as
:class:`SymmetricCoordinates`: one coefficient per orbit, meaning "this
coefficient on every distinct member of the orbit".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import InvarianceError, StructuralError
from .pauli import (
    Coefficient,
    OperatorElement,
    PauliString,
    as_coefficient,
    bracket_bits,
    string_bracket,
)


def _rot_bits(v: int, r: int, n: int) -> int:
    if r == 0:
        return v
    mask = (1 << n) - 1
    return ((v << r) | (v >> (n - r))) & mask


def rotate(s: PauliString, r: int) -> PauliString:
    """Shift the word ``r`` sites to the right (cyclically): ``rotate("XZ1", 1) == "1XZ"``."""
    if not 0 <= r < s.n:
        raise StructuralError(f"rotation {r} outside [0, {s.n})")
    return PauliString(s.n, _rot_bits(s.x, r, s.n), _rot_bits(s.z, r, s.n))


@lru_cache(maxsize=1 << 16)
def _orbit_bits(n: int, x: int, z: int) -> tuple[tuple[int, int], ...]:
    seen: list[tuple[int, int]] = []
    for r in range(n):
        b = (_rot_bits(x, r, n), _rot_bits(z, r, n))
        if b == (x, z) and r:
            break
        seen.append(b)
    return tuple(seen)


def orbit(s: PauliString) -> list[PauliString]:
    """Distinct rotations of ``s``, in rotation order starting from ``s``."""
    return [PauliString(s.n, x, z) for x, z in _orbit_bits(s.n, s.x, s.z)]


@dataclass(frozen=True, slots=True)
class OrbitKey:
    """Orbit of a string under the cyclic group: minimal rotation plus period."""

    rep: PauliString
    period: int

    def sort_key(self) -> tuple[int, ...]:
        return self.rep.sort_key()

    def to_json(self) -> dict[str, object]:
        return {"rep": self.rep.label, "period": self.period}

    @classmethod
    def from_json(cls, data: Mapping[str, object]) -> "OrbitKey":
        key = canonical(PauliString.from_label(str(data["rep"])))
        if key.rep.label != data["rep"] or key.period != data["period"]:
            raise StructuralError(f"{data} is not a canonical orbit key")
        return key

    def members(self) -> list[PauliString]:
        return orbit(self.rep)


@lru_cache(maxsize=1 << 16)
def _canonical_bits(n: int, x: int, z: int) -> tuple[int, int, int]:
    members = _orbit_bits(n, x, z)
    best = min(members, key=lambda b: PauliString(n, b[0], b[1]).sort_key())
    return best[0], best[1], len(members)


def canonical(s: PauliString) -> OrbitKey:
    """Orbit key of ``s``: lexicographically smallest rotation under I < X < Y < Z."""
    x, z, d = _canonical_bits(s.n, s.x, s.z)
    return OrbitKey(PauliString(s.n, x, z), d)


def symmetrize(s: PauliString) -> OperatorElement:
    """Sum of ``s`` over all ``n`` cyclic rotations (with multiplicity)."""
    members = _orbit_bits(s.n, s.x, s.z)
    mult = Fraction(s.n // len(members))
    return OperatorElement._raw(s.n, {PauliString(s.n, x, z): mult for x, z in members})


def symmetrize_element(a: OperatorElement) -> OperatorElement:
    """Linear extension of :func:`symmetrize`."""
    acc: dict[PauliString, Coefficient] = {}
    for s, c in a.terms.items():
        members = _orbit_bits(s.n, s.x, s.z)
        w = c * (s.n // len(members))
        for x, z in members:
            key = PauliString(s.n, x, z)
            acc[key] = acc.get(key, 0) + w
    return OperatorElement._raw(a.n, {s: c for s, c in acc.items() if c != 0})


def is_invariant(a: OperatorElement) -> bool:
    try:
        to_coordinates(a)
    except InvarianceError:
        return False
    return True


def symmetrized_bracket(a: PauliString, b: PauliString) -> OperatorElement:
    """``[C(a), C(b)]`` computed as ``C(sum_S [a, S b S^-1])``.

    ``a`` stays fixed while ``b`` runs over all ``n`` group elements.
    """
    if a.n != b.n:
        raise StructuralError(f"length mismatch: {a.n} vs {b.n}")
    acc: dict[PauliString, Coefficient] = {}
    for r in range(a.n):
        t = string_bracket(a, rotate(b, r))
        if t is not None:
            acc[t.string] = acc.get(t.string, 0) + t.coeff
    partial = OperatorElement._raw(a.n, {s: c for s, c in acc.items() if c != 0})
    return symmetrize_element(partial)


class SymmetricCoordinates(Mapping):
    """Orbit-keyed coordinates of a cyclically invariant element."""

    __slots__ = ("n", "_entries")

    def __init__(self, n: int, entries: Mapping[OrbitKey, object] | Iterable[tuple[OrbitKey, object]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        acc: dict[OrbitKey, Coefficient] = {}
        for k, c in items:
            if k.rep.n != n:
                raise StructuralError(f"orbit {k.rep.label} has wrong length for n={n}")
            acc[k] = acc.get(k, 0) + as_coefficient(c)
        self.n = n
        self._entries = {k: c for k, c in acc.items() if c != 0}

    @classmethod
    def _raw(cls, n: int, entries: dict[OrbitKey, Coefficient]) -> "SymmetricCoordinates":
        obj = cls.__new__(cls)
        obj.n = n
        obj._entries = entries
        return obj

    def __getitem__(self, key: OrbitKey) -> Coefficient:
        return self._entries[key]

    def __iter__(self):
        return iter(sorted(self._entries, key=OrbitKey.sort_key))

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SymmetricCoordinates):
            return self.n == other.n and self._entries == other._entries
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    @property
    def entries(self) -> Mapping[OrbitKey, Coefficient]:
        return MappingProxyType(self._entries)

    def to_element(self) -> OperatorElement:
        terms: dict[PauliString, Coefficient] = {}
        for k, c in self._entries.items():
            for m in orbit(k.rep):
                terms[m] = c
        return OperatorElement(self.n, terms)

    def to_json(self) -> list[dict[str, object]]:
        return [
            {**k.to_json(), "coeff": str(self._entries[k]) if isinstance(self._entries[k], Fraction) else self._entries[k]}
            for k in self
        ]

    def __repr__(self) -> str:
        body = ", ".join(f"{k.rep.label}/{k.period}: {self._entries[k]}" for k in self)
        return f"SymmetricCoordinates({{{body}}})"


def to_coordinates(a: OperatorElement) -> SymmetricCoordinates:
    """Compress a cyclically invariant element to one coefficient per orbit.

    Raises :class:`InvarianceError` naming the first orbit whose members
    carry unequal coefficients.
    """
    out: dict[OrbitKey, Coefficient] = {}
    terms = a.terms
    for s, c in a.items():
        key = canonical(s)
        if key in out:
            continue
        for m in orbit(key.rep):
            if terms.get(m, 0) != c:
                raise InvarianceError(
                    f"orbit {key.rep.label} (period {key.period}) is not uniformly weighted: "
                    f"{s.label} has {c}, {m.label} has {terms.get(m, 0)}"
                )
        out[key] = c
    return SymmetricCoordinates._raw(a.n, out)


def invariant_bracket(a: SymmetricCoordinates, b: OperatorElement) -> SymmetricCoordinates:
    """Bracket of two invariant elements, ``a`` in coordinates, ``b`` expanded.

    Only orbit representatives of ``a`` are bracketed against ``b``: for
    invariant ``b``, ``[C(rep), b] = C([rep, b])``, so the ``n``-fold
    redundancy of the plain bilinear expansion is skipped.
    """
    n = a.n
    if b.n != n:
        raise StructuralError(f"length mismatch: {n} vs {b.n}")
    bt = [(s.x, s.z, c) for s, c in b.terms.items()]
    acc: dict[tuple[int, int], Coefficient] = {}
    for key, ca in a.entries.items():
        xa, za = key.rep.x, key.rep.z
        for xb, zb, cb in bt:
            out = bracket_bits(xa, za, xb, zb)
            if out is None:
                continue
            c, x, z = out
            rx, rz, d = _canonical_bits(n, x, z)
            k = (rx, rz)
            acc[k] = acc.get(k, 0) + c * ca * cb * Fraction(key.period, d)
    entries: dict[OrbitKey, Coefficient] = {}
    for (x, z), c in acc.items():
        if c != 0:
            s = PauliString(n, x, z)
            entries[OrbitKey(s, _canonical_bits(n, x, z)[2])] = c
    return SymmetricCoordinates._raw(n, entries)
