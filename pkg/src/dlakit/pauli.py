"""Exact algebra of Pauli strings.

A Pauli string of length ``n`` is a word over ``{1, X, Y, Z}`` (site 1
leftmost) labelling the skew-Hermitian matrix ``i * (s_1 (x) ... (x) s_n)``.
Matrices follow the convention ``sigma_y = [[0, i], [-i, 0]]``, which is the
negative of the textbook ``sigma_y``. Under this convention
``[iX, iY] = 2 iZ`` and cyclic permutations, and the commutator of two
strings differing (both non-identity, unequal) at ``2k + 1`` sites is
``2 (-1)^k`` times the product of the per-site cyclic signs.

Strings are stored as two bitmasks (bit ``j`` is site ``j + 1``) with
``X = (1, 0)``, ``Z = (0, 1)``, ``Y = (1, 1)``, so products are XORs and the
differing-site set is a handful of AND/OR operations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Real
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple, Union

from .errors import StructuralError

#: Smallest chain length accepted by element constructors. Tests may lower it.
MIN_SITES = 3

Coefficient = Union[Fraction, float]

_CHARS = "1XYZ"
_CHAR_TO_BITS = {"1": (0, 0), "I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


class Symbol(enum.Enum):
    I = (0, 0)
    X = (1, 0)
    Y = (1, 1)
    Z = (0, 1)

    @property
    def char(self) -> str:
        return "1" if self is Symbol.I else self.name

    @classmethod
    def from_bits(cls, x: int, z: int) -> "Symbol":
        return cls((x, z))


_CYCLIC = {(Symbol.X, Symbol.Y), (Symbol.Y, Symbol.Z), (Symbol.Z, Symbol.X)}


class SiteProduct(NamedTuple):
    symbol: Symbol
    sign: int  # +1 / -1 for distinct non-identity pairs, 0 otherwise
    kind: str  # "cyclic", "anticyclic", "same" or "identity"


def site_product(a: Symbol, b: Symbol) -> SiteProduct:
    """Single-site rule: ``X*Y -> (Z, +1)``, reversed order flips the sign,
    ``s*s -> (I, same)``, ``I*s -> (s, identity)``."""
    if a is Symbol.I or b is Symbol.I:
        return SiteProduct(b if a is Symbol.I else a, 0, "identity")
    if a is b:
        return SiteProduct(Symbol.I, 0, "same")
    out = Symbol.from_bits(a.value[0] ^ b.value[0], a.value[1] ^ b.value[1])
    if (a, b) in _CYCLIC:
        return SiteProduct(out, 1, "cyclic")
    return SiteProduct(out, -1, "anticyclic")


@dataclass(frozen=True, slots=True)
class PauliString:
    """Phaseless Pauli word of ``n`` sites, stored as ``(xbits, zbits)``."""

    n: int
    x: int
    z: int

    def __post_init__(self):
        if self.n < 1:
            raise StructuralError(f"string length must be positive, got {self.n}")
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise StructuralError("bitmask wider than the site count")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        x = z = 0
        for j, ch in enumerate(label):
            try:
                bx, bz = _CHAR_TO_BITS[ch]
            except KeyError:
                raise StructuralError(f"invalid site symbol {ch!r} in {label!r}") from None
            x |= bx << j
            z |= bz << j
        return cls(len(label), x, z)

    @classmethod
    def from_symbols(cls, symbols: Iterable[Symbol]) -> "PauliString":
        return cls.from_label("".join(s.char for s in symbols))

    @property
    def label(self) -> str:
        return "".join(_CHARS[_idx(self.x, self.z, j)] for j in range(self.n))

    @property
    def symbols(self) -> tuple[Symbol, ...]:
        return tuple(Symbol.from_bits((self.x >> j) & 1, (self.z >> j) & 1) for j in range(self.n))

    @property
    def support(self) -> int:
        """Bitmask of non-identity sites."""
        return self.x | self.z

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def is_identity(self) -> bool:
        return not (self.x | self.z)

    def sort_key(self) -> tuple[int, ...]:
        return tuple(_idx(self.x, self.z, j) for j in range(self.n))

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"


def _idx(x: int, z: int, j: int) -> int:
    # index into "1XYZ": I=0, X=1, Y=2, Z=3
    bx = (x >> j) & 1
    bz = (z >> j) & 1
    if bx:
        return 2 if bz else 1
    return 3 if bz else 0


def bracket_bits(xa: int, za: int, xb: int, zb: int) -> tuple[int, int, int] | None:
    """Commutator of two strings given as bitmasks.

    Returns ``(coeff, x, z)`` with integer ``coeff`` in ``{+2, -2}`` or None
    when the strings commute.
    """
    diff = (xa & zb) ^ (za & xb)
    # sites where both are non-identity and differ are exactly the sites
    # with odd symplectic overlap
    d = diff.bit_count()
    if not d & 1:
        return None
    # cyclic pairs (X,Y), (Y,Z), (Z,X) contribute +1; others -1
    a_x = xa & ~za
    a_y = xa & za
    a_z = za & ~xa
    b_x = xb & ~zb
    b_y = xb & zb
    b_z = zb & ~xb
    cyc = (a_x & b_y) | (a_y & b_z) | (a_z & b_x)
    anti = d - (cyc & diff).bit_count()
    k = d >> 1
    sign = -1 if (k + anti) & 1 else 1
    return 2 * sign, xa ^ xb, za ^ zb


class PauliTerm(NamedTuple):
    coeff: Coefficient
    string: PauliString


def string_bracket(s1: PauliString, s2: PauliString) -> PauliTerm | None:
    """Commutator of two Pauli strings: a single scaled string or None (zero)."""
    if s1.n != s2.n:
        raise StructuralError(f"length mismatch: {s1.n} vs {s2.n}")
    out = bracket_bits(s1.x, s1.z, s2.x, s2.z)
    if out is None:
        return None
    c, x, z = out
    return PauliTerm(Fraction(c), PauliString(s1.n, x, z))


def as_coefficient(value) -> Coefficient:
    """Normalise a scalar: integers and rationals become Fraction, reals become float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, Integral):
        return Fraction(int(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except ValueError:
            raise StructuralError(f"bad coefficient literal {value!r}") from None
    if isinstance(value, Real):
        return float(value)
    raise TypeError(f"unsupported coefficient type {type(value).__name__}")


def _check_sites(n: int) -> None:
    if n < MIN_SITES:
        raise StructuralError(f"n must be >= {MIN_SITES}, got {n}")


class OperatorElement:
    """Real linear combination of Pauli strings, i.e. a skew-Hermitian operator.

    Coefficients are exact :class:`~fractions.Fraction` values on the symbolic
    path; floats are allowed for elements built from irrational roots. Values
    are immutable; arithmetic returns new elements.
    """

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping[PauliString, object] | Iterable[tuple[PauliString, object]] = ()):
        _check_sites(n)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[PauliString, Coefficient] = {}
        for s, c in items:
            if not isinstance(s, PauliString):
                s = PauliString.from_label(s)
            if s.n != n:
                raise StructuralError(f"string {s.label} has {s.n} sites, element has {n}")
            if s.is_identity():
                raise StructuralError("the identity string is not an element of su(2^n)")
            acc[s] = acc.get(s, 0) + as_coefficient(c)
        self.n = n
        self._terms = {s: c for s, c in acc.items() if c != 0}

    @classmethod
    def _raw(cls, n: int, terms: dict[PauliString, Coefficient]) -> "OperatorElement":
        # trusted fast path: terms already pruned and validated
        obj = cls.__new__(cls)
        obj.n = n
        obj._terms = terms
        return obj

    @classmethod
    def zero(cls, n: int) -> "OperatorElement":
        _check_sites(n)
        return cls._raw(n, {})

    @classmethod
    def from_label(cls, label: str, coeff=1) -> "OperatorElement":
        s = PauliString.from_label(label)
        return cls(s.n, {s: coeff})

    @classmethod
    def from_records(cls, records: Iterable[Mapping[str, object]]) -> "OperatorElement":
        records = list(records)
        if not records:
            raise StructuralError("cannot infer n from an empty record list")
        n = len(str(records[0]["string"]))
        return cls(n, [(PauliString.from_label(str(r["string"])), r["coeff"]) for r in records])

    def to_records(self) -> list[dict[str, object]]:
        out = []
        for s, c in self.items():
            out.append({"coeff": str(c) if isinstance(c, Fraction) else c, "string": s.label})
        return out

    @property
    def terms(self) -> Mapping[PauliString, Coefficient]:
        return MappingProxyType(self._terms)

    def items(self) -> list[tuple[PauliString, Coefficient]]:
        """Terms in deterministic order (I < X < Y < Z, site 1 most significant)."""
        return sorted(self._terms.items(), key=lambda kv: kv[0].sort_key())

    def coeff(self, s: PauliString | str) -> Coefficient:
        if isinstance(s, str):
            s = PauliString.from_label(s)
        return self._terms.get(s, Fraction(0))

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self._terms.values())

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[PauliString]:
        return iter(s for s, _ in self.items())

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OperatorElement):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: "OperatorElement") -> "OperatorElement":
        if not isinstance(other, OperatorElement):
            return NotImplemented
        return scale_add(1, self, 1, other)

    def __sub__(self, other: "OperatorElement") -> "OperatorElement":
        if not isinstance(other, OperatorElement):
            return NotImplemented
        return scale_add(1, self, -1, other)

    def __neg__(self) -> "OperatorElement":
        return OperatorElement._raw(self.n, {s: -c for s, c in self._terms.items()})

    def __mul__(self, scalar) -> "OperatorElement":
        if isinstance(scalar, OperatorElement):
            return NotImplemented
        a = as_coefficient(scalar)
        if a == 0:
            return OperatorElement._raw(self.n, {})
        return OperatorElement._raw(self.n, {s: a * c for s, c in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "OperatorElement":
        a = as_coefficient(scalar)
        return self * (1 / a if isinstance(a, float) else 1 / a)

    def bracket(self, other: "OperatorElement") -> "OperatorElement":
        return element_bracket(self, other)

    def inner(self, other: "OperatorElement") -> Coefficient:
        return element_inner(self, other)

    def norm(self) -> float:
        return float(element_inner(self, self)) ** 0.5

    def to_float(self) -> "OperatorElement":
        return OperatorElement._raw(self.n, {s: float(c) for s, c in self._terms.items()})

    def __repr__(self) -> str:
        if not self._terms:
            return f"OperatorElement(n={self.n}, 0)"
        body = " + ".join(f"{c}*{s.label}" for s, c in self.items()[:6])
        more = " + ..." if len(self._terms) > 6 else ""
        return f"OperatorElement({body}{more})"


def _same_n(a: OperatorElement, b: OperatorElement) -> None:
    if a.n != b.n:
        raise StructuralError(f"length mismatch: {a.n} vs {b.n}")


def element_bracket(a: OperatorElement, b: OperatorElement) -> OperatorElement:
    """Bilinear extension of :func:`string_bracket`, with cancellation."""
    _same_n(a, b)
    n = a.n
    acc: dict[tuple[int, int], Coefficient] = {}
    bt = [(s.x, s.z, c) for s, c in b._terms.items()]
    for sa, ca in a._terms.items():
        xa, za = sa.x, sa.z
        for xb, zb, cb in bt:
            diff = (xa & zb) ^ (za & xb)
            if not diff.bit_count() & 1:
                continue
            c, x, z = bracket_bits(xa, za, xb, zb)  # type: ignore[misc]
            key = (x, z)
            acc[key] = acc.get(key, 0) + c * ca * cb
    return OperatorElement._raw(n, {PauliString(n, x, z): c for (x, z), c in acc.items() if c != 0})


def element_inner(a: OperatorElement, b: OperatorElement) -> Coefficient:
    """``(1/n) * sum_s c_s(a) c_s(b)``.

    Equals ``Re Tr(A B^dagger) / (n 2^n)`` on the dense matrices, which makes
    the cyclic sums of single strings unit-norm.
    """
    _same_n(a, b)
    small, big = (a, b) if len(a._terms) <= len(b._terms) else (b, a)
    total: Coefficient = Fraction(0)
    for s, c in small._terms.items():
        d = big._terms.get(s)
        if d is not None:
            total += c * d
    return total / a.n


def scale_add(alpha, a: OperatorElement, beta, b: OperatorElement) -> OperatorElement:
    """``alpha*a + beta*b`` with zero pruning."""
    _same_n(a, b)
    al = as_coefficient(alpha)
    be = as_coefficient(beta)
    acc: dict[PauliString, Coefficient] = {}
    if al != 0:
        for s, c in a._terms.items():
            acc[s] = al * c
    if be != 0:
        for s, c in b._terms.items():
            acc[s] = acc.get(s, 0) + be * c
    return OperatorElement._raw(a.n, {s: c for s, c in acc.items() if c != 0})


def linear_combination(pairs: Iterable[tuple[object, OperatorElement]], n: int) -> OperatorElement:
    """``sum coeff_i * element_i`` in a single pass."""
    acc: dict[PauliString, Coefficient] = {}
    for coeff, el in pairs:
        if el.n != n:
            raise StructuralError(f"length mismatch: {el.n} vs {n}")
        a = as_coefficient(coeff)
        if a == 0:
            continue
        for s, c in el._terms.items():
            acc[s] = acc.get(s, 0) + a * c
    _check_sites(n)
    return OperatorElement._raw(n, {s: c for s, c in acc.items() if c != 0})
