"""Exact rational Gaussian elimination over sparse vectors.

Vectors are dicts ``key -> Fraction``. Keys must be hashable; a ``sort_key``
callable fixes the column order, so pivots (the first nonzero column of
each row) and therefore every reduction are deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Hashable, Iterable, Mapping, Sequence

SparseVec = dict[Hashable, Fraction]


class Echelon:
    """Incrementally built reduced row-echelon basis.

    Every stored row has pivot coefficient 1 and no other row has a nonzero
    entry in its pivot column, so one pass over the rows reduces a vector
    completely.
    """

    def __init__(self, sort_key: Callable[[Hashable], object] = lambda k: k):
        self._key = sort_key
        self.rows: dict[Hashable, SparseVec] = {}

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivot_of(self, vec: Mapping[Hashable, Fraction]) -> Hashable:
        return min(vec, key=self._key)

    def reduce(self, vec: Mapping[Hashable, Fraction]) -> SparseVec:
        """Residual of ``vec`` after eliminating every stored pivot."""
        out = {k: Fraction(v) for k, v in vec.items() if v != 0}
        for p in [p for p in out if p in self.rows]:
            f = out.get(p)
            if not f:
                continue
            for k, v in self.rows[p].items():
                nv = out.get(k, 0) - f * v
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
        return out

    def add(self, vec: Mapping[Hashable, Fraction]) -> SparseVec | None:
        """Insert ``vec``; return its (unnormalised) residual if it was new, else None."""
        res = self.reduce(vec)
        if not res:
            return None
        self._insert(res)
        return res

    def contains(self, vec: Mapping[Hashable, Fraction]) -> bool:
        return not self.reduce(vec)

    def _insert(self, res: SparseVec) -> None:
        p = self.pivot_of(res)
        inv = 1 / res[p]
        row = {k: v * inv for k, v in res.items()}
        for q, other in self.rows.items():
            f = other.get(p)
            if f:
                for k, v in row.items():
                    nv = other.get(k, 0) - f * v
                    if nv:
                        other[k] = nv
                    else:
                        other.pop(k, None)
        self.rows[p] = row


def primitive(vec: Mapping[Hashable, Fraction], sort_key: Callable[[Hashable], object] = lambda k: k) -> SparseVec:
    """Scale ``vec`` to coprime integers with a positive leading (pivot) entry."""
    if not vec:
        return {}
    den = lcm(*(Fraction(v).denominator for v in vec.values()))
    ints = {k: int(Fraction(v) * den) for k, v in vec.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    lead = ints[min(ints, key=sort_key)]
    if lead < 0:
        g = -g
    return {k: Fraction(v // g) for k, v in ints.items()}


def rank(vectors: Iterable[Mapping[Hashable, Fraction]], sort_key: Callable[[Hashable], object] = lambda k: k) -> int:
    ech = Echelon(sort_key)
    for v in vectors:
        ech.add(v)
    return ech.rank


def nullspace(columns: Sequence[Mapping[Hashable, Fraction]], sort_key: Callable[[Hashable], object] = repr) -> list[list[Fraction]]:
    """Exact basis of ``{c : sum_j c_j * columns[j] = 0}``.

    Each column is a sparse vector; the result vectors have one entry per column.
    """
    m = len(columns)
    # Track, for every reduced row, which combination of input columns produced it.
    ech_rows: dict[Hashable, tuple[SparseVec, list[Fraction]]] = {}
    basis: list[list[Fraction]] = []
    for j, col in enumerate(columns):
        vec = {k: Fraction(v) for k, v in col.items() if v != 0}
        combo = [Fraction(0)] * m
        combo[j] = Fraction(1)
        for p, (row, rcombo) in ech_rows.items():
            f = vec.get(p)
            if not f:
                continue
            for k, v in row.items():
                nv = vec.get(k, 0) - f * v
                if nv:
                    vec[k] = nv
                else:
                    vec.pop(k, None)
            for i in range(m):
                if rcombo[i]:
                    combo[i] -= f * rcombo[i]
        if not vec:
            basis.append(combo)
            continue
        p = min(vec, key=sort_key)
        inv = 1 / vec[p]
        row = {k: v * inv for k, v in vec.items()}
        rcombo = [c * inv for c in combo]
        for q, (other, ocombo) in ech_rows.items():
            f = other.get(p)
            if f:
                for k, v in row.items():
                    nv = other.get(k, 0) - f * v
                    if nv:
                        other[k] = nv
                    else:
                        other.pop(k, None)
                for i in range(m):
                    if rcombo[i]:
                        ocombo[i] -= f * rcombo[i]
        ech_rows[p] = (row, rcombo)
    return basis
