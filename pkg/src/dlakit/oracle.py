"""Dense-matrix brute force for small chains.

Everything here works on explicit ``2^n x 2^n`` complex matrices. Brackets
are matrix commutators; ranks come from singular values. The only thing
shared with the symbolic engine is the string type, so agreement between
the two is an independent check.

Pauli matrices follow the convention used throughout the package,
``sigma_y = [[0, i], [-i, 0]]`` (note the sign).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import RankInstabilityError, SizeCapError, StructuralError
from .pauli import OperatorElement, PauliString

DENSE_CAP = 8
CLOSURE_CAP = 6
RANK_TOL = 1e-9
ZERO_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
_SITE = {"1": I2, "I": I2, "X": SX, "Y": SY, "Z": SZ}


@dataclass(frozen=True)
class DenseOperator:
    n: int
    matrix: np.ndarray

    def __add__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(self.n, self.matrix + other.matrix)

    def __sub__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(self.n, self.matrix - other.matrix)

    def __mul__(self, scalar) -> "DenseOperator":
        return DenseOperator(self.n, self.matrix * scalar)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def skew_residual(self) -> float:
        return float(np.abs(self.matrix + self.matrix.conj().T).max())

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


def string_matrix(label: str) -> np.ndarray:
    """Kronecker product of site matrices, site 1 leftmost (no factor ``i``)."""
    return reduce(np.kron, (_SITE[ch] for ch in label))


def _cap(n: int, cap: int) -> None:
    if n > cap:
        raise SizeCapError(f"dense path is capped at n <= {cap}, got n={n}")


def to_dense(a: OperatorElement, cap: int = DENSE_CAP) -> DenseOperator:
    """``sum_s c_s * i * (kron of site matrices of s)``."""
    _cap(a.n, cap)
    m = np.zeros((2 ** a.n, 2 ** a.n), dtype=complex)
    for s, c in a.terms.items():
        m += float(c) * string_matrix(s.label)
    return DenseOperator(a.n, 1j * m)


def commutator(a: DenseOperator, b: DenseOperator) -> DenseOperator:
    if a.n != b.n:
        raise StructuralError(f"length mismatch: {a.n} vs {b.n}")
    return DenseOperator(a.n, a.matrix @ b.matrix - b.matrix @ a.matrix)


def _site_sum(n: int, words: Iterable[str]) -> DenseOperator:
    return DenseOperator(n, 1j * sum(string_matrix(w) for w in words))


def dense_generators(n: int) -> tuple[DenseOperator, DenseOperator]:
    """``(X, Z0)`` built straight from Kronecker products on the ring."""
    _cap(n, DENSE_CAP)
    if n < 2:
        raise StructuralError("need at least two sites")
    xs = ["1" * j + "X" + "1" * (n - j - 1) for j in range(n)]
    zz = []
    for j in range(n):
        w = ["1"] * n
        w[j] = w[(j + 1) % n] = "Z"
        zz.append("".join(w))
    return _site_sum(n, xs), _site_sum(n, dict.fromkeys(zz))


# --------------------------------------------------------------------------
# rank decisions


def _vec(m: np.ndarray) -> np.ndarray:
    # real vectorisation: the algebra is a real vector space
    return np.concatenate([m.real.ravel(), m.imag.ravel()])


@dataclass(frozen=True)
class RankDecision:
    rank: int
    singular_values: tuple[float, ...]  # relative to the largest
    tol: float

    @property
    def min_kept(self) -> float:
        return self.singular_values[self.rank - 1] if self.rank else 0.0

    @property
    def max_dropped(self) -> float:
        return self.singular_values[self.rank] if self.rank < len(self.singular_values) else 0.0

    @property
    def gap(self) -> float:
        """Ratio of the smallest retained to the largest discarded singular value."""
        kept = self.singular_values[: self.rank]
        dropped = self.singular_values[self.rank:]
        if not dropped:
            return float("inf")
        return kept[-1] / dropped[0] if dropped[0] > 0 else float("inf")


def decide_rank(rows: np.ndarray, tol: float = RANK_TOL) -> RankDecision:
    """Numerical rank with a relative cutoff and a spectral-gap assertion.

    Raises :class:`RankInstabilityError` when a singular value lands in the
    band ``[tol, 10 tol)`` (relative), where keep/drop is not trustworthy.
    """
    if rows.size == 0:
        return RankDecision(0, (), tol)
    s = np.linalg.svd(rows, compute_uv=False)
    if s[0] == 0:
        return RankDecision(0, tuple(0.0 for _ in s), tol)
    rel = s / s[0]
    murky = rel[(rel >= tol) & (rel < 10 * tol)]
    if murky.size:
        raise RankInstabilityError(
            f"singular values {murky.tolist()} fall within [{tol:g}, {10 * tol:g}); rank is ambiguous"
        )
    return RankDecision(int((rel >= tol).sum()), tuple(float(x) for x in rel), tol)


# --------------------------------------------------------------------------
# closure and commutant


@dataclass(frozen=True)
class DenseClosure:
    n: int
    basis: tuple[DenseOperator, ...]
    decision: RankDecision

    @property
    def dimension(self) -> int:
        return self.decision.rank


def dense_closure(gens: Sequence[DenseOperator], tol: float = RANK_TOL) -> DenseClosure:
    """Real Lie closure of ``gens`` by repeated commutators.

    Candidates are admitted by Gram-Schmidt against an orthonormal basis of
    the current span. The final dimension is decided by an SVD over every
    admitted element together with all their pairwise commutators, so a
    missed direction would show up as extra rank.
    """
    n = gens[0].n
    _cap(n, CLOSURE_CAP)
    admit_tol = 1e-6
    q: list[np.ndarray] = []  # orthonormal real vectors
    elems: list[DenseOperator] = []

    def offer(op: DenseOperator) -> bool:
        v = _vec(op.matrix)
        size = np.linalg.norm(v)
        if size <= ZERO_TOL:  # operands have unit norm; this is rounding noise
            return False
        v = v / size
        for _ in range(2):  # re-orthogonalise once for stability
            for b in q:
                v = v - (b @ v) * b
        r = np.linalg.norm(v)
        if r <= admit_tol:
            return False
        q.append(v / r)
        elems.append(DenseOperator(n, op.matrix / size))
        return True

    for g in gens:
        offer(g)
    done = 0
    while done < len(elems):
        a = elems[done]
        for b in list(elems[: done]) + [a]:
            offer(commutator(a, b))
        done += 1

    rows = [_vec(e.matrix) for e in elems]
    for i in range(len(elems)):
        for j in range(i + 1, len(elems)):
            c = commutator(elems[i], elems[j]).matrix
            size = np.linalg.norm(c)
            if size > ZERO_TOL:
                rows.append(_vec(c) / size)
    decision = decide_rank(np.array(rows), tol)
    return DenseClosure(n, tuple(elems), decision)


@dataclass(frozen=True)
class DenseCommutant:
    n: int
    basis: tuple[DenseOperator, ...]
    decision: RankDecision

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def fit_residual(self, op: DenseOperator) -> float:
        """Relative least-squares residual of ``op`` against the commutant basis."""
        a = np.array([_vec(b.matrix) for b in self.basis]).T
        y = _vec(op.matrix)
        coef, *_ = np.linalg.lstsq(a, y, rcond=None)
        return float(np.linalg.norm(a @ coef - y) / np.linalg.norm(y))


def dense_commutant_dim(gens: Sequence[DenseOperator], tol: float = RANK_TOL,
                        closure: DenseClosure | None = None) -> DenseCommutant:
    """Elements of the closure span commuting with every generator."""
    closure = closure or dense_closure(gens, tol)
    elems = closure.basis
    cols = np.array([np.concatenate([_vec(commutator(e, g).matrix) for g in gens]) for e in elems]).T
    # the columns may be tiny for central elements; scale by the largest
    scale = np.abs(cols).max() or 1.0
    _, s, vt = np.linalg.svd(cols / scale, full_matrices=False)
    full = np.zeros(len(elems))
    full[: len(s)] = s
    rel = full / (full.max() or 1.0)
    murky = rel[(rel >= tol) & (rel < 10 * tol)]
    if murky.size:
        raise RankInstabilityError(f"commutant singular values {murky.tolist()} are ambiguous")
    null = vt[rel < tol]
    basis = tuple(DenseOperator(closure.n, sum(c * e.matrix for c, e in zip(v, elems))) for v in null)
    return DenseCommutant(closure.n, basis, RankDecision(int((rel >= tol).sum()), tuple(sorted(rel, reverse=True)), tol))


# --------------------------------------------------------------------------
# re-checking symbolic claims


@dataclass(frozen=True)
class DenseCheck:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol

    def to_json(self) -> dict[str, object]:
        return {"check": self.name, "residual": self.residual, "tol": self.tol, "passed": self.passed}


def _resid(a: DenseOperator, b: DenseOperator) -> float:
    return float(np.linalg.norm(a.matrix - b.matrix))


def dense_recheck(n: int, tol: float = 1e-10) -> list[DenseCheck]:
    """Re-verify the closed-form claims as matrices (Frobenius residuals).

    Symbolic *elements* are consumed as claims; every bracket is a matrix
    commutator.
    """
    from .closure import named_basis, table_closed_form
    from .structure import center, ideal, roots

    _cap(n, CLOSURE_CAP)
    x, z0 = dense_generators(n)
    basis = named_basis(n)
    dense = {k: to_dense(v) for k, v in basis.items()}
    out: list[DenseCheck] = []

    def combo(coeffs) -> DenseOperator:
        acc = DenseOperator(n, np.zeros_like(x.matrix))
        for k, c in coeffs.items():
            acc = acc + dense[k] * float(c)
        return acc

    gens = {"X": x, "Z0": z0}
    out.append(DenseCheck("named X, Z0 equal the generators",
                          max(_resid(dense["X"], x), _resid(dense["Z0"], z0)), tol))
    worst = 0.0
    for name, row in table_closed_form(n).items():
        for gname, rhs in row.items():
            worst = max(worst, _resid(commutator(dense[name], gens[gname]), combo(rhs)))
    out.append(DenseCheck("commutator table", worst, tol))

    cntr = center(n)
    cres = max(commutator(to_dense(c), g).norm() for c in cntr.elements for g in (x, z0))
    out.append(DenseCheck("center commutes with generators", cres, tol))

    for r in roots(n):
        I = ideal(r, n, basis)
        xh, yh, zh = to_dense(I.xhat), to_dense(I.yhat), to_dense(I.zhat)
        lam = I.lam
        rel = [
            (commutator(xh, x), zh * (2 * lam)),
            (commutator(yh, x), zh * -4),
            (commutator(zh, x), yh * 4),
            (commutator(xh, z0), zh * -4),
            (commutator(yh, z0), zh * (2 * lam)),
            (commutator(zh, z0), xh * 4),
        ]
        out.append(DenseCheck(f"λ={lam:.12g}: ideal brackets", max(_resid(a, b) for a, b in rel), tol))
        sx, sy, sz = to_dense(I.sx), to_dense(I.sy), to_dense(I.sz)
        su2 = max(_resid(commutator(sx, sy), sz), _resid(commutator(sy, sz), sx), _resid(commutator(sz, sx), sy))
        out.append(DenseCheck(f"λ={lam:.12g}: su(2) relations", su2, tol))
    return out
