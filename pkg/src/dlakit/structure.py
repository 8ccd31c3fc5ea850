"""Center, simple ideals and the full decomposition of the algebra.

The ideals are indexed by the roots of ``a_{n-1}``, where
``a_{-1} = 0, a_0 = 1, a_k = lam * a_{k-1} - a_{k-2}``. Those roots are the
eigenvalues of the 0/1 tridiagonal matrix ``A_{n-1}``; they are found with a
symmetric tridiagonal eigensolver (bisection), never from polynomial
coefficients.

Integer roots (only -1, 0, 1 are possible: ``a_{n-1}`` is monic with integer
coefficients and all roots lie in (-2, 2)) are detected exactly, and their
ideals are built and verified in rational arithmetic with zero tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .closure import DlaBasis, GeneratorSet, generators, named_basis, pmap
from .errors import InconsistencyError, StructuralError
from .linalg import nullspace
from .pauli import (
    Coefficient,
    OperatorElement,
    _check_sites,
    element_bracket,
    element_inner,
    linear_combination,
)
from .symmetry import invariant_bracket, to_coordinates

Poly = tuple[int, ...]  # integer coefficients, lowest degree first

DEFAULT_TOL = 1e-12
FLOAT_TOL = 1e-10
LAMBDA_GUARD = 1e-9


# --------------------------------------------------------------------------
# polynomials


def _trim(p: list[int]) -> Poly:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly_sub(p: Poly, q: Poly) -> Poly:
    m = max(len(p), len(q))
    return _trim([(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(m)])


def poly_shift(p: Poly) -> Poly:
    """Multiply by lambda."""
    return _trim([0, *p]) if p != (0,) else (0,)


def poly_eval(p: Poly, lam):
    acc = 0 * lam
    for c in reversed(p):
        acc = acc * lam + c
    return acc


def poly_str(p: Poly, var: str = "λ") -> str:
    parts = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if not c:
            continue
        mono = "" if k == 0 else var if k == 1 else f"{var}^{k}"
        coef = str(abs(c)) if (abs(c) != 1 or k == 0) else ""
        parts.append(("-" if c < 0 else "+") + coef + mono)
    if not parts:
        return "0"
    s = "".join(parts)
    return s[1:] if s[0] == "+" else s


@dataclass(frozen=True)
class PolySequence:
    """``a_{-1} .. a_{n-1}`` as integer polynomials in lambda."""

    n: int
    polys: dict[int, Poly]

    def __getitem__(self, k: int) -> Poly:
        return self.polys[k]

    def values(self, lam) -> list:
        """``[a_0(lam), ..., a_{n-2}(lam)]``."""
        return [poly_eval(self.polys[k], lam) for k in range(self.n - 1)]


def poly_recursive(n: int) -> PolySequence:
    _check_sites(n)
    polys: dict[int, Poly] = {-1: (0,), 0: (1,)}
    for k in range(1, n):
        polys[k] = poly_sub(poly_shift(polys[k - 1]), polys[k - 2])
    return PolySequence(n, polys)


def poly_explicit(k: int) -> Poly:
    """Closed form ``a_k = sum_j (-1)^j C(k-j, j) lam^(k-2j)``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    p = [0] * (k + 1)
    for j in range(k // 2 + 1):
        p[k - 2 * j] = (-1) ** j * comb(k - j, j)
    return _trim(p)


def tridiagonal(k: int) -> np.ndarray:
    """``k x k`` matrix with ones on the first off-diagonals, zeros elsewhere."""
    if k < 1:
        raise ValueError("k must be >= 1")
    off = np.ones(k - 1, dtype=int)
    return np.diag(off, 1) + np.diag(off, -1)


# --------------------------------------------------------------------------
# roots


@dataclass(frozen=True)
class Root:
    value: float
    exact: Fraction | None = None

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def scalar(self):
        return self.exact if self.exact is not None else self.value


@dataclass(frozen=True)
class RootSet:
    n: int
    roots: tuple[Root, ...]
    tol: float

    @property
    def values(self) -> list[float]:
        return [r.value for r in self.roots]

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def _integer_roots(p: Poly) -> dict[int, Fraction]:
    # a monic integer polynomial has only integer rational roots; |root| < 2
    return {r: Fraction(r) for r in (-1, 0, 1) if poly_eval(p, r) == 0}


def roots(n: int, tol: float = DEFAULT_TOL) -> RootSet:
    """Sorted roots of ``a_{n-1}``, as eigenvalues of ``A_{n-1}``.

    Raises :class:`InconsistencyError` if any structural property of the
    spectrum fails (count, distinctness, the bound ``|lam| < 2``, symmetry
    under negation, zero present iff ``n`` even, ``a_{n-1}(lam) ~ 0``).
    """
    _check_sites(n)
    k = n - 1
    # Sturm-sequence bisection: accurate to ~1 ulp, which the floating
    # identity checks at larger n rely on (the QL driver is ~10 ulp off).
    vals = np.sort(eigh_tridiagonal(np.zeros(k), np.ones(k - 1), eigvals_only=True, lapack_driver="stebz"))
    top = poly_recursive(n)[n - 1]
    exact = _integer_roots(top)
    out = []
    for v in vals:
        hit = next((e for r, e in exact.items() if abs(v - r) <= tol * 10), None)
        out.append(Root(float(hit) if hit is not None else float(v), hit))
    rs = RootSet(n, tuple(out), tol)
    _check_roots(rs, top)
    return rs


def _check_roots(rs: RootSet, top: Poly) -> None:
    n, tol, v = rs.n, rs.tol, rs.values
    problems = []
    if len(v) != n - 1:
        problems.append(f"expected {n - 1} roots, got {len(v)}")
    gaps = np.diff(v)
    if len(gaps) and gaps.min() <= tol:
        problems.append(f"roots not distinct (min gap {gaps.min():.3e})")
    if max(abs(x) for x in v) >= 2:
        problems.append("root outside (-2, 2)")
    if max(abs(a + b) for a, b in zip(v, reversed(v))) > 10 * tol:
        problems.append("roots not symmetric under negation")
    has_zero = any(abs(x) <= tol for x in v)
    if has_zero != (n % 2 == 0):
        problems.append("zero root presence does not match parity of n")
    worst = max(abs(poly_eval(top, x)) for x in v)
    if worst > 1e-9:
        problems.append(f"a_(n-1) not ~0 at a reported root ({worst:.3e})")
    if problems:
        raise InconsistencyError("; ".join(problems))


def eigvector_check(lam, n: int) -> float:
    """Max-norm of ``A_{n-1} a - lam a`` with ``a = (a_0(lam), ..., a_{n-2}(lam))``."""
    lam = lam.scalar() if isinstance(lam, Root) else lam
    a = poly_recursive(n).values(lam)
    k = n - 1
    worst = 0
    for i in range(k):
        s = (a[i - 1] if i > 0 else 0) + (a[i + 1] if i + 1 < k else 0)
        worst = max(worst, abs(s - lam * a[i]))
    return float(worst)


# --------------------------------------------------------------------------
# center


@dataclass(frozen=True)
class CenterBasis:
    n: int
    c1: OperatorElement
    c2: OperatorElement
    solutions: tuple[dict[str, Fraction], ...] = ()

    @property
    def elements(self) -> list[OperatorElement]:
        return [self.c1, self.c2]


def center_coefficients(n: int) -> tuple[dict[str, int], dict[str, int]]:
    """Named-basis coefficients of the closed-form center pair."""
    _check_sites(n)
    c1: dict[str, int] = {"X": -1}
    c2: dict[str, int] = {}
    if n % 2:
        c2["XX"] = 1
        odd_top, even_top = n - 2, n - 3
    else:
        c1["XX"] = 1
        odd_top, even_top = n - 3, n - 2
    for k in range(1, odd_top + 1, 2):
        c1[f"Y{k}"] = c1[f"Z{k}"] = 1
    for k in range(0, even_top + 1, 2):
        c2[f"Y{k}"] = c2[f"Z{k}"] = 1
    return c1, c2


def center(n: int) -> CenterBasis:
    basis = named_basis(n)
    c1, c2 = center_coefficients(n)
    return CenterBasis(n, basis.combine(c1), basis.combine(c2))


def center_by_solving(n: int) -> CenterBasis:
    """Solve ``[c, X] = [c, Z^0] = 0`` over the named basis in exact arithmetic."""
    basis = named_basis(n)
    g = generators(n)
    cols = []
    for name in basis.names:
        e = basis[name]
        col = {("X", s): c for s, c in element_bracket(e, g.X).terms.items()}
        col.update({("Z0", s): c for s, c in element_bracket(e, g.Z0).terms.items()})
        cols.append(col)
    null = nullspace(cols, sort_key=lambda k: (k[0], k[1].sort_key()))
    if len(null) != 2:
        raise InconsistencyError(f"commutant has dimension {len(null)}, expected 2")
    sols = tuple({name: c for name, c in zip(basis.names, vec) if c} for vec in null)
    c1, c2 = (basis.combine(s) for s in sols)
    return CenterBasis(n, c1, c2, sols)


# --------------------------------------------------------------------------
# ideals


def _bracket(a: OperatorElement, b: OperatorElement) -> OperatorElement:
    # both arguments are cyclically invariant here
    return invariant_bracket(to_coordinates(a), b).to_element()


def _norm(a: OperatorElement) -> float:
    sq = element_inner(a, a)
    return math.sqrt(float(sq)) if sq else 0.0


@dataclass(frozen=True)
class Ideal:
    """Simple ideal for one root, with its raw and su(2)-normalised frames."""

    n: int
    lam: float
    lam_exact: Fraction | None
    a: tuple  # a_0 .. a_{n-2} at the root
    xhat: OperatorElement
    yhat: OperatorElement
    zhat: OperatorElement
    ahat: OperatorElement
    bhat: OperatorElement
    chat: OperatorElement
    dhat: OperatorElement
    sx_tilde: OperatorElement
    sy_tilde: OperatorElement
    norm_sx2: Coefficient
    norm_sy2: Coefficient
    sx: OperatorElement
    sy: OperatorElement
    sz: OperatorElement

    @property
    def exact(self) -> bool:
        return self.lam_exact is not None

    @property
    def scalar(self):
        return self.lam_exact if self.lam_exact is not None else self.lam

    @property
    def basis(self) -> list[OperatorElement]:
        return [self.xhat, self.yhat, self.zhat]

    def scale_factors(self) -> tuple[float, float, float]:
        """Signed multipliers taking ``(S~x, S~y, Zhat)`` to ``(Sx, Sy, Sz)``."""
        nx, ny = float(self.norm_sx2), float(self.norm_sy2)
        root = math.sqrt(2 - self.lam)
        return (
            -1 / (2 * root * math.sqrt(nx * ny)),
            1 / (2 * root * ny),
            1 / (2 * math.sqrt(nx * ny)),
        )


def ideal(lam, n: int, basis: DlaBasis | None = None) -> Ideal:
    """Build the ideal for root ``lam`` (a :class:`Root`, Fraction, int or float)."""
    _check_sites(n)
    if isinstance(lam, Root):
        lam_exact, lam_f = lam.exact, lam.value
    elif isinstance(lam, (int, Fraction)):
        lam_exact, lam_f = Fraction(lam), float(lam)
    else:
        lam_exact, lam_f = None, float(lam)
    if not -2 < lam_f < 2 - LAMBDA_GUARD:
        raise StructuralError(f"lambda={lam_f} outside (-2, 2)")
    basis = basis or named_basis(n)
    lam_s = lam_exact if lam_exact is not None else lam_f
    a = poly_recursive(n).values(lam_s)
    top = n - 2

    def comb_(pairs):
        return basis.combine(_merge(pairs))

    xh = [(a[0], "X"), (a[0], "Z1"), (a[top], "XX"), (-a[top], f"Y{n - 3}")]
    for k in range(1, n - 2):
        xh += [(a[k], f"Z{k + 1}"), (-a[k], f"Y{k - 1}")]
    yh = []
    for k in range(n - 1):
        yh += [(a[k], f"Y{k}"), (-a[k], f"Z{k}")]
    zh = [(a[k], f"YZ{k}") for k in range(n - 1)]
    xhat, yhat, zhat = comb_(xh), comb_(yh), comb_(zh)

    ahat = comb_([(a[0], "X"), (a[top], "XX")])
    chat = comb_([(a[top], f"Y{top}"), (-a[0], "Z0")])
    bhat = comb_([(a[k - 1], f"Z{k}") for k in range(1, n - 1)] + [(-a[k + 1], f"Y{k}") for k in range(0, n - 2)])
    dhat = comb_([(a[k], f"Y{k}") for k in range(0, n - 2)] + [(-a[k], f"Z{k}") for k in range(1, n - 1)])

    sx_t = xhat + yhat
    sy_t = xhat - yhat
    ext = [0 * a[0]] + list(a) + [0 * a[0]]  # a_{-1} .. a_{n-1}, with a_{n-1} := 0
    nx = 2 * sum((ext[i + 1] - ext[i]) ** 2 for i in range(n))
    ny = 2 * sum((ext[i + 1] + ext[i]) ** 2 for i in range(n))

    proto = Ideal(n, lam_f, lam_exact, tuple(a), xhat, yhat, zhat, ahat, bhat, chat, dhat,
                  sx_t, sy_t, nx, ny, sx_t, sy_t, zhat)
    fx, fy, fz = proto.scale_factors()
    return Ideal(n, lam_f, lam_exact, tuple(a), xhat, yhat, zhat, ahat, bhat, chat, dhat,
                 sx_t, sy_t, nx, ny, sx_t.to_float() * fx, sy_t.to_float() * fy, zhat.to_float() * fz)


def _merge(pairs) -> dict[str, Coefficient]:
    out: dict[str, Coefficient] = {}
    for c, name in pairs:
        out[name] = out.get(name, 0) + c
    return out


@dataclass(frozen=True)
class Verdict:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol

    def to_json(self) -> dict[str, object]:
        return {"check": self.name, "residual": self.residual, "tol": self.tol, "passed": self.passed}


@dataclass
class IdealVerdict:
    lam: float
    exact: bool
    checks: list[Verdict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.checks)

    def __getitem__(self, name: str) -> Verdict:
        for v in self.checks:
            if v.name == name:
                return v
        raise KeyError(name)

    def failures(self) -> list[Verdict]:
        return [v for v in self.checks if not v.passed]


def verify_ideal(I: Ideal, g: GeneratorSet | None = None, cntr: CenterBasis | None = None,
                 tol: float = FLOAT_TOL) -> IdealVerdict:
    """Check the defining identities of one ideal.

    Residuals are norms under :func:`element_inner`. On the exact path
    (integer root) tolerance is zero and the su(2) relations are checked as
    rational identities between the unnormalised frame elements, using
    ``[Sa, Sb] - Sc = f_c * (rho * [S~a, S~b] - S~c)`` with rational ``rho``.
    """
    g = g or generators(I.n)
    cntr = cntr or center(I.n)
    lam = I.scalar
    t = 0.0 if I.exact else tol
    out = IdealVerdict(I.lam, I.exact)

    def add(name: str, r: OperatorElement, scale: float = 1.0) -> None:
        out.checks.append(Verdict(name, abs(scale) * _norm(r), t))

    X, Z0 = g.X, g.Z0
    xh, yh, zh = I.xhat, I.yhat, I.zhat
    add("[Xhat,X]=2λZhat", _bracket(xh, X) - zh * (2 * lam))
    add("[Yhat,X]=-4Zhat", _bracket(yh, X) + zh * 4)
    add("[Zhat,X]=4Yhat", _bracket(zh, X) - yh * 4)
    add("[Xhat,Z0]=-4Zhat", _bracket(xh, Z0) + zh * 4)
    add("[Yhat,Z0]=2λZhat", _bracket(yh, Z0) - zh * (2 * lam))
    add("[Zhat,Z0]=4Xhat", _bracket(zh, Z0) - xh * 4)

    add("Xhat=Ahat+Bhat", xh - (I.ahat + I.bhat))
    add("Yhat=Chat+Dhat", yh - (I.chat + I.dhat))

    nx, ny = I.norm_sx2, I.norm_sy2
    sxt, syt = I.sx_tilde, I.sy_tilde
    out.checks.append(Verdict("|S~x|^2 formula", abs(float(element_inner(sxt, sxt) - nx)), t))
    out.checks.append(Verdict("|S~y|^2 formula", abs(float(element_inner(syt, syt) - ny)), t))

    b_xy = _bracket(sxt, syt)
    b_yz = _bracket(syt, zh)
    b_zx = _bracket(zh, sxt)
    add("[S~x,S~y]=-(4-2λ)|S~y|^2 Zhat", b_xy + zh * ((4 - 2 * lam) * ny))
    add("[S~y,Zhat]=-2|S~y|^2 S~x", b_yz + sxt * (2 * ny))
    add("[Zhat,S~x]=-2|S~x|^2 S~y", b_zx + syt * (2 * nx))

    fx, fy, fz = I.scale_factors()
    if I.exact:
        add("[Sx,Sy]=Sz", b_xy * (Fraction(-1) / (2 * (2 - lam) * ny)) - zh, fz)
        add("[Sy,Sz]=Sx", b_yz * (Fraction(-1) / (2 * ny)) - sxt, fx)
        add("[Sz,Sx]=Sy", b_zx * (Fraction(-1) / (2 * nx)) - syt, fy)
    else:
        add("[Sx,Sy]=Sz", _bracket(I.sx, I.sy) - I.sz)
        add("[Sy,Sz]=Sx", _bracket(I.sy, I.sz) - I.sx)
        add("[Sz,Sx]=Sy", _bracket(I.sz, I.sx) - I.sy)

    worst = 0.0
    for e in I.basis:
        for c in cntr.elements:
            worst = max(worst, abs(float(element_inner(e, c))))
    out.checks.append(Verdict("orthogonal to center", worst, t))
    return out


# --------------------------------------------------------------------------
# decomposition


@dataclass
class StructureReport:
    n: int
    center: CenterBasis
    roots: RootSet
    ideals: list[Ideal]
    ideal_verdicts: list[IdealVerdict]
    verdicts: list[Verdict]

    @property
    def dimension(self) -> int:
        return 2 + 3 * len(self.ideals)

    @property
    def all_passed(self) -> bool:
        return all(v.passed for v in self.verdicts) and all(v.passed for v in self.ideal_verdicts)

    def to_json(self) -> dict[str, object]:
        ideals = []
        for I, v in zip(self.ideals, self.ideal_verdicts):
            ideals.append({
                "lambda": I.lam,
                "exact": I.exact,
                "xhat": I.xhat.to_records(),
                "yhat": I.yhat.to_records(),
                "zhat": I.zhat.to_records(),
                "sx": I.sx.to_records(),
                "sy": I.sy.to_records(),
                "sz": I.sz.to_records(),
                "norms": {"sx_tilde_sq": _num(I.norm_sx2), "sy_tilde_sq": _num(I.norm_sy2)},
                "verdicts": [c.to_json() for c in v.checks],
                "passed": v.passed,
            })
        return {
            "n": self.n,
            "roots": self.roots.values,
            "center": [self.center.c1.to_records(), self.center.c2.to_records()],
            "ideals": ideals,
            "checks": [v.to_json() for v in self.verdicts],
            "dimension": self.dimension,
            "all_passed": self.all_passed,
        }


def _num(c):
    return str(c) if isinstance(c, Fraction) else c


def decompose(n: int, tol: float = DEFAULT_TOL) -> StructureReport:
    """Center plus one ideal per root, with every cross-check recorded."""
    basis = named_basis(n)
    g = generators(n)
    cntr = center(n)
    rs = roots(n, tol)
    ideals = [ideal(r, n, basis) for r in rs]
    ivs = pmap(lambda I: verify_ideal(I, g, cntr), ideals)
    all_exact = all(I.exact for I in ideals)
    t = 0.0 if all_exact else FLOAT_TOL

    checks: list[Verdict] = []
    cr = max(_norm(element_bracket(c, x)) for c in cntr.elements for x in g.gens)
    checks.append(Verdict("center commutes with generators", cr, 0.0))

    comm = 0.0
    for i in range(len(ideals)):
        for j in range(i + 1, len(ideals)):
            for u in ideals[i].basis:
                for v in ideals[j].basis:
                    comm = max(comm, _norm(_bracket(u, v)))
    checks.append(Verdict("distinct ideals commute", comm, t))

    blocks = [cntr.elements] + [I.basis for I in ideals]
    orth = 0.0
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            for u in blocks[i]:
                for v in blocks[j]:
                    orth = max(orth, abs(float(element_inner(u, v))))
    checks.append(Verdict("blocks mutually orthogonal", orth, t))

    rank, gap = _block_rank(basis, [e for b in blocks for e in b])
    checks.append(Verdict("direct sum has full rank 3n-1", float(abs(rank - (3 * n - 1))), 0.0))
    checks.append(Verdict("rank gap (min relative singular value)", 0.0 if gap > 1e-9 else 1.0, 0.0))
    checks.append(Verdict("dimension 2 + 3(n-1) = 3n-1", float(abs(2 + 3 * len(ideals) - (3 * n - 1))), 0.0))
    return StructureReport(n, cntr, rs, ideals, ivs, checks)


def _block_rank(basis: DlaBasis, elements: Sequence[OperatorElement]) -> tuple[int, float]:
    rows = []
    for e in elements:
        coords = basis.expand(e, exact=e.is_exact)
        rows.append([float(coords.get(k, 0)) for k in basis.names])
    s = np.linalg.svd(np.array(rows), compute_uv=False)
    rel = s / s[0]
    rank = int((rel > 1e-9).sum())
    return rank, float(rel[-1])
