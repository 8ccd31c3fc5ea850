"""The three-site example: Dicke sector, block structure, reachable states, tangle.

Block coordinates
-----------------
The symmetric sector is four-dimensional and factors as ``C^2 (x) C^2``;
coordinate ``2a + b`` holds the ``(a, b)`` entry. Both the ideal forms
``sigma (x) [[1, 1], [1, 1]]`` and ``sigma (x) [[1, -1], [-1, 1]]`` and
the center forms hold for two pairings of the Dicke vectors, ``(phi0,
phi1, phi2, phi3)`` and ``(phi0, phi1, phi3, phi2)``. Only the second makes
the closed-form tangle of the family ``(cos t, 0, sin t, 0)`` agree with
the three-tangle of the corresponding qubit state (the first pairing puts
the family in the W class, whose three-tangle vanishes identically). All
four-component vectors and matrices here therefore use
``BLOCK_ORDER = (0, 1, 3, 2)`` over the Dicke vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import InvarianceError, StructuralError
from .oracle import dense_generators, to_dense
from .pauli import OperatorElement
from .structure import Verdict, center, ideal, poly_recursive, poly_str, roots

LEAK_TOL = 1e-12
NORM_TOL = 1e-9
BLOCK_ORDER = (0, 1, 3, 2)
A_BLOCK = np.array([[1, 1], [1, 1]], dtype=complex)
B_BLOCK = np.array([[1, -1], [-1, 1]], dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
FAMILY_PEAK = 16 / (3 * math.sqrt(3))


@dataclass(frozen=True)
class DickeBasis:
    """``|000>, |111>``, and the normalised one- and two-excitation states."""

    phi: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]

    @property
    def frame(self) -> np.ndarray:
        """8 x 4 matrix whose columns are the Dicke vectors in block order."""
        return np.column_stack([self.phi[i] for i in BLOCK_ORDER])

    def gram(self) -> np.ndarray:
        m = np.column_stack(self.phi)
        return m.conj().T @ m


def _ket(bits: str) -> np.ndarray:
    v = np.zeros(8, dtype=complex)
    v[int(bits, 2)] = 1
    return v


def dicke_basis() -> DickeBasis:
    s = 1 / math.sqrt(3)
    return DickeBasis((
        _ket("000"),
        _ket("111"),
        s * (_ket("100") + _ket("010") + _ket("001")),
        s * (_ket("011") + _ket("101") + _ket("110")),
    ))


def cyclic_shift() -> np.ndarray:
    """Permutation matrix moving qubit j to j+1 (mod 3)."""
    p = np.zeros((8, 8))
    for i in range(8):
        b = format(i, "03b")
        p[int(b[-1] + b[:-1], 2), i] = 1
    return p


def project_to_dicke(a: OperatorElement, leak_tol: float = LEAK_TOL) -> np.ndarray:
    """4 x 4 matrix of ``a`` on the symmetric sector, in block coordinates.

    Raises :class:`InvarianceError` if ``a`` maps the sector outside itself.
    """
    if a.n != 3:
        raise StructuralError(f"the Dicke sector is defined here for n=3, got n={a.n}")
    v = dicke_basis().frame
    m = to_dense(a).matrix
    image = m @ v
    inside = v @ (v.conj().T @ image)
    leak = float(np.abs(image - inside).max())
    if leak > leak_tol:
        raise InvarianceError(f"operator leaks out of the Dicke sector (leakage {leak:.3e})")
    return v.conj().T @ image


def leakage(a: OperatorElement) -> float:
    v = dicke_basis().frame
    image = to_dense(a).matrix @ v
    return float(np.abs(image - v @ (v.conj().T @ image)).max())


def block_factor(m: np.ndarray, k: np.ndarray) -> tuple[np.ndarray, float]:
    """Best ``sigma`` with ``m ~ sigma (x) k`` and the max-abs residual."""
    t = m.reshape(2, 2, 2, 2)  # (a, b, c, d) for row 2a+b, column 2c+d
    sigma = np.einsum("abcd,bd->ac", t, k.conj()) / np.vdot(k, k)
    return sigma, float(np.abs(m - np.kron(sigma, k)).max())


# --------------------------------------------------------------------------
# reachable states


@dataclass(frozen=True)
class ReachableParams:
    theta: float = 0.0
    phi: float = 0.0
    zeta: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    mu: float = 0.0


@dataclass(frozen=True)
class SymmetricState:
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.shape != (4,):
            raise StructuralError(f"expected 4 amplitudes, got shape {a.shape}")
        if abs(np.linalg.norm(a) - 1) > NORM_TOL:
            raise StructuralError(f"state is not normalised (norm {np.linalg.norm(a):.12g})")
        object.__setattr__(self, "amplitudes", a)

    def embed(self) -> np.ndarray:
        """Eight-component qubit vector."""
        return dicke_basis().frame @ self.amplitudes


def reachable_state(p: ReachableParams) -> SymmetricState:
    """Half-weighted sum of a V1 and a V2 component with phases ``e^(+-i mu)``."""
    c, s = math.cos(p.theta), math.sin(p.theta)
    cg, sg = math.cos(p.gamma), math.sin(p.gamma)
    e = lambda t: complex(math.cos(t), math.sin(t))  # noqa: E731
    u = np.array([e(p.phi) * c, e(p.zeta) * s])
    w = np.array([e(p.alpha) * cg, e(p.beta) * sg])
    v = 0.5 * e(p.mu) * np.kron(u, [1, 1]) + 0.5 * e(-p.mu) * np.kron(w, [1, -1])
    return SymmetricState(v)


def v_split(state: SymmetricState | np.ndarray) -> tuple[float, float]:
    """Weights ``(r1, r2)`` of the components in ``V1 = C^2 (x) (1, 1)`` and ``V2 = C^2 (x) (1, -1)``."""
    v = state.amplitudes if isinstance(state, SymmetricState) else np.asarray(state)
    t = v.reshape(2, 2)
    return float(np.linalg.norm(t @ [1, 1]) / 2), float(np.linalg.norm(t @ [1, -1]) / 2)


def _split_projectors() -> tuple[np.ndarray, np.ndarray]:
    p1 = np.kron(np.eye(2), A_BLOCK / 2)
    p2 = np.kron(np.eye(2), B_BLOCK / 2)
    return p1, p2


def split_invariance_residual() -> float:
    """How far the projected generators are from preserving ``V1`` and ``V2``."""
    v = dicke_basis().frame
    worst = 0.0
    for g in dense_generators(3):
        m = v.conj().T @ g.matrix @ v
        for p in _split_projectors():
            worst = max(worst, float(np.abs((np.eye(4) - p) @ m @ p).max()))
    return worst


# --------------------------------------------------------------------------
# tangle


def tangle_family(theta: float) -> float:
    return FAMILY_PEAK * abs(math.cos(theta) * math.sin(theta) ** 3)


def tangle_general(psi: Sequence[complex]) -> float:
    """Three-tangle ``4 |Det(a)|`` from the Cayley hyperdeterminant.

    ``psi`` has eight amplitudes indexed by ``4 i + 2 j + k``.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (8,):
        raise StructuralError(f"expected 8 amplitudes, got shape {psi.shape}")
    if abs(np.linalg.norm(psi) - 1) > NORM_TOL:
        raise StructuralError(f"state is not normalised (norm {np.linalg.norm(psi):.12g})")
    a = psi.reshape(2, 2, 2)
    d1 = (a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2 + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
          + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2 + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2)
    d2 = (a[0, 0, 0] * a[1, 1, 1] * (a[0, 1, 1] * a[1, 0, 0] + a[1, 0, 1] * a[0, 1, 0] + a[1, 1, 0] * a[0, 0, 1])
          + a[0, 1, 1] * a[1, 0, 0] * (a[1, 0, 1] * a[0, 1, 0] + a[1, 1, 0] * a[0, 0, 1])
          + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1])
    d3 = (a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1]
          + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0])
    return float(4 * abs(d1 - 2 * d2 + 4 * d3))


def family_state(theta: float) -> SymmetricState:
    return SymmetricState(np.array([math.cos(theta), 0, math.sin(theta), 0], dtype=complex))


def _family_slope(theta: float) -> float:
    # derivative of cos t sin^3 t
    s, c = math.sin(theta), math.cos(theta)
    return s * s * (3 * c * c - s * s)


def max_tangle(grid: int = 10_000) -> tuple[float, float]:
    """Grid search on ``[0, pi)`` then a local refinement.

    Ties go to the smaller angle. The maximiser is reported in ``[0, pi/2]``
    (the function is even about ``pi/2``).
    """
    if grid < 1000:
        raise ValueError("grid must be >= 1000")
    ts = np.arange(grid) * (math.pi / grid)
    vals = FAMILY_PEAK * np.abs(np.cos(ts) * np.sin(ts) ** 3)
    k = int(np.argmax(vals))
    h = math.pi / grid
    lo, hi = ts[k] - h, ts[k] + h
    if _family_slope(lo) * _family_slope(hi) < 0:
        t = brentq(_family_slope, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    else:
        t = minimize_scalar(lambda x: -tangle_family(x), bounds=(lo, hi), method="bounded",
                            options={"xatol": 1e-12}).x
    t = math.fmod(t, math.pi)
    if t < 0:
        t += math.pi
    if t > math.pi / 2:
        t = math.pi - t
    return t, tangle_family(t)


def family_curve(points: int = 181) -> list[tuple[float, float]]:
    return [(t, tangle_family(t)) for t in np.linspace(0, math.pi, points)]


# --------------------------------------------------------------------------
# full suite


@dataclass
class Reach3Report:
    theta_star: float
    tau_star: float
    grid: int
    polynomial: str
    roots: list[float]
    checks: list[Verdict]
    curve: list[tuple[float, float]]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict[str, object]:
        return {
            "theta_star": self.theta_star,
            "tau_star": self.tau_star,
            "grid": self.grid,
            "polynomial": self.polynomial,
            "roots": self.roots,
            "checks": [c.to_json() for c in self.checks],
            "family_curve": [[t, v] for t, v in self.curve],
            "passed": self.passed,
        }


def run_suite(grid: int = 10_000, oracle_points: int = 10_000) -> Reach3Report:
    checks: list[Verdict] = []
    rs = roots(3)
    top = poly_recursive(3)[2]
    checks.append(Verdict("a_2 = λ^2-1", 0.0 if top == (-1, 0, 1) else 1.0, 0.0))
    checks.append(Verdict("roots are ±1", float(sum(abs(r.value - t) for r, t in zip(rs, (-1, 1)))), 0.0))

    db = dicke_basis()
    checks.append(Verdict("Dicke basis orthonormal", float(np.abs(db.gram() - np.eye(4)).max()), 1e-14))
    p = cyclic_shift()
    checks.append(Verdict("Dicke vectors cyclically invariant",
                          max(float(np.abs(p @ v - v).max()) for v in db.phi), 1e-14))

    leak, form = 0.0, 0.0
    for r in rs:
        k = A_BLOCK if r.value > 0 else B_BLOCK
        for el in ideal(r, 3).basis:
            leak = max(leak, leakage(el))
            form = max(form, block_factor(project_to_dicke(el), k)[1])
    checks.append(Verdict("ideal elements are σ⊗A (λ=1) and σ⊗B (λ=-1)", form, LEAK_TOL))
    c = center(3)
    m1, m2 = project_to_dicke(c.c1), project_to_dicke(c.c2)
    cres = max(float(np.abs(m1 - (-3j) * np.kron(np.eye(2), SIGMA_X)).max()),
               float(np.abs(m2 - 3j * np.eye(4)).max()))
    leak = max(leak, leakage(c.c1), leakage(c.c2))
    checks.append(Verdict("center is -3i 1⊗σx and 3i 1⊗1", cres, LEAK_TOL))
    checks.append(Verdict("Dicke-sector leakage", leak, LEAK_TOL))
    checks.append(Verdict("V1, V2 invariant under generators", split_invariance_residual(), LEAK_TOL))

    worst = 0.0
    for t in np.linspace(0, math.pi, oracle_points):
        worst = max(worst, abs(tangle_general(family_state(t).embed()) - tangle_family(t)))
    checks.append(Verdict("family formula vs hyperdeterminant", worst, 1e-10))

    t_star, tau_star = max_tangle(grid)
    checks.append(Verdict("τ* = 1", abs(tau_star - 1), 1e-9))
    checks.append(Verdict("|cos θ*| = 1/2", abs(abs(math.cos(t_star)) - 0.5), 1e-6))
    checks.append(Verdict("|sin θ*| = √3/2", abs(abs(math.sin(t_star)) - math.sqrt(3) / 2), 1e-6))
    return Reach3Report(t_star, tau_star, grid, poly_str(top), [r.value for r in rs], checks, family_curve())
