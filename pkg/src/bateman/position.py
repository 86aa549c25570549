"""Position representation: Hermite-Gaussian eigenfunctions and friends.

Internally everything runs in the dimensionless variable
``xi = sqrt(m*omega/hbar) * x``; physical lengths are accepted at the
function boundaries. Functions are held as coefficient maps over the
product basis psi_{n1}(xi1) psi_{n2}(xi2), on which the ladder operators
act exactly through the Hermite recurrences. Grids and finite differences
appear only as cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.polynomial import polynomial as poly

from .errors import ConvergenceError, QuadratureError
from .model import PhysParams, SignBranch, ThetaLike
from .states import eigenvalue_ft, pair_amplitudes

PI_QUARTER = math.pi**-0.25


# --------------------------------------------------------------------------
# Hermite polynomials and functions


def hermite(n: int, xi):
    """Physicists' Hermite polynomial H_n and its derivative at ``xi``.

    Three-term recurrence H_{k+1} = 2 xi H_k - 2k H_{k-1};
    the derivative is H_n' = 2n H_{n-1}.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    xi = np.asarray(xi, dtype=float)
    prev = np.zeros_like(xi)
    cur = np.ones_like(xi)
    for k in range(n):
        prev, cur = cur, 2 * xi * cur - 2 * k * prev
    deriv = 2 * n * prev
    if cur.ndim == 0:
        return float(cur), float(deriv)
    return cur, deriv


def orthonormal_hermite(n_max: int, xi) -> np.ndarray:
    """p_0..p_{n_max} at ``xi``, orthonormal under the weight exp(-xi^2).

    Shape ``(n_max + 1,) + xi.shape``. Uses the normalised recurrence, which
    stays finite far beyond where H_n itself overflows.
    """
    xi = np.asarray(xi, dtype=float)
    out = np.empty((n_max + 1,) + xi.shape)
    out[0] = PI_QUARTER
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * xi * PI_QUARTER
    for k in range(1, n_max):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * xi * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def hermite_functions(n_max: int, xi) -> np.ndarray:
    """Normalised Hermite functions psi_n(xi) = p_n(xi) exp(-xi^2/2)."""
    xi = np.asarray(xi, dtype=float)
    return orthonormal_hermite(n_max, xi) * np.exp(-0.5 * xi**2)


# --------------------------------------------------------------------------
# Eigenfunctions


@dataclass(frozen=True)
class WavefunctionSpec:
    n1: int
    n2: int
    p: PhysParams = field(default_factory=PhysParams)

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError(f"labels must be non-negative, got ({self.n1}, {self.n2})")

    @property
    def label(self) -> tuple[int, int]:
        return (self.n1, self.n2)


def to_xi(x, p: PhysParams):
    return np.sqrt(p.inverse_length_sq) * np.asarray(x, dtype=float)


def eigenfunction(spec: WavefunctionSpec, x1, x2):
    """Normalised product eigenfunction at physical coordinates.

    [2^(n1+n2) n1! n2!]^(-1/2) (m w / pi hbar)^(1/2)
    H_n1(xi1) H_n2(xi2) exp(-(xi1^2 + xi2^2) / 2).
    The same function is the unbarred <x1, x2|n1, n2> and the barred
    <<x1, x2|n1, n2>>.
    """
    alpha = spec.p.inverse_length_sq
    xi1, xi2 = to_xi(x1, spec.p), to_xi(x2, spec.p)
    f1 = hermite_functions(spec.n1, xi1)[spec.n1]
    f2 = hermite_functions(spec.n2, xi2)[spec.n2]
    value = math.sqrt(alpha) * f1 * f2
    return float(value) if np.ndim(value) == 0 else value


# --------------------------------------------------------------------------
# Quadrature


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for integrals of f(xi) exp(-xi^2) over the line."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    def integrate(self, values) -> float:
        return np.tensordot(self.weights, values, axes=(0, 0))


def gauss_hermite_rule(k: int, max_iter: int = 20) -> QuadratureRule:
    """k-point Gauss-Hermite rule.

    Seeds from the eigenvalues of the symmetric Jacobi matrix, polished by
    Newton on the orthonormal p_k (p_k' = sqrt(2k) p_{k-1}); weights are
    1 / (k p_{k-1}(x)^2).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    off = np.sqrt(np.arange(1, k) / 2.0)
    x = np.linalg.eigvalsh(np.diag(off, 1) + np.diag(off, -1))
    for _ in range(max_iter):
        p = orthonormal_hermite(k, x)
        step = p[k] / (math.sqrt(2.0 * k) * p[k - 1])
        x = x - step
        if np.all(np.abs(step) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(x))):
            break
    else:
        raise ConvergenceError(f"Newton polish of Hermite roots did not converge for k={k}")
    p_prev = orthonormal_hermite(k - 1, x)[k - 1]
    w = 1.0 / (k * p_prev**2)
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return QuadratureRule(x, w)


def _check_exact(rule: QuadratureRule, n_needed: int) -> None:
    if rule.size < n_needed:
        raise QuadratureError(f"rule with {rule.size} nodes cannot integrate degree {2 * n_needed - 2} exactly")


def _shared_params(specs) -> PhysParams:
    params = {s.p for s in specs}
    if len(params) != 1:
        raise ValueError("all specs must share the same PhysParams")
    return params.pop()


def l2_gram(specs: list[WavefunctionSpec], rule: QuadratureRule) -> np.ndarray:
    """Pairwise L2(R^2) inner products by the tensorised rule.

    The Gaussian factor exp(-(xi1^2 + xi2^2)) of each product is absorbed
    into the weights.
    """
    if not specs:
        return np.zeros((0, 0), dtype=complex)
    p = _shared_params(specs)
    top = max(max(s.n1, s.n2) for s in specs)
    _check_exact(rule, top + 1)
    alpha = p.inverse_length_sq
    polys = orthonormal_hermite(top, rule.nodes)
    w2 = np.outer(rule.weights, rule.weights).ravel()
    # each eigenfunction without its Gaussian, sampled on the tensor grid
    samples = np.array([np.outer(polys[s.n1], polys[s.n2]).ravel() for s in specs]) * math.sqrt(alpha)
    jacobian = 1.0 / alpha
    return ((samples.conj() * w2) @ samples.T * jacobian).astype(complex)


# --------------------------------------------------------------------------
# Coefficient-space functions and ladder operators


@dataclass(frozen=True)
class HermiteExpansion:
    """sum c_{n1,n2} phi_{n1,n2}(x1, x2) over normalised eigenfunctions."""

    coeffs: dict
    p: PhysParams = field(default_factory=PhysParams)

    @classmethod
    def of(cls, spec: WavefunctionSpec) -> HermiteExpansion:
        return cls({spec.label: 1.0 + 0j}, spec.p)

    def __add__(self, other: HermiteExpansion) -> HermiteExpansion:
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            out[key] = out.get(key, 0) + c
        return HermiteExpansion(out, self.p)

    def __mul__(self, scalar) -> HermiteExpansion:
        return HermiteExpansion({k: c * scalar for k, c in self.coeffs.items()}, self.p)

    __rmul__ = __mul__

    def __sub__(self, other: HermiteExpansion) -> HermiteExpansion:
        return self + (-1) * other

    def pruned(self, atol: float = 0.0) -> HermiteExpansion:
        return HermiteExpansion({k: c for k, c in self.coeffs.items() if abs(c) > atol}, self.p)

    def l2_norm(self) -> float:
        """Exact in coefficient space since the basis is orthonormal."""
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        total = np.zeros(np.broadcast(x1, x2).shape, dtype=complex)
        for (n1, n2), c in self.coeffs.items():
            total = total + c * eigenfunction(WavefunctionSpec(n1, n2, self.p), x1, x2)
        return total


@dataclass(frozen=True)
class DiffOpRep:
    """Which position representation the ladder operators act in.

    ``barred``: <<x| a_bar_i and <<x| a_bar_i^dd are the canonical
    sqrt(mw/2hbar) x_i +- sqrt(hbar/2mw) d/dx_i.
    ``original``: <x| a_i is canonical, so <x| a_bar_i mixes modes
    through the branch's pseudo-Bogoliubov combination; needs ``branch``.
    """

    representation: Literal["barred", "original"] = "barred"
    branch: SignBranch | None = None

    def __post_init__(self):
        if self.representation not in ("barred", "original"):
            raise ValueError(f"unknown representation {self.representation!r}")
        if self.representation == "original" and self.branch is None:
            raise ValueError("original representation needs a sign branch")


def _canonical(expansion: HermiteExpansion, mode: int, kind: str) -> HermiteExpansion:
    out: dict = {}
    for (n1, n2), c in expansion.coeffs.items():
        n = n1 if mode == 1 else n2
        if kind == "lower":
            if n == 0:
                continue
            factor, shift = math.sqrt(n), -1
        else:
            factor, shift = math.sqrt(n + 1), 1
        key = (n1 + shift, n2) if mode == 1 else (n1, n2 + shift)
        out[key] = out.get(key, 0) + c * factor
    return HermiteExpansion(out, expansion.p)


def apply_ladder_diff(
    rep: DiffOpRep, mode: int, kind: str, target: WavefunctionSpec | HermiteExpansion
) -> HermiteExpansion:
    """Ladder operator acting from the left on a position-space function.

    In the barred representation lowering gives sqrt(n_i) times the
    (n_i - 1) function and raising sqrt(n_i + 1) times the (n_i + 1) one;
    lowering the ground level returns the zero function. In the original
    representation the barred operator is a mode-mixing combination.
    """
    if mode not in (1, 2) or kind not in ("lower", "raise"):
        raise ValueError(f"bad ladder request mode={mode!r} kind={kind!r}")
    expansion = HermiteExpansion.of(target) if isinstance(target, WavefunctionSpec) else target
    if rep.representation == "barred":
        return _canonical(expansion, mode, kind)
    c = 1 / math.sqrt(2)
    s = rep.branch.sign * c
    other = 2 if mode == 1 else 1
    if kind == "lower":
        # a_bar_1 = c a1 - s a2^+ ; a_bar_2 = -s a1^+ + c a2
        return c * _canonical(expansion, mode, "lower") - s * _canonical(expansion, other, "raise")
    # a_bar_1^dd = c a1^+ + s a2 ; a_bar_2^dd = s a1 + c a2^+
    return c * _canonical(expansion, mode, "raise") + s * _canonical(expansion, other, "lower")


def apply_hamiltonian_diff(
    expansion: HermiteExpansion, p: PhysParams, branch: SignBranch
) -> HermiteExpansion:
    """Barred-representation Hamiltonian by composing ladder actions."""
    branch = SignBranch.parse(branch)
    rep = DiffOpRep("barred")

    def number(mode):
        return apply_ladder_diff(rep, mode, "raise", apply_ladder_diff(rep, mode, "lower", expansion))

    n1, n2 = number(1), number(2)
    anti = n1 + n2 + expansion
    return p.quantum * (n1 - n2) + (branch.sign * 1j * p.damping) * anti


def _oscillator_part(n: int, xi: np.ndarray) -> np.ndarray:
    """(xi^2 - d^2/dxi^2) psi_n(xi) without its Gaussian factor.

    With psi = q exp(-xi^2/2): psi'' = (q'' - 2 xi q' + (xi^2 - 1) q) exp(..),
    so (xi^2 - d^2) psi = (-q'' + 2 xi q' + q) exp(..). Derivatives of the
    orthonormal q_n come from H_n' = 2n H_{n-1}.
    """
    q = orthonormal_hermite(max(n, 2), xi)
    d1 = math.sqrt(2.0 * n) * q[n - 1] if n >= 1 else np.zeros_like(xi)
    d2 = math.sqrt(2.0 * n * 2.0 * (n - 1)) * q[n - 2] if n >= 2 else np.zeros_like(xi)
    return -d2 + 2 * xi * d1 + q[n]


def hamiltonian_diff_residual(
    spec: WavefunctionSpec, p: PhysParams, branch: SignBranch, rule: QuadratureRule
) -> float:
    """||H_x phi - E phi|| / ||phi|| with E the complex eigenvalue.

    H_x = (hbar w / 2)[(xi1^2 - d1^2) - (xi2^2 - d2^2)]
          +- i (hbar g / 2m)(1/2)[(xi1^2 - d1^2) + (xi2^2 - d2^2)],
    applied pointwise with analytic derivatives on the quadrature grid.
    """
    branch = SignBranch.parse(branch)
    _check_exact(rule, max(spec.n1, spec.n2) + 2)
    xi = rule.nodes
    q1 = orthonormal_hermite(spec.n1, xi)[spec.n1]
    q2 = orthonormal_hermite(spec.n2, xi)[spec.n2]
    o1 = _oscillator_part(spec.n1, xi)
    o2 = _oscillator_part(spec.n2, xi)
    term1 = np.outer(o1, q2)
    term2 = np.outer(q1, o2)
    phi = np.outer(q1, q2)
    h_phi = 0.5 * p.quantum * (term1 - term2) + branch.sign * 0.5j * p.damping * (term1 + term2)
    energy = eigenvalue_ft(spec.n1, spec.n2, p, branch)
    w2 = np.outer(rule.weights, rule.weights)
    resid = math.sqrt(float(np.sum(w2 * np.abs(h_phi - energy * phi) ** 2)))
    norm = math.sqrt(float(np.sum(w2 * np.abs(phi) ** 2)))
    return resid / norm


# --------------------------------------------------------------------------
# Vacuum first-order equations


def _vacuum_fd4(p: PhysParams, x1, x2, h: float, mode: int):
    spec = WavefunctionSpec(0, 0, p)

    def f(dx):
        return eigenfunction(spec, x1 + dx, x2) if mode == 1 else eigenfunction(spec, x1, x2 + dx)

    return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h)


def vacuum_pde_residual(
    p: PhysParams, x1, x2, derivative: Literal["analytic", "fd4"] = "analytic", h: float = 1e-2
) -> float:
    """max |(xi_i + d/dxi_i) phi_00| over the sample points, i = 1, 2.

    ``fd4`` swaps the analytic derivative for a fourth-order central
    difference of step ``h`` (physical units) as a cross-check.
    """
    x1, x2 = np.broadcast_arrays(np.asarray(x1, float), np.asarray(x2, float))
    scale = math.sqrt(p.inverse_length_sq)
    phi = eigenfunction(WavefunctionSpec(0, 0, p), x1, x2)
    worst = 0.0
    for mode, x in ((1, x1), (2, x2)):
        if derivative == "analytic":
            dphi_dx = -p.inverse_length_sq * x * phi
        elif derivative == "fd4":
            dphi_dx = _vacuum_fd4(p, x1, x2, h, mode)
        else:
            raise ValueError(f"unknown derivative mode {derivative!r}")
        resid = scale * x * phi + dphi_dx / scale
        worst = max(worst, float(np.max(np.abs(resid))))
    return worst


# --------------------------------------------------------------------------
# Mollified analysis of the improper pairing


@dataclass(frozen=True)
class Mollifier:
    """Unit-mass Gaussian of width ``sigma`` in u = x1 -+ x2."""

    sigma: float
    branch: SignBranch = SignBranch.PLUS

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return np.exp(-0.5 * (u / self.sigma) ** 2) / (self.sigma * math.sqrt(2 * math.pi))


@dataclass(frozen=True)
class TestFunction:
    """P(x1, x2) exp(-(x1^2 + x2^2)/2) with P of degree <= 2.

    ``coeffs[i][j]`` multiplies x1^i x2^j.
    """

    __test__ = False  # not a pytest class

    coeffs: tuple

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 2 or c.shape[0] > 3 or c.shape[1] > 3:
            raise ValueError("coeffs must be a 2-d array of shape at most (3, 3)")
        if any(c[i, j] != 0 for i in range(c.shape[0]) for j in range(c.shape[1]) if i + j > 2):
            raise ValueError("polynomial degree must be <= 2")

    @classmethod
    def monomial(cls, i: int, j: int) -> TestFunction:
        c = np.zeros((3, 3))
        c[i, j] = 1.0
        return cls(tuple(map(tuple, c)))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)

    def __call__(self, x1, x2):
        return poly.polyval2d(x1, x2, self.array) * np.exp(-0.5 * (np.square(x1) + np.square(x2)))

    def directional(self, sign: int, x1, x2):
        """(d1 + sign * d2) of the test function."""
        c = self.array
        gauss = np.exp(-0.5 * (np.square(x1) + np.square(x2)))
        dp1 = poly.polyval2d(x1, x2, poly.polyder(c, axis=0))
        dp2 = poly.polyval2d(x1, x2, poly.polyder(c, axis=1))
        value = poly.polyval2d(x1, x2, c)
        return (dp1 - x1 * value + sign * (dp2 - x2 * value)) * gauss


def default_test_family() -> list[TestFunction]:
    return [TestFunction.monomial(i, j) for i in range(3) for j in range(3) if i + j <= 2]


def mollified_weak_residual(
    moll: Mollifier, test: TestFunction, rule: QuadratureRule
) -> tuple[float, float]:
    """Weak residuals of (x1 -+ x2) phi = 0 and (d1 +- d2) phi = 0 for phi = delta_sigma.

    Integrals run in rotated coordinates u = x1 -+ x2 (mollifier direction)
    and v = x1 +- x2, with dx1 dx2 = du dv / 2. The second residual is
    taken by parts, -int (d1 +- d2) test * delta_sigma.
    """
    sign = moll.branch.sign
    t = rule.nodes
    u = math.sqrt(2.0) * moll.sigma * t
    v = 2.0 * t
    uu, vv = np.meshgrid(u, v, indexing="ij")
    x1 = 0.5 * (vv + uu)
    x2 = sign * 0.5 * (vv - uu)
    # delta_sigma(u) du -> w_i / sqrt(pi); exp(-v^2/4) dv -> 2 w_j exp(+v^2/4) reweighting
    wu = rule.weights / math.sqrt(math.pi)
    wv = 2.0 * rule.weights * np.exp(0.25 * v**2)
    weights = np.outer(wu, wv) * 0.5
    w_position = float(np.sum(weights * test(x1, x2) * uu))
    w_derivative = -float(np.sum(weights * test.directional(sign, x1, x2)))
    return w_position, w_derivative


def improper_partial_sum(
    n_terms: int, theta: ThetaLike, x1: float, x2: float, p: PhysParams | None = None
) -> float:
    """sum_{n < n_terms} c_n phi_n(x1) phi_n(x2) with vacuum pair amplitudes c_n.

    This is the Fock expansion of <x1, x2|0>>, the pairing of an unbarred
    position bra with the barred vacuum. At a branch it piles up on the
    line x1 = +-x2 and does not converge there.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be at least 1")
    p = p or PhysParams()
    coeffs = pair_amplitudes(theta, n_terms)
    scale = p.inverse_length_sq**0.25
    f1 = hermite_functions(n_terms - 1, to_xi(x1, p)) * scale
    f2 = hermite_functions(n_terms - 1, to_xi(x2, p)) * scale
    return float(np.sum(coeffs * f1 * f2))


__all__ = [
    "hermite",
    "orthonormal_hermite",
    "hermite_functions",
    "WavefunctionSpec",
    "eigenfunction",
    "QuadratureRule",
    "gauss_hermite_rule",
    "l2_gram",
    "HermiteExpansion",
    "DiffOpRep",
    "apply_ladder_diff",
    "apply_hamiltonian_diff",
    "hamiltonian_diff_residual",
    "vacuum_pde_residual",
    "Mollifier",
    "TestFunction",
    "default_test_family",
    "mollified_weak_residual",
    "improper_partial_sum",
]
