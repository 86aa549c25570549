"""Truncated two-mode bosonic Fock space.

States |n1, n2> with 0 <= n1, n2 <= n_max are stored row-major,
``k = n1 * (n_max + 1) + n2``. Raising past the cap maps to zero, so every
operator identity of the untruncated theory only holds away from the edge;
:class:`InteriorBlock` selects the sub-basis where it is expected to hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np

from .errors import ConvergenceError, DimensionError

Kind = Literal["lower", "raise"]
Role = Literal["ket", "bra"]


@dataclass(frozen=True)
class FockIndex:
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError(f"occupation numbers must be non-negative, got ({self.n1}, {self.n2})")


@dataclass(frozen=True)
class FockBasis:
    """Box-truncated basis with a per-mode occupation cap."""

    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ValueError(f"n_max must be a non-negative integer, got {self.n_max!r}")

    @property
    def side(self) -> int:
        return self.n_max + 1

    @property
    def dimension(self) -> int:
        return self.side**2

    def index_of(self, n1: int, n2: int) -> int:
        if not (0 <= n1 <= self.n_max and 0 <= n2 <= self.n_max):
            raise IndexError(f"({n1}, {n2}) outside basis with n_max={self.n_max}")
        return n1 * self.side + n2

    def fock_of(self, k: int) -> FockIndex:
        if not 0 <= k < self.dimension:
            raise IndexError(f"linear index {k} outside [0, {self.dimension})")
        return FockIndex(*divmod(k, self.side))

    @cached_property
    def occupations(self) -> np.ndarray:
        """``(dimension, 2)`` integer array of (n1, n2) in linear order."""
        n1, n2 = np.divmod(np.arange(self.dimension), self.side)
        return np.stack([n1, n2], axis=1)

    def unit(self, n1: int, n2: int, role: Role = "ket") -> StateVector:
        amps = np.zeros(self.dimension, dtype=complex)
        amps[self.index_of(n1, n2)] = 1.0
        return StateVector(self, amps, role)

    def zero_state(self, role: Role = "ket") -> StateVector:
        return StateVector(self, np.zeros(self.dimension, dtype=complex), role)

    def identity(self) -> OperatorMatrix:
        return OperatorMatrix(self, np.eye(self.dimension, dtype=complex))

    @cached_property
    def sectors(self) -> dict[int, np.ndarray]:
        """Linear indices grouped by d = n1 - n2, each sorted by n2.

        X and H never change d, so both are block-diagonal over sectors.
        """
        d = self.occupations[:, 0] - self.occupations[:, 1]
        return {k: np.flatnonzero(d == k) for k in range(-self.n_max, self.n_max + 1)}

    def pair_indices(self) -> np.ndarray:
        """Linear indices of the diagonal states |n, n>, n = 0..n_max."""
        n = np.arange(self.side)
        return n * self.side + n


@dataclass(frozen=True)
class InteriorBlock:
    """States at least ``margin`` levels below the cap in both modes."""

    margin: int = 2

    def __post_init__(self):
        if self.margin < 0:
            raise ValueError("margin must be non-negative")

    def mask(self, basis: FockBasis) -> np.ndarray:
        top = basis.n_max - self.margin
        occ = basis.occupations
        return (occ[:, 0] <= top) & (occ[:, 1] <= top)

    def indices(self, basis: FockBasis) -> np.ndarray:
        return np.flatnonzero(self.mask(basis))


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class StateVector:
    """Amplitudes over a :class:`FockBasis`.

    ``role`` distinguishes kets from dual (bra) vectors. A bra stores the
    complex conjugate of the row it represents, so every pairing is
    ``sum(conj(bra) * ket)``.
    """

    basis: FockBasis
    amplitudes: np.ndarray
    role: Role = "ket"

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.shape != (self.basis.dimension,):
            raise DimensionError(
                f"amplitude length {amps.shape} does not match basis dimension {self.basis.dimension}"
            )
        if self.role not in ("ket", "bra"):
            raise ValueError(f"unknown role {self.role!r}")
        object.__setattr__(self, "amplitudes", amps)

    def amplitude(self, n1: int, n2: int) -> complex:
        return complex(self.amplitudes[self.basis.index_of(n1, n2)])

    def restrict(self, block: InteriorBlock) -> np.ndarray:
        return self.amplitudes[block.mask(self.basis)]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def with_role(self, role: Role) -> StateVector:
        return StateVector(self.basis, self.amplitudes, role)

    def __add__(self, other):
        _check_same_basis(self, other)
        return StateVector(self.basis, self.amplitudes + other.amplitudes, self.role)

    def __sub__(self, other):
        _check_same_basis(self, other)
        return StateVector(self.basis, self.amplitudes - other.amplitudes, self.role)

    def __mul__(self, scalar):
        return StateVector(self.basis, self.amplitudes * scalar, self.role)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return StateVector(self.basis, self.amplitudes / scalar, self.role)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense complex matrix acting on a :class:`FockBasis`."""

    basis: FockBasis
    entries: np.ndarray

    def __post_init__(self):
        entries = _frozen(self.entries)
        d = self.basis.dimension
        if entries.shape != (d, d):
            raise DimensionError(f"operator shape {entries.shape} does not match basis dimension {d}")
        object.__setattr__(self, "entries", entries)

    def dag(self) -> OperatorMatrix:
        return OperatorMatrix(self.basis, self.entries.conj().T)

    def element(self, bra: tuple[int, int], ket: tuple[int, int]) -> complex:
        i = self.basis.index_of(*bra)
        j = self.basis.index_of(*ket)
        return complex(self.entries[i, j])

    def restrict(self, block: InteriorBlock) -> np.ndarray:
        """Sub-matrix with rows and columns in the interior block."""
        idx = block.indices(self.basis)
        return self.entries[np.ix_(idx, idx)]

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.entries))) if self.entries.size else 0.0

    def __matmul__(self, other):
        _check_same_basis(self, other)
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(self.basis, self.entries @ other.entries)
        if isinstance(other, StateVector):
            return StateVector(self.basis, self.entries @ other.amplitudes, other.role)
        return NotImplemented

    def __add__(self, other):
        _check_same_basis(self, other)
        return OperatorMatrix(self.basis, self.entries + other.entries)

    def __sub__(self, other):
        _check_same_basis(self, other)
        return OperatorMatrix(self.basis, self.entries - other.entries)

    def __neg__(self):
        return OperatorMatrix(self.basis, -self.entries)

    def __mul__(self, scalar):
        if isinstance(scalar, (OperatorMatrix, StateVector)):
            return NotImplemented
        return OperatorMatrix(self.basis, self.entries * scalar)

    __rmul__ = __mul__


def _check_same_basis(a, b) -> None:
    basis_b = getattr(b, "basis", None)
    if basis_b is None:
        raise TypeError(f"expected an operator or state, got {type(b).__name__}")
    if a.basis != basis_b:
        raise DimensionError(
            f"basis mismatch: n_max={a.basis.n_max} vs n_max={basis_b.n_max}"
        )


def make_basis(n_max: int) -> FockBasis:
    return FockBasis(n_max)


def ladder_matrix(basis: FockBasis, mode: int, kind: Kind) -> OperatorMatrix:
    """Annihilation (``lower``) or creation (``raise``) operator on one mode.

    ``lower`` has <n-1|a|n> = sqrt(n); ``raise`` is its conjugate transpose,
    so creation out of the top level is dropped.
    """
    if mode not in (1, 2):
        raise ValueError(f"mode must be 1 or 2, got {mode!r}")
    if kind not in ("lower", "raise"):
        raise ValueError(f"kind must be 'lower' or 'raise', got {kind!r}")
    single = np.diag(np.sqrt(np.arange(1, basis.side, dtype=float)), k=1)
    eye = np.eye(basis.side)
    lower = np.kron(single, eye) if mode == 1 else np.kron(eye, single)
    op = OperatorMatrix(basis, lower)
    return op if kind == "lower" else op.dag()


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    return a @ b - b @ a


def naive_inner(u: StateVector, v: StateVector) -> complex:
    """Plain Fock-space pairing, conjugate-linear in ``u``.

    Roles are ignored on purpose: this is the pairing that treats any two
    vectors as kets of the same space.
    """
    _check_same_basis(u, v)
    return complex(np.vdot(u.amplitudes, v.amplitudes))


def _inf_norm(m: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(m), axis=1))) if m.size else 0.0


def _taylor_tail(rho: float, order: int) -> float:
    """Upper bound on sum_{k > order} rho^k / k! for rho < order + 2."""
    lead = math.exp((order + 1) * math.log(rho) - math.lgamma(order + 2)) if rho > 0 else 0.0
    return lead / (1.0 - rho / (order + 2))


def exp_series_plan(norm: float, tol: float, max_order: int = 30) -> tuple[int, int]:
    """Pick (scaling exponent s, Taylor order K) for a matrix of given inf-norm.

    The scaled matrix B = A / 2^s has ||B|| <= 1/2. With the Taylor
    remainder R(B) bounded by tail = sum_{k>K} ||B||^k / k!, the polynomial
    T satisfies T = e^B (I + E) with ||E|| <= e^{||B||} tail, and because T
    commutes with e^B, T^(2^s) = e^A (I + E)^(2^s). K is the smallest order
    with (1 + ||E||)^(2^s) - 1 <= tol, i.e. a relative error bound on e^A.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    s = 0 if norm <= 0.5 else int(math.ceil(math.log2(norm / 0.5)))
    rho = norm / 2**s
    for order in range(1, max_order + 1):
        eps = math.exp(rho) * _taylor_tail(rho, order)
        if math.expm1(2**s * math.log1p(eps)) <= tol:
            return s, order
    raise ConvergenceError(
        f"Taylor remainder bound above tol={tol:g} at order {max_order} (norm={norm:g}, s={s})"
    )


def expm_array(m: np.ndarray, tol: float = 1e-14, max_order: int = 30) -> np.ndarray:
    """Scaling-and-squaring Taylor exponential of a plain square array.

    Real input stays real. See :func:`exp_series_plan` for the error bound.
    """
    m = np.asarray(m)
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix_exp requires finite entries")
    if np.iscomplexobj(m) and not np.any(m.imag):
        m = m.real
    s, order = exp_series_plan(_inf_norm(m), tol, max_order)
    b = m / 2**s
    eye = np.eye(m.shape[0], dtype=b.dtype)
    result = eye.copy()
    for k in range(order, 0, -1):
        result = eye + (b @ result) / k
    for _ in range(s):
        result = result @ result
    return result


def matrix_exp(a: OperatorMatrix, tol: float = 1e-14, max_order: int = 30) -> OperatorMatrix:
    """Matrix exponential by scaling and squaring a truncated Taylor series.

    ``tol`` bounds the error relative to ``||e^A||`` in the inf-norm (which
    dominates the max-norm). No eigendecomposition is involved, so non-normal
    inputs are handled the same way as normal ones.
    """
    return OperatorMatrix(a.basis, expm_array(a.entries, tol, max_order))


__all__ = [
    "FockIndex",
    "FockBasis",
    "InteriorBlock",
    "StateVector",
    "OperatorMatrix",
    "make_basis",
    "ladder_matrix",
    "commutator",
    "matrix_exp",
    "expm_array",
    "exp_series_plan",
    "naive_inner",
]
