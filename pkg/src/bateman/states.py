"""Bogoliubov vacuum, barred Fock ladder, dual bras and the spectrum.

The vacuum |0>> = e^{tX}|0> can be produced three independent ways:

* ``taylor``: the exponential applied to the Fock vacuum;
* ``closed_form``: sec(t) * sum_n tan(t)^n |n, n>;
* ``kernel``: the joint nullspace of the barred lowering operators.

Duals live in the bra space: <<phi| = <phi| e^{-tX}. Bras are stored
conjugated, so :func:`proper_inner` is ``sum(conj(bra) * ket)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import CapacityError, DegeneracyError, DimensionError, DomainError, NonConvergenceError
from .fockspace import FockBasis, FockIndex, InteriorBlock, OperatorMatrix, StateVector
from .model import (
    PhysParams,
    SignBranch,
    ThetaLike,
    build_barred_linear,
    exp_x_sectors,
    resolve_theta,
)


class VacuumMethod(str, Enum):
    TAYLOR = "taylor"
    CLOSED_FORM = "closed_form"
    KERNEL = "kernel"


@dataclass(frozen=True)
class BarredState:
    label: FockIndex
    theta: ThetaLike
    ket: StateVector
    dual_bra: StateVector
    method: VacuumMethod = VacuumMethod.CLOSED_FORM

    @property
    def is_branch(self) -> bool:
        return isinstance(self.theta, SignBranch)


def _real_angle(theta: ThetaLike) -> float:
    t = resolve_theta(theta)
    if isinstance(t, complex):
        if t.imag != 0:
            raise DomainError("vacuum construction needs a real theta")
        t = t.real
    if not math.isfinite(t):
        raise DomainError(f"theta must be finite, got {t!r}")
    return float(t)


def _series_angle(theta: ThetaLike, method: VacuumMethod) -> float:
    if isinstance(theta, SignBranch):
        raise DomainError(f"{method.value} vacuum needs |theta| < pi/4, got branch {theta.value}")
    t = _real_angle(theta)
    if abs(t) >= math.pi / 4:
        raise DomainError(f"{method.value} vacuum needs |theta| < pi/4, got {t}")
    return t


def pair_amplitudes(theta: ThetaLike, levels: int) -> np.ndarray:
    """sec(t) tan(t)^n for n < levels; at a branch sqrt(2) (+-1)^n."""
    n = np.arange(levels)
    if isinstance(theta, SignBranch):
        return math.sqrt(2) * float(theta.sign) ** n
    t = _real_angle(theta)
    return math.tan(t) ** n / math.cos(t)


def vacuum_naive(basis: FockBasis) -> StateVector:
    return basis.unit(0, 0)


def _closed_form_vacuum(basis: FockBasis, theta: ThetaLike, role: str = "ket") -> StateVector:
    amps = np.zeros(basis.dimension, dtype=complex)
    amps[basis.pair_indices()] = pair_amplitudes(theta, basis.side)
    return StateVector(basis, amps, role)


def _exact_rows(basis: FockBasis, mode: int) -> np.ndarray:
    """Rows where a barred lowering operator equals its untruncated action."""
    return basis.occupations[:, mode - 1] <= basis.n_max - 1


def _joint_kernel(
    basis: FockBasis, ops: list[np.ndarray], rows: list[np.ndarray], scale: float
) -> np.ndarray:
    """One-dimensional joint nullspace of ``ops`` restricted to ``rows``.

    The barred lowering operators shift n1 - n2 by -1 / +1, so a vector is
    annihilated by both iff every sector component is. The nullspace is
    computed sector by sector and must come out one-dimensional overall.
    Normalised so the |0, 0> amplitude equals ``scale``.
    """
    found = []
    for cols in basis.sectors.values():
        blocks = []
        for op, keep in zip(ops, rows):
            touched = np.flatnonzero(np.any(op[:, cols] != 0, axis=1) & keep)
            if touched.size:
                blocks.append(op[np.ix_(touched, cols)])
        if not blocks:
            found.extend(_embed(basis, cols, v) for v in np.eye(cols.size))
            continue
        stacked = np.vstack(blocks)
        _, sing, vh = np.linalg.svd(stacked)
        sing = np.concatenate([sing, np.zeros(max(0, cols.size - sing.size))])
        cutoff = 1e-10 * max(1.0, float(sing.max(initial=0.0)))
        for k in np.flatnonzero(sing < cutoff):
            found.append(_embed(basis, cols, vh[k].conj()))
    if len(found) != 1:
        raise DegeneracyError(f"joint nullspace has dimension {len(found)}, expected 1")
    vec = found[0]
    lead = vec[basis.index_of(0, 0)]
    if abs(lead) < 1e-300:
        raise DegeneracyError("nullspace vector has no vacuum component")
    return vec * (scale / lead)


def _embed(basis: FockBasis, cols: np.ndarray, values: np.ndarray) -> np.ndarray:
    out = np.zeros(basis.dimension, dtype=complex)
    out[cols] = values
    return out


def _kernel_vacuum(basis: FockBasis, theta: ThetaLike, role: str = "ket") -> StateVector:
    if isinstance(theta, SignBranch):
        scale = math.sqrt(2)
    else:
        t = _real_angle(theta)
        if abs(math.cos(t)) < 1e-12:
            raise DomainError(f"kernel vacuum undefined where cos(theta) = 0, got {t}")
        scale = 1 / math.cos(t)
    b1, b2, d1, d2 = build_barred_linear(basis, theta)
    if role == "ket":
        ops = [b1.entries, b2.entries]
    else:
        # <<0| a_bar_i^dd = 0  <=>  (a_bar_i^dd)^T r = 0
        ops = [d1.entries.T, d2.entries.T]
    rows = [_exact_rows(basis, 1), _exact_rows(basis, 2)]
    row_vec = _joint_kernel(basis, ops, rows, scale)
    amps = row_vec if role == "ket" else row_vec.conj()
    return StateVector(basis, amps, role)


def _taylor_vacuum(basis: FockBasis, theta: float, tol: float, role: str = "ket") -> StateVector:
    t = theta if role == "ket" else -theta
    blocks = exp_x_sectors(basis, t, tol)
    idx = basis.sectors[0]
    amps = np.zeros(basis.dimension, dtype=complex)
    # vacuum is the first state of the d = 0 sector
    column = blocks[0][:, 0] if role == "ket" else blocks[0][0, :].conj()
    amps[idx] = column
    return StateVector(basis, amps, role)


def bogoliubov_vacuum(
    basis: FockBasis,
    theta: ThetaLike,
    method: VacuumMethod | str = VacuumMethod.CLOSED_FORM,
    tol: float = 1e-14,
) -> StateVector:
    """The Bogoliubov vacuum |0>> as a ket.

    ``taylor`` needs real |theta| < pi/4. ``closed_form`` additionally
    accepts a :class:`SignBranch`, returning the truncated formal series
    with constant magnitude sqrt(2). ``kernel`` accepts any real theta
    with cos(theta) != 0 and both branches.
    """
    method = VacuumMethod(method)
    if method is VacuumMethod.TAYLOR:
        return _taylor_vacuum(basis, _series_angle(theta, method), tol)
    if method is VacuumMethod.CLOSED_FORM:
        if not isinstance(theta, SignBranch):
            _series_angle(theta, method)
        return _closed_form_vacuum(basis, theta)
    return _kernel_vacuum(basis, theta)


def dual_vacuum(
    basis: FockBasis,
    theta: ThetaLike,
    method: VacuumMethod | str = VacuumMethod.CLOSED_FORM,
    tol: float = 1e-14,
) -> StateVector:
    """<<0| = <0| e^{-tX}, stored as a conjugated bra.

    For real theta its amplitudes are sec(t) (-tan t)^n on the pair states.
    """
    method = VacuumMethod(method)
    if method is VacuumMethod.TAYLOR:
        return _taylor_vacuum(basis, _series_angle(theta, method), tol, role="bra")
    if method is VacuumMethod.CLOSED_FORM:
        if isinstance(theta, SignBranch):
            flipped = SignBranch.MINUS if theta is SignBranch.PLUS else SignBranch.PLUS
        else:
            flipped = -_series_angle(theta, method)
        row = _closed_form_vacuum(basis, flipped).amplitudes
        return StateVector(basis, row.conj(), "bra")
    return _kernel_vacuum(basis, theta, role="bra")


def _apply_power(op: OperatorMatrix, vec: np.ndarray, times: int) -> np.ndarray:
    for _ in range(times):
        vec = op.entries @ vec
    return vec


def barred_fock_state(
    basis: FockBasis,
    n1: int,
    n2: int,
    theta: ThetaLike,
    method: VacuumMethod | str = VacuumMethod.CLOSED_FORM,
    tol: float = 1e-14,
) -> BarredState:
    """|n1, n2>> = (a1^dd)^n1 (a2^dd)^n2 |0>> / sqrt(n1! n2!) with its dual.

    Each creation step spreads support one level towards the cap, so
    ``n_max >= n1 + n2 + 2`` is required. The dual is <n1, n2| e^{-tX}:
    directly from the exponential for ``taylor``, otherwise as
    <<0| a_bar_1^n1 a_bar_2^n2 / sqrt(n1! n2!) acting from the right.
    """
    method = VacuumMethod(method)
    label = FockIndex(n1, n2)
    if n1 + n2 + 2 > basis.n_max:
        raise CapacityError(
            f"state ({n1}, {n2}) needs n_max >= {n1 + n2 + 2}, basis has {basis.n_max}"
        )
    norm = math.sqrt(math.factorial(n1) * math.factorial(n2))
    b1, b2, d1, d2 = build_barred_linear(basis, theta)

    vac = bogoliubov_vacuum(basis, theta, method, tol)
    ket = _apply_power(d1, _apply_power(d2, vac.amplitudes, n2), n1) / norm

    if method is VacuumMethod.TAYLOR:
        t = _series_angle(theta, method)
        blocks = exp_x_sectors(basis, -t, tol)
        k = basis.index_of(n1, n2)
        d = n1 - n2
        idx = basis.sectors[d]
        row = np.zeros(basis.dimension, dtype=complex)
        row[idx] = blocks[d][int(np.flatnonzero(idx == k)[0]), :]
    else:
        row = dual_vacuum(basis, theta, method, tol).amplitudes.conj()
        # row^T a_bar_1^n1 a_bar_2^n2  ->  (a_bar_2^T)^n2 (a_bar_1^T)^n1 row
        for _ in range(n1):
            row = b1.entries.T @ row
        for _ in range(n2):
            row = b2.entries.T @ row
        row = row / norm
    return BarredState(
        label=label,
        theta=theta,
        ket=StateVector(basis, ket, "ket"),
        dual_bra=StateVector(basis, row.conj(), "bra"),
        method=method,
    )


def shell_partial_sums(bra: StateVector, ket: StateVector) -> np.ndarray:
    """Running sums of conj(bra) * ket over shells max(n1, n2) = 0..n_max."""
    terms = np.conj(bra.amplitudes) * ket.amplitudes
    shell = bra.basis.occupations.max(axis=1)
    per_shell = np.bincount(shell, weights=terms.real, minlength=bra.basis.side) + 1j * np.bincount(
        shell, weights=terms.imag, minlength=bra.basis.side
    )
    return np.cumsum(per_shell)


def proper_inner(
    bra: StateVector, ket: StateVector, *, tail_tol: float = 1e-8, window: int = 3
) -> complex:
    """Pairing of a dual bra with a ket of the same (barred) system.

    The sum is accumulated shell by shell. If any of the last ``window``
    shell increments exceeds ``tail_tol`` the truncation has not resolved
    the pairing and :class:`NonConvergenceError` is raised; at the branch
    points the vacuum pairing oscillates 2, 0, 2, 0, ... and lands here.
    """
    if bra.basis != ket.basis:
        raise DimensionError(f"basis mismatch: n_max={bra.basis.n_max} vs n_max={ket.basis.n_max}")
    if bra.role != "bra" or ket.role != "ket":
        raise ValueError(f"proper_inner expects (bra, ket), got ({bra.role}, {ket.role})")
    sums = shell_partial_sums(bra, ket)
    increments = np.abs(np.diff(sums))[-window:]
    if increments.size and increments.max() > tail_tol:
        raise NonConvergenceError(
            f"pairing not settled within the truncation (last shell increment {increments.max():.3g})",
            partial_sums=sums,
        )
    return complex(sums[-1])


def eigenvalue_ft(n1: int, n2: int, p: PhysParams, branch: SignBranch) -> complex:
    """hbar w (n1 - n2) +- i (hbar g / 2m)(n1 + n2 + 1)."""
    branch = SignBranch.parse(branch)
    _check_labels(n1, n2)
    return complex(p.quantum * (n1 - n2), branch.sign * p.damping * (n1 + n2 + 1))


def eigenvalue_is(n1: int, n2: int, p: PhysParams, branch: SignBranch) -> complex:
    """hbar w (n1 + n2 + 1) +- i (hbar g / 2m)(n1 - n2)."""
    branch = SignBranch.parse(branch)
    _check_labels(n1, n2)
    return complex(p.quantum * (n1 + n2 + 1), branch.sign * p.damping * (n1 - n2))


def _check_labels(n1: int, n2: int) -> None:
    if n1 < 0 or n2 < 0:
        raise ValueError(f"occupation labels must be non-negative, got ({n1}, {n2})")


def eigen_residual(h: OperatorMatrix, state: BarredState, e: complex, margin: int = 4) -> float:
    """||(H - E)|psi>>|| / |||psi>>|| on the interior block.

    Only meaningful at the branch points, where H is diagonal in the
    barred ladder; other theta values are rejected.
    """
    if not state.is_branch:
        raise ValueError("eigen_residual is defined for branch states (theta = +-pi/4) only")
    if h.basis != state.ket.basis:
        raise DimensionError("operator and state live on different bases")
    block = InteriorBlock(margin)
    ket = state.ket
    resid = (h @ ket).amplitudes - e * ket.amplitudes
    mask = block.mask(ket.basis)
    denom = float(np.linalg.norm(ket.amplitudes[mask]))
    if denom == 0.0:
        raise DegeneracyError("state vanishes on the interior block")
    return float(np.linalg.norm(resid[mask])) / denom


__all__ = [
    "VacuumMethod",
    "BarredState",
    "pair_amplitudes",
    "vacuum_naive",
    "bogoliubov_vacuum",
    "dual_vacuum",
    "barred_fock_state",
    "shell_partial_sums",
    "proper_inner",
    "eigenvalue_ft",
    "eigenvalue_is",
    "eigen_residual",
]
