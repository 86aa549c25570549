import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from bateman.errors import ConvergenceError, DimensionError
from bateman.fockspace import (
    FockBasis,
    FockIndex,
    InteriorBlock,
    OperatorMatrix,
    StateVector,
    commutator,
    exp_series_plan,
    expm_array,
    ladder_matrix,
    make_basis,
    matrix_exp,
    naive_inner,
)
from bateman.model import SignBranch, build_x
from bateman.states import bogoliubov_vacuum


def test_basis_sizes_and_ordering():
    assert make_basis(0).dimension == 1
    assert make_basis(0).index_of(0, 0) == 0
    assert make_basis(2).dimension == 9
    assert make_basis(2).index_of(1, 2) == 5
    assert make_basis(30).dimension == 961


@pytest.mark.parametrize("n_max", range(11))
def test_ordering_is_a_bijection(n_max):
    basis = make_basis(n_max)
    seen = set()
    for k in range(basis.dimension):
        idx = basis.fock_of(k)
        assert basis.index_of(idx.n1, idx.n2) == k
        seen.add((idx.n1, idx.n2))
    assert len(seen) == basis.dimension


def test_basis_rejects_bad_input():
    with pytest.raises(ValueError):
        FockBasis(-1)
    with pytest.raises(ValueError):
        FockIndex(-1, 0)
    with pytest.raises(IndexError):
        make_basis(2).index_of(3, 0)
    with pytest.raises(IndexError):
        make_basis(2).fock_of(9)


def test_sectors_partition_the_basis():
    basis = make_basis(4)
    allidx = np.concatenate(list(basis.sectors.values()))
    assert sorted(allidx) == list(range(basis.dimension))
    for d, idx in basis.sectors.items():
        occ = basis.occupations[idx]
        assert np.all(occ[:, 0] - occ[:, 1] == d)
        assert np.all(np.diff(occ[:, 1]) > 0)


def test_interior_block_mask():
    basis = make_basis(4)
    idx = InteriorBlock(2).indices(basis)
    occ = basis.occupations[idx]
    assert idx.size == 9
    assert occ.max() == 2
    with pytest.raises(ValueError):
        InteriorBlock(-1)


def test_ladder_examples():
    basis = make_basis(3)
    a1 = ladder_matrix(basis, 1, "lower")
    c2 = ladder_matrix(basis, 2, "raise")
    c1 = ladder_matrix(basis, 1, "raise")
    out = a1 @ basis.unit(1, 0)
    assert np.allclose(out.amplitudes, basis.unit(0, 0).amplitudes, atol=0)
    out = c2 @ basis.unit(0, 1)
    assert out.amplitude(0, 2) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert np.count_nonzero(out.amplitudes) == 1
    assert (c1 @ basis.unit(3, 1)).norm() == 0.0


@pytest.mark.parametrize("n_max", [0, 1, 5, 12])
def test_raise_is_exact_adjoint_of_lower(n_max):
    basis = make_basis(n_max)
    for mode in (1, 2):
        lower = ladder_matrix(basis, mode, "lower").entries
        raise_ = ladder_matrix(basis, mode, "raise").entries
        assert np.array_equal(raise_, lower.conj().T)


def test_ladder_rejects_bad_mode():
    with pytest.raises(ValueError):
        ladder_matrix(make_basis(2), 3, "lower")
    with pytest.raises(ValueError):
        ladder_matrix(make_basis(2), 1, "up")


def test_single_mode_commutator_edge():
    basis = make_basis(2)
    c = commutator(ladder_matrix(basis, 1, "lower"), ladder_matrix(basis, 1, "raise"))
    # mode-1 diagonal at n2 = 0 reads 1, 1, -n_max
    diag = [c.element((n, 0), (n, 0)) for n in range(3)]
    assert diag == pytest.approx([1, 1, -2], abs=1e-15)


@pytest.mark.parametrize("n_max", [5, 10, 30])
def test_ccr_on_interior(n_max):
    basis = make_basis(n_max)
    inner = InteriorBlock(1)
    ops = {(i, k): ladder_matrix(basis, i, k) for i in (1, 2) for k in ("lower", "raise")}
    eye = basis.identity()
    for i in (1, 2):
        for j in (1, 2):
            c = commutator(ops[i, "lower"], ops[j, "raise"])
            if i == j:
                c = c - eye
            assert np.max(np.abs(c.restrict(inner))) <= 1e-12
    assert commutator(ops[1, "lower"], ops[2, "lower"]).max_norm() == 0.0
    assert commutator(ops[1, "raise"], ops[2, "raise"]).max_norm() <= 1e-12
    assert commutator(ops[1, "lower"], ops[2, "raise"]).max_norm() <= 1e-12


def test_x_commutator_with_a1_on_interior():
    basis = make_basis(8)
    c = commutator(build_x(basis), ladder_matrix(basis, 1, "lower"))
    target = -1 * ladder_matrix(basis, 2, "raise")
    assert np.max(np.abs((c - target).restrict(InteriorBlock(2)))) <= 1e-12


def test_commutator_basis_mismatch():
    a = ladder_matrix(make_basis(2), 1, "lower")
    b = ladder_matrix(make_basis(3), 1, "lower")
    with pytest.raises(DimensionError):
        commutator(a, b)


def test_naive_inner_examples():
    basis = make_basis(3)
    assert naive_inner(basis.unit(0, 0), basis.unit(0, 0)) == 1
    assert naive_inner(basis.unit(0, 0), basis.unit(1, 1)) == 0
    with pytest.raises(DimensionError):
        naive_inner(basis.unit(0, 0), make_basis(2).unit(0, 0))


def test_naive_norm_of_branch_vacuum():
    vac = bogoliubov_vacuum(make_basis(9), SignBranch.PLUS, "closed_form")
    assert naive_inner(vac, vac) == pytest.approx(20.0, rel=1e-15)


def test_state_vector_checks_and_arithmetic():
    basis = make_basis(1)
    with pytest.raises(DimensionError):
        StateVector(basis, np.zeros(3))
    with pytest.raises(ValueError):
        StateVector(basis, np.zeros(4), role="other")
    u = basis.unit(1, 0)
    v = (2 * u + basis.unit(0, 1)) / 2
    assert v.amplitude(1, 0) == 1.0
    assert v.amplitude(0, 1) == 0.5
    assert not v.amplitudes.flags.writeable


def test_operator_matrix_checks():
    with pytest.raises(DimensionError):
        OperatorMatrix(make_basis(1), np.zeros((3, 3)))


def test_matrix_exp_of_zero_is_identity():
    basis = make_basis(3)
    z = OperatorMatrix(basis, np.zeros((basis.dimension, basis.dimension)))
    assert np.array_equal(matrix_exp(z).entries, np.eye(basis.dimension))


def test_matrix_exp_vacuum_element():
    basis = make_basis(12)
    e = matrix_exp(0.3 * build_x(basis))
    assert e.element((0, 0), (0, 0)).real == pytest.approx(1 / math.cos(0.3), abs=5e-7)
    assert e.element((0, 0), (0, 0)).real == pytest.approx(1.046751, abs=1e-6)


def test_matrix_exp_inverse_on_interior():
    basis = make_basis(10)
    x = build_x(basis)
    prod = matrix_exp(0.3 * x) @ matrix_exp(-0.3 * x)
    dev = (prod - basis.identity()).restrict(InteriorBlock(2))
    assert np.max(np.abs(dev)) <= 1e-10


@pytest.mark.parametrize("s,t", [(0.1, 0.1), (0.1, 0.2), (0.2, 0.1), (0.2, 0.2)])
def test_matrix_exp_group_law(s, t):
    basis = make_basis(10)
    x = build_x(basis)
    lhs = matrix_exp(s * x) @ matrix_exp(t * x)
    rhs = matrix_exp((s + t) * x)
    assert np.max(np.abs((lhs - rhs).restrict(InteriorBlock(2)))) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(1, 8),
    scale=st.floats(0.01, 20.0),
    seed=st.integers(0, 2**31 - 1),
    complex_=st.booleans(),
)
def test_expm_array_matches_scipy(n, scale, seed, complex_):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n))
    if complex_:
        m = m + 1j * rng.standard_normal((n, n))
    m *= scale / max(np.abs(m).sum(axis=1).max(), 1e-300)
    ours = expm_array(m, tol=1e-13)
    ref = scipy.linalg.expm(m)
    # relative to the inf-norm of the result, which is what the bound promises
    assert np.max(np.abs(ours - ref)) <= 1e-11 * np.abs(ref).sum(axis=1).max()


def test_expm_array_keeps_real_input_real():
    assert expm_array(np.array([[0.0, 1.0], [1.0, 0.0]])).dtype == np.float64
    assert expm_array(np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)).dtype == np.float64


def test_expm_array_rejects_non_finite():
    with pytest.raises(ValueError):
        expm_array(np.array([[np.nan]]))


def test_exp_series_plan_bounds_and_failure():
    s, order = exp_series_plan(0.4, 1e-14)
    assert s == 0 and 1 <= order <= 30
    s, order = exp_series_plan(40.0, 1e-14)
    assert 40.0 / 2**s <= 0.5
    with pytest.raises(ConvergenceError):
        exp_series_plan(1.0, 1e-14, max_order=3)
    with pytest.raises(ValueError):
        exp_series_plan(1.0, 0.0)


def test_matrix_exp_convergence_error_propagates():
    basis = make_basis(2)
    with pytest.raises(ConvergenceError):
        matrix_exp(build_x(basis), tol=1e-14, max_order=2)
