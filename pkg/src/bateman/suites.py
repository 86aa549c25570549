"""Named check suites: each invariant of the library, runnable in batch.

Every check yields one or more :class:`CheckReport` records. A check that
raises is recorded as a failure carrying the error text; the suite keeps
going. Report order is the catalogue order, so it does not depend on
timing.

Tolerance policy: residual checks compare against ``min(own, config.tol)``
where ``own`` is the invariant's documented bound; structural checks
(monotonicity, ratios, lower bounds) keep their own thresholds.
"""

from __future__ import annotations

import math
import time
from collections.abc import Callable, Iterator
from dataclasses import dataclass

import numpy as np

from .config import CheckReport, RunConfig
from .errors import BatemanError, CapacityError
from .fockspace import (
    InteriorBlock,
    commutator,
    ladder_matrix,
    make_basis,
    matrix_exp,
    naive_inner,
)
from .model import (
    SignBranch,
    build_barred_conjugated,
    build_barred_linear,
    build_h_barred,
    build_h_original,
    build_x,
)
from .position import (
    DiffOpRep,
    Mollifier,
    TestFunction,
    WavefunctionSpec,
    apply_ladder_diff,
    default_test_family,
    eigenfunction,
    gauss_hermite_rule,
    hamiltonian_diff_residual,
    improper_partial_sum,
    l2_gram,
    mollified_weak_residual,
)
from .states import (
    VacuumMethod,
    barred_fock_state,
    bogoliubov_vacuum,
    eigen_residual,
    eigenvalue_ft,
    eigenvalue_is,
    proper_inner,
)

SUITES = ("ccr", "vacuum", "spectrum", "wavefunctions", "improper")

# (measured, tolerance, passed)
Outcome = tuple[complex, float, bool]


@dataclass(frozen=True)
class Invariant:
    key: str
    suite: str
    run: Callable[[RunConfig], Iterator[tuple[str, Callable[[], Outcome]]]]


def _le(measured: float, tol: float) -> Outcome:
    return measured, tol, bool(measured <= tol)


def _tol(config: RunConfig, own: float) -> float:
    return min(own, config.tol)


def _interior_max(op, block) -> float:
    sub = op.restrict(block)
    return float(np.max(np.abs(sub))) if sub.size else 0.0


# ---------------------------------------------------------------- fockspace


def _ladder_adjoint(config):
    basis = make_basis(config.n_max)
    for mode in (1, 2):

        def check(mode=mode):
            lower = ladder_matrix(basis, mode, "lower")
            raise_ = ladder_matrix(basis, mode, "raise")
            diff = float(np.max(np.abs(raise_.entries - lower.entries.conj().T)))
            return diff, 0.0, diff == 0.0

        yield f"mode={mode}", check


def _ccr(config):
    tol = _tol(config, 1e-12)
    for cap in sorted({5, 10, 30, config.n_max}):
        yield from _ccr_at(make_basis(cap), tol)


def _ccr_at(basis, tol):
    inner = InteriorBlock(1)
    ops = {
        (i, kind): ladder_matrix(basis, i, kind) for i in (1, 2) for kind in ("lower", "raise")
    }
    eye = basis.identity()
    for i in (1, 2):
        for j in (1, 2):

            def check(i=i, j=j):
                c = commutator(ops[i, "lower"], ops[j, "raise"])
                if i == j:
                    c = c - eye
                return _le(_interior_max(c, inner), tol)

            yield f"n_max={basis.n_max}/[a{i},a{j}+]", check
    pairs = [((1, "lower"), (2, "lower")), ((1, "raise"), (2, "raise")),
             ((1, "lower"), (2, "raise")), ((1, "raise"), (2, "lower"))]
    for a, b in pairs:

        def check(a=a, b=b):
            return _le(commutator(ops[a], ops[b]).max_norm(), tol)

        yield f"n_max={basis.n_max}/[{_name(a)},{_name(b)}]", check


def _name(op):
    mode, kind = op
    return f"a{mode}" + ("+" if kind == "raise" else "")


def _group_law(config):
    basis = make_basis(10)
    x = build_x(basis)
    block = InteriorBlock(config.margin)
    tol = _tol(config, 1e-9)
    for s in (0.1, 0.2):
        for t in (0.1, 0.2):

            def check(s=s, t=t):
                lhs = matrix_exp(s * x) @ matrix_exp(t * x)
                rhs = matrix_exp((s + t) * x)
                return _le(_interior_max(lhs - rhs, block), tol)

            yield f"s={s},t={t}", check


def _ordering(config):
    def check():
        bad = 0
        for n in range(11):
            basis = make_basis(n)
            bad += sum(
                basis.index_of(*_pair(basis.fock_of(k))) != k for k in range(basis.dimension)
            )
        return float(bad), 0.0, bad == 0

    yield "n_max<=10", check


def _pair(idx):
    return idx.n1, idx.n2


# -------------------------------------------------------------------- model


def _pseudo_ccr(config):
    basis = make_basis(12)
    block = InteriorBlock(config.margin)
    tol = _tol(config, 1e-9)
    cases = [("linear", 0.3), ("linear", math.pi / 4), ("conjugated", 0.3)]
    for how, theta in cases:

        def check(how=how, theta=theta):
            build = build_barred_linear if how == "linear" else build_barred_conjugated
            b1, b2, d1, d2 = build(basis, theta)
            eye = basis.identity()
            worst = 0.0
            lowers, raises = (b1, b2), (d1, d2)
            for i in range(2):
                for j in range(2):
                    c = commutator(lowers[i], raises[j]) - (eye if i == j else 0 * eye)
                    worst = max(worst, _interior_max(c, block))
            worst = max(worst, _interior_max(commutator(b1, b2), block))
            worst = max(worst, _interior_max(commutator(d1, d2), block))
            return _le(worst, tol)

        yield f"{how}/theta={theta:.6g}", check


def _barred_cross(config):
    basis = make_basis(12)
    block = InteriorBlock(config.margin)

    def check():
        lin = build_barred_linear(basis, 0.3)
        conj = build_barred_conjugated(basis, 0.3)
        worst = max(_interior_max(a - b, block) for a, b in zip(lin, conj))
        return _le(worst, _tol(config, 1e-9))

    yield "theta=0.3", check


def _non_unitarity(config):
    basis = make_basis(12)
    block = InteriorBlock(config.margin)
    x = build_x(basis)

    def gap(theta):
        e = matrix_exp(theta * x)
        return _interior_max(e.dag() @ e - basis.identity(), block)

    def at_zero():
        return _le(gap(0.0), _tol(config, 1e-12))

    def at_seven_tenths():
        g = gap(0.7)
        return g, 0.1, g > 0.1

    yield "theta=0", at_zero
    yield "theta=0.7 (>0.1)", at_seven_tenths


def _ddagger(config):
    basis = make_basis(12)

    def check():
        _, _, d1, _ = build_barred_linear(basis, 0.3)
        b1 = build_barred_linear(basis, 0.3)[0]
        g = (d1 - b1.dag()).max_norm()
        return g, 0.1, g > 0.1

    yield "theta=0.3 (>0.1)", check


def _hamiltonian_identity(config):
    basis = make_basis(12)
    block = InteriorBlock(config.margin)
    p = config.params
    h = build_h_original(basis, p)
    for branch in SignBranch:

        def check(branch=branch):
            return _le(_interior_max(h - build_h_barred(basis, p, branch), block), _tol(config, 1e-10))

        yield branch.value, check


# ------------------------------------------------------------------- states


def _vacuum_thetas(config):
    seen = []
    for t in (config.theta, 0.1, 0.3, 0.7 * math.pi / 4):
        if not any(abs(t - s) < 1e-15 for s in seen):
            seen.append(t)
    return seen


def _cap_for(theta: float, config: RunConfig, target: float) -> int:
    """Cap large enough that the truncated pair series is below ``target``."""
    r = abs(math.tan(theta)) if abs(theta) < math.pi / 4 else 1.0
    if r == 0 or r >= 1:
        return config.n_max
    return max(config.n_max, int(math.ceil(math.log(target) / math.log(r))) + 4)


def _triple_agreement(config):
    tol = _tol(config, 1e-9)
    for theta in _vacuum_thetas(config):
        basis = make_basis(_cap_for(theta, config, tol / 10))
        for a, b in (("taylor", "closed_form"), ("taylor", "kernel"), ("closed_form", "kernel")):

            def check(theta=theta, a=a, b=b, basis=basis):
                va = bogoliubov_vacuum(basis, theta, a).amplitudes
                vb = bogoliubov_vacuum(basis, theta, b).amplitudes
                return _le(float(np.max(np.abs(va - vb))), tol)

            yield f"theta={theta:.6g}/{a}~{b}/n_max={basis.n_max}", check


def _annihilation(config):
    block = InteriorBlock(config.margin)
    tol = _tol(config, 1e-9)
    cases = [(theta, m) for theta in _vacuum_thetas(config) for m in VacuumMethod]
    cases += [(branch, VacuumMethod.KERNEL) for branch in SignBranch]
    for theta, method in cases:
        if isinstance(theta, SignBranch):
            label, basis = theta.value, make_basis(config.n_max)
        else:
            # the Taylor vacuum inherits the truncation error of the box
            basis = make_basis(_cap_for(theta, config, tol / 10))
            label = f"{theta:.6g}/n_max={basis.n_max}"

        def check(theta=theta, method=method, basis=basis):
            vac = bogoliubov_vacuum(basis, theta, method)
            b1, b2, _, _ = build_barred_linear(basis, theta)
            worst = max(float(np.linalg.norm((b @ vac).restrict(block))) for b in (b1, b2))
            return _le(worst, tol)

        yield f"theta={label}/{method.value}", check


def _biorthonormality(config):
    basis = make_basis(config.n_max)
    labels = [(i, j) for i in range(4) for j in range(4)]

    def check():
        states = {lab: barred_fock_state(basis, *lab, config.theta) for lab in labels}
        gram = np.array(
            [[proper_inner(states[m].dual_bra, states[n].ket) for n in labels] for m in labels]
        )
        return _le(float(np.max(np.abs(gram - np.eye(len(labels))))), _tol(config, 1e-8))

    yield f"theta={config.theta:.6g}/n<=3", check


def _eigenvectors(config):
    basis = make_basis(config.n_max)
    p = config.params
    h = build_h_original(basis, p)
    margin = 4
    tol = _tol(config, 1e-8)
    for branch in SignBranch:
        for n1 in range(4):
            for n2 in range(4):

                def check(branch=branch, n1=n1, n2=n2):
                    need = n1 + n2 + margin + 4
                    if basis.n_max < need:
                        raise CapacityError(f"eigen check needs n_max >= {need}")
                    state = barred_fock_state(basis, n1, n2, branch, VacuumMethod.KERNEL)
                    r = eigen_residual(h, state, eigenvalue_ft(n1, n2, p, branch), margin)
                    return _le(r, tol)

                yield f"{branch.value}/n1={n1},n2={n2}", check


def _branch_conjugation(config):
    p = config.params
    for name, formula in (("ft", eigenvalue_ft), ("is", eigenvalue_is)):

        def check(formula=formula):
            worst = max(
                abs(formula(a, b, p, SignBranch.MINUS) - formula(a, b, p, SignBranch.PLUS).conjugate())
                for a in range(6)
                for b in range(6)
            )
            return worst, 0.0, worst == 0.0

        yield name, check


def _naive_divergence(config):
    branch = config.sign_branch
    for cap in (9, 19, config.n_max):
        basis = make_basis(cap)

        def check(basis=basis):
            vac = bogoliubov_vacuum(basis, branch, VacuumMethod.CLOSED_FORM)
            expected = 2.0 * (basis.n_max + 1)
            dev = abs(naive_inner(vac, vac) - expected) / expected
            return _le(dev, 1e-14)

        yield f"{branch.value}/N={cap}", check

    def certified():
        basis = make_basis(config.n_max)
        p = config.params
        state = barred_fock_state(basis, 0, 0, branch, VacuumMethod.CLOSED_FORM)
        r = eigen_residual(build_h_original(basis, p), state, eigenvalue_ft(0, 0, p, branch), 4)
        return _le(r, _tol(config, 1e-8))

    yield f"{branch.value}/still-eigenvector", certified


# ----------------------------------------------------------------- position


def _orthonormality(config):
    def check():
        rule = gauss_hermite_rule(config.quad_nodes)
        specs = [WavefunctionSpec(i, j, config.params) for i in range(9) for j in range(9)]
        gram = l2_gram(specs, rule)
        return _le(float(np.max(np.abs(gram - np.eye(len(specs))))), _tol(config, 1e-10))

    yield "n<=8", check


def _fd4_apply(spec: WavefunctionSpec, mode: int, kind: str, x1, x2, h: float = 1e-2):
    p = spec.p
    a = math.sqrt(p.inverse_length_sq / 2)
    b = math.sqrt(1 / (2 * p.inverse_length_sq))

    def f(dx):
        return eigenfunction(spec, x1 + dx, x2) if mode == 1 else eigenfunction(spec, x1, x2 + dx)

    deriv = (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h)
    x = x1 if mode == 1 else x2
    return a * x * f(0.0) + (b if kind == "lower" else -b) * deriv


def _ladder_consistency(config):
    rep = DiffOpRep("barred")
    grid = np.arange(-3.0, 3.0 + 1e-9, 0.25)
    x1, x2 = np.meshgrid(grid, grid, indexing="ij")
    p = config.params

    def algebra():
        worst = 0.0
        for n1 in range(6):
            for n2 in range(6):
                spec = WavefunctionSpec(n1, n2, p)
                for mode in (1, 2):
                    out = apply_ladder_diff(rep, mode, "lower", apply_ladder_diff(rep, mode, "raise", spec))
                    n = n1 if mode == 1 else n2
                    expected = {spec.label: n + 1}
                    keys = set(out.coeffs) | set(expected)
                    worst = max(worst, max(abs(out.coeffs.get(k, 0) - expected.get(k, 0)) for k in keys))
        return _le(worst, _tol(config, 1e-12))

    def finite_differences():
        worst = 0.0
        for n1 in range(6):
            for n2 in range(6):
                spec = WavefunctionSpec(n1, n2, p)
                for mode in (1, 2):
                    for kind in ("lower", "raise"):
                        analytic = apply_ladder_diff(rep, mode, kind, spec)(x1, x2)
                        numeric = _fd4_apply(spec, mode, kind, x1, x2)
                        worst = max(worst, float(np.max(np.abs(analytic - numeric))))
        return _le(worst, 1e-7)

    yield "raise-then-lower", algebra
    yield "fd4-pointwise", finite_differences


def _eigenfunction_property(config):
    p = config.params
    for branch in SignBranch:

        def check(branch=branch):
            rule = gauss_hermite_rule(config.quad_nodes)
            worst = max(
                hamiltonian_diff_residual(WavefunctionSpec(a, b, p), p, branch, rule)
                for a in range(5)
                for b in range(5)
            )
            return _le(worst, _tol(config, 1e-10))

        yield f"{branch.value}/n<=4", check


def _quadrature_exactness(config):
    for k in (8, 16, 32, 64):

        def check(k=k):
            rule = gauss_hermite_rule(k)
            deg = 2 * k - 2
            exact = math.gamma(deg / 2 + 0.5)
            rel = abs(float(rule.integrate(rule.nodes**deg)) - exact) / exact
            return _le(rel, 1e-12)

        yield f"k={k}", check


SIGMAS = (0.2, 0.1, 0.05, 0.025)


def _weak_limit(config):
    branch = config.sign_branch
    family = default_test_family()

    def name(test: TestFunction) -> str:
        (i, j), = [(i, j) for i in range(3) for j in range(3) if test.array[i, j]]
        return f"x1^{i}x2^{j}"

    for test in family:

        def monotone(test=test):
            rule = gauss_hermite_rule(config.quad_nodes)
            values = [abs(mollified_weak_residual(Mollifier(s, branch), test, rule)[0]) for s in SIGMAS]
            # worst increase as sigma shrinks; <= 0 means monotone
            rise = max(values[i + 1] - values[i] for i in range(len(values) - 1))
            return rise, 1e-15, rise <= 1e-15

        def divergence_free(test=test):
            rule = gauss_hermite_rule(config.quad_nodes)
            worst = max(abs(mollified_weak_residual(Mollifier(s, branch), test, rule)[1]) for s in SIGMAS)
            return _le(worst, 1e-12)

        yield f"{name(test)}/w_position-monotone", monotone
        yield f"{name(test)}/w_derivative-zero", divergence_free

    reference = TestFunction.monomial(1, 0)

    def reference_value():
        rule = gauss_hermite_rule(config.quad_nodes)
        w = mollified_weak_residual(Mollifier(0.1, SignBranch.PLUS), reference, rule)[0]
        target = math.sqrt(math.pi) / 2 * 0.1**2
        rel = abs(w - target) / target
        return _le(rel, 0.10)

    def halving_ratio():
        rule = gauss_hermite_rule(config.quad_nodes)
        w1 = mollified_weak_residual(Mollifier(0.1, SignBranch.PLUS), reference, rule)[0]
        w2 = mollified_weak_residual(Mollifier(0.05, SignBranch.PLUS), reference, rule)[0]
        return _le(abs(w1 / w2 - 4.0) / 4.0, 0.20)

    yield "reference/w_position(0.1)~sqrt(pi)/2*sigma^2", reference_value
    yield "reference/halving-ratio~4", halving_ratio


def _representation_contrast(config):
    branch = config.sign_branch
    terms = (5, 10, 20, 40)

    def diagonal_growth():
        values = [improper_partial_sum(n, branch, 0.0, 0.0) for n in terms]
        smallest_step = min(values[i + 1] - values[i] for i in range(len(values) - 1))
        return smallest_step, 0.0, smallest_step > 0.0

    def off_diagonal_bounded():
        x2 = -1.5 if branch is SignBranch.PLUS else 1.5
        peak = max(abs(improper_partial_sum(n, branch, 1.5, x2)) for n in range(1, 101))
        return _le(peak, 1.0)

    def inside_disc_converges():
        d = abs(improper_partial_sum(60, 0.3, 0.5, 0.5) - improper_partial_sum(80, 0.3, 0.5, 0.5))
        return _le(d, 1e-10)

    def proper_side_bounded():
        rule = gauss_hermite_rule(config.quad_nodes)
        specs = [WavefunctionSpec(i, j, config.params) for i in range(9) for j in range(9)]
        peak = float(np.max(np.abs(l2_gram(specs, rule))))
        return _le(peak, 1.0 + 1e-10)

    yield f"{branch.value}/diagonal-strictly-increasing", diagonal_growth
    yield f"{branch.value}/off-diagonal-bounded", off_diagonal_bounded
    yield "theta=0.3/partial-sums-converge", inside_disc_converges
    yield "l2-gram-entries-O(1)", proper_side_bounded


CATALOG: tuple[Invariant, ...] = (
    Invariant("fockspace.ladder-adjoint", "ccr", _ladder_adjoint),
    Invariant("fockspace.ccr", "ccr", _ccr),
    Invariant("fockspace.exp-group-law", "ccr", _group_law),
    Invariant("fockspace.ordering-bijection", "ccr", _ordering),
    Invariant("model.pseudo-ccr", "ccr", _pseudo_ccr),
    Invariant("model.barred-cross-check", "ccr", _barred_cross),
    Invariant("model.non-unitarity", "ccr", _non_unitarity),
    Invariant("model.ddagger-not-dagger", "ccr", _ddagger),
    Invariant("states.triple-agreement", "vacuum", _triple_agreement),
    Invariant("states.annihilation", "vacuum", _annihilation),
    Invariant("states.biorthonormality", "vacuum", _biorthonormality),
    Invariant("model.hamiltonian-identity", "spectrum", _hamiltonian_identity),
    Invariant("states.eigenvector", "spectrum", _eigenvectors),
    Invariant("states.branch-conjugation", "spectrum", _branch_conjugation),
    Invariant("position.orthonormality", "wavefunctions", _orthonormality),
    Invariant("position.ladder-consistency", "wavefunctions", _ladder_consistency),
    Invariant("position.eigenfunction", "wavefunctions", _eigenfunction_property),
    Invariant("position.quadrature-exactness", "wavefunctions", _quadrature_exactness),
    Invariant("states.naive-norm-divergence", "improper", _naive_divergence),
    Invariant("position.weak-limit", "improper", _weak_limit),
    Invariant("position.representation-contrast", "improper", _representation_contrast),
)


def _run_one(check_id: str, fn: Callable[[], Outcome], snapshot: dict) -> CheckReport:
    start = time.perf_counter()
    try:
        measured, tol, passed = fn()
        error = None
    except (BatemanError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        measured, tol, passed = complex(math.nan, math.nan), math.nan, False
        error = f"{type(exc).__name__}: {exc}"
    return CheckReport(
        check_id=check_id,
        params=snapshot,
        measured=complex(measured),
        tolerance=float(tol),
        passed=bool(passed),
        elapsed=time.perf_counter() - start,
        error=error,
    )


def run_suite(suite: str, config: RunConfig) -> list[CheckReport]:
    """Run every invariant of ``suite`` (or all suites) in catalogue order."""
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES + ('all',)}")
    snapshot = config.snapshot()
    reports = []
    for inv in CATALOG:
        if suite != "all" and inv.suite != suite:
            continue
        try:
            checks = list(inv.run(config))
        except (BatemanError, ValueError, ArithmeticError) as exc:
            checks = [("setup", _raiser(exc))]
        for detail, fn in checks:
            reports.append(_run_one(f"{inv.key}/{detail}", fn, snapshot))
    return reports


def _raiser(exc):
    def fn():
        raise exc

    return fn
