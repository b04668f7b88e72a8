"""Acceptance criteria, one test per criterion, each printing a pass/fail line.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion lines.
"""

import numpy as np

from fockbench import fock, levy, qsc, wiener
from fockbench import ito_algebra as ia
from fockbench.numerics import max_abs, random_cmatrix, random_cvector, random_unitary
from fockbench.suites import ccr_residuals


def report(number: int, name: str, value: float, bound: float, passed: bool):
    status = "PASS" if passed else "FAIL"
    print(f"acceptance {number:02d} [{status}] {name}: {value:.3e} (bound {bound:.1e})")
    assert passed, f"criterion {number} failed: {name} = {value:.3e} vs {bound:.1e}"


def test_criterion_01_ccr_suite():
    rng = np.random.default_rng(101)
    basis = fock.FockBasis(2, 8)
    worst = 0.0
    for _ in range(50):
        residuals = ccr_residuals(
            basis,
            random_cvector(rng, 2),
            random_cvector(rng, 2),
            random_cmatrix(rng, 2),
            random_cmatrix(rng, 2),
        )
        worst = max(worst, max(residuals.values()))
    report(1, "ccr six relations, 50 draws, d=2, cutoff 8", worst, 1e-10, worst < 1e-10)


def test_criterion_02_exponential_vector_identities():
    rng = np.random.default_rng(102)
    basis20 = fock.FockBasis(1, 20)
    worst_inner = 0.0
    for _ in range(20):
        u = random_cvector(rng, 1)
        v = random_cvector(rng, 1)
        u /= max(1.0, np.linalg.norm(u))
        v /= max(1.0, np.linalg.norm(v))
        lhs = fock.inner(fock.exponential_vector(basis20, u),
                         fock.exponential_vector(basis20, v))
        rhs = np.exp(np.vdot(u, v))
        worst_inner = max(worst_inner, abs(lhs - rhs) / abs(rhs))

    basis16 = fock.FockBasis(1, 16)
    u = random_cvector(rng, 1)
    v = random_cvector(rng, 1, scale=0.5)
    ev = fock.exponential_vector(basis16, v).coeffs
    proj = basis16.sector_projector(basis16.cutoff - 1)
    eig = max_abs(proj @ (fock.annihilation(basis16, u).matrix @ ev - np.vdot(u, v) * ev))

    action = [fock.weyl_action_residual(fock.FockBasis(1, c), [0.5], [0.2 + 0.1j])
              for c in (8, 12, 16)]
    monotone = action[0] > action[1] > action[2]

    passed = worst_inner < 1e-10 and eig < 1e-10 and action[-1] < 1e-7 and monotone
    value = max(worst_inner, eig, action[-1])
    report(2, "exponential-vector identities (inner, eigenrelation, action)",
           value, 1e-7, passed)


def test_criterion_03_weyl_relations():
    rng = np.random.default_rng(103)
    basis = fock.FockBasis(1, 16)
    probe = fock.exponential_vector(basis, [0.2 + 0.1j]).coeffs
    u1 = random_cvector(rng, 1, scale=0.4)
    u2 = random_cvector(rng, 1, scale=0.4)
    w1 = fock.weyl(basis, u1).matrix
    w2 = fock.weyl(basis, u2).matrix
    comp = np.linalg.norm(
        (w1 @ w2 - np.exp(-1j * np.imag(np.vdot(u1, u2)))
         * fock.weyl(basis, u1 + u2).matrix) @ probe)
    exch = np.linalg.norm(
        (w1 @ w2 - np.exp(-2j * np.imag(np.vdot(u1, u2))) * w2 @ w1) @ probe)

    basis2 = fock.FockBasis(2, 16)
    probe2 = fock.exponential_vector(basis2, [0.15, 0.1 - 0.05j]).coeffs
    u_op1 = random_unitary(rng, 2)
    u_op2 = random_unitary(rng, 2)
    x1 = random_cvector(rng, 2, scale=0.3)
    x2 = random_cvector(rng, 2, scale=0.3)
    pair = np.linalg.norm(
        (fock.weyl_pair(basis2, x1, u_op1).matrix @ fock.weyl_pair(basis2, x2, u_op2).matrix
         - np.exp(-1j * np.imag(np.vdot(x1, u_op1 @ x2)))
         * fock.weyl_pair(basis2, x1 + u_op1 @ x2, u_op1 @ u_op2).matrix) @ probe2)
    worst = max(comp, exch, pair)
    report(3, "Weyl composition/exchange/pair laws at cutoff 16", worst, 1e-6, worst < 1e-6)


def test_criterion_04_ito_algebra():
    rng = np.random.default_rng(104)
    worst_algebra = 0.0
    worst_nu = 0.0
    for _ in range(1000):
        mats = []
        for _ in range(3):
            mats.append(ia.ItoMatrix(
                alpha=complex(random_cvector(rng, 1)[0]),
                bra=random_cvector(rng, 2),
                ket=random_cvector(rng, 2),
                op=random_cmatrix(rng, 2),
            ))
        n1, n2, n3 = mats
        left = ia.circ(ia.circ(n1, n2), n3)
        right = ia.circ(n1, ia.circ(n2, n3))
        diff = max(abs(left.alpha - right.alpha), max_abs(left.bra - right.bra),
                   max_abs(left.ket - right.ket), max_abs(left.op - right.op))
        dag_l = ia.dagger(ia.circ(n1, n2))
        dag_r = ia.circ(ia.dagger(n2), ia.dagger(n1))
        diff = max(diff, abs(dag_l.alpha - dag_r.alpha), max_abs(dag_l.bra - dag_r.bra),
                   max_abs(dag_l.ket - dag_r.ket), max_abs(dag_l.op - dag_r.op))
        sand = ia.circ_sandwich(n1, n2)
        circ12 = ia.circ(n1, n2)
        diff = max(diff, abs(sand.alpha - circ12.alpha), max_abs(sand.bra - circ12.bra),
                   max_abs(sand.ket - circ12.ket), max_abs(sand.op - circ12.op))
        worst_algebra = max(worst_algebra, diff)
        f = random_cvector(rng, 2)
        g = random_cvector(rng, 2)
        worst_nu = max(worst_nu, abs(ia.nu(ia.dagger(n1), f, g) - np.conj(ia.nu(n1, g, f))))
    passed = worst_algebra < 1e-12 and worst_nu < 1e-14
    report(4, "ito algebra exactness (1000 triples) and nu adjoint",
           max(worst_algebra, worst_nu), 1e-12, passed)


FUND_N1 = ia.ItoMatrix(0.3, [0.4], [0.5], [[0.6]])
FUND_N2 = ia.ItoMatrix(0.1 + 0.2j, [0.2 + 0.1j], [0.3], [[0.4 + 0.2j]])


def _fund_problem():
    grid = qsc.TimeGrid.uniform(1.0, 6)
    space = qsc.SlotSpace(grid, 1, 3)
    f = qsc.StepFunction.constant(grid, [0.2 + 0j])
    g = qsc.StepFunction.constant(grid, [0.15 + 0.05j])
    assert f.norm() <= 0.5 and g.norm() <= 0.5
    return space, grid, f, g


def test_criterion_05_first_fundamental():
    space, grid, f, g = _fund_problem()
    strength = ia.StrengthFunction.constant(grid, FUND_N1)
    rep = qsc.check_first_fundamental(space, qsc.IdentityProcess(), strength, f, g, 1.0)
    study = qsc.refinement_study_first(1.0, [4, 8, 16, 32, 64], 1, 3,
                                       [0.2], [0.15 + 0.05j], FUND_N1, FUND_N2)
    passed = rep.abs_err < 1e-8 and abs(study.slope - 1.0) <= 0.2
    print(f"  first-formula discrepancy {rep.abs_err:.3e}, iterated slope {study.slope:.3f}")
    report(5, "first fundamental formula (dense vs slot-exact; iterated slope)",
           rep.abs_err, 1e-8, passed)


def test_criterion_06_second_fundamental():
    space, grid, f, g = _fund_problem()
    s1 = ia.StrengthFunction.constant(grid, FUND_N1)
    s2 = ia.StrengthFunction.constant(grid, FUND_N2)
    rep = qsc.check_second_fundamental(
        space, qsc.IdentityProcess(), s1, qsc.IdentityProcess(), s2, f, g, 1.0)
    creation_only = ia.ItoMatrix(0.0, [0.0], [0.5], [[0.0]])
    sc = ia.StrengthFunction.constant(grid, creation_only)
    pure = qsc.check_second_fundamental(
        space, qsc.IdentityProcess(), sc, qsc.IdentityProcess(), sc, f, g, 1.0)
    ratio = pure.abs_err_two_term / max(pure.abs_err, 1e-300)
    passed = rep.abs_err < 1e-6 and ratio >= 10.0
    print(f"  three-term {rep.abs_err:.3e}, pure-creation two/three ratio {ratio:.1e}")
    report(6, "second fundamental formula and correction necessity",
           rep.abs_err, 1e-6, passed)


def test_criterion_07_weyl_process():
    endpoint_err = 0.0
    euler_errs = []
    dts = []
    for n_slots in (4, 8, 16, 32, 64):
        grid = qsc.TimeGrid.uniform(1.0, n_slots)
        path = levy.EuclideanPath.constant(grid, [0.4 + 0.1j], np.exp(0.7j) * np.eye(1))
        f = qsc.StepFunction.constant(grid, [0.3])
        g = qsc.StepFunction.constant(grid, [0.2 + 0.1j])
        closed = levy.weyl_matrix_element(f, g, 0.0, 1.0, path)
        endpoint_err = max(endpoint_err,
                           abs(levy.solve_weyl_qsde(f, g, path, "exact")[-1] - closed))
        euler_errs.append(abs(levy.solve_weyl_qsde(f, g, path, "euler")[-1] - closed))
        dts.append(grid.widths[0])
    slope = float(np.polyfit(np.log(dts), np.log(euler_errs), 1)[0])

    grid = qsc.TimeGrid.uniform(1.0, 4)
    path = levy.EuclideanPath.constant(grid, [0.4 + 0.1j], np.exp(0.7j) * np.eye(1))
    f = qsc.StepFunction.constant(grid, [0.3])
    g = qsc.StepFunction.constant(grid, [0.2 + 0.1j])
    dense_err = abs(levy.weyl_matrix_element(f, g, 0.0, 1.0, path)
                    - levy.weyl_matrix_element_dense(f, g, 0.0, 1.0, path, slot_cutoff=12))
    passed = endpoint_err < 1e-10 and abs(slope - 1.0) <= 0.2 and dense_err < 1e-6
    print(f"  exact endpoint {endpoint_err:.3e}, euler slope {slope:.3f}, "
          f"dense oracle {dense_err:.3e}")
    report(7, "Weyl process closed form vs QSDE routes", endpoint_err, 1e-10, passed)


def test_criterion_08_levy_statistics():
    n = 100_000
    bound = 4.0 / np.sqrt(n)
    xs = np.linspace(-3.0, 3.0, 25)
    grid = qsc.TimeGrid.uniform(1.0, 4)
    data1 = levy.LevyStrengthData.homogeneous(grid, [0.6], [[1.5]])
    data2 = levy.LevyStrengthData.homogeneous(
        grid, [0.5, 0.2], np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex))

    sup1 = np.max(np.abs(
        levy.empirical_cf(levy.sample_type1(data1, 1.0, 1008, size=n), xs)
        - np.asarray(levy.type1_cf(xs, 1.0, data1))))
    sup2 = np.max(np.abs(
        levy.empirical_cf(levy.sample_type2(data2, 1.0, 2008, size=n), xs)
        - np.asarray(levy.type2_cf(xs, 1.0, data2))))
    combined = levy.combine(data1, data2, drift=0.0)
    supc = np.max(np.abs(
        levy.empirical_cf(combined.sample(1.0, 3008, size=n), xs)
        - np.asarray(combined.cf(xs, 1.0))))

    basis = fock.FockBasis(1, 14)
    xs_op = np.linspace(-2.0, 2.0, 25)
    op1 = np.max(np.abs(
        levy.operator_vacuum_cf(levy.bounded_type1_operator(basis, [0.6], [[1.5]], 1.0), xs_op)
        - np.asarray(levy.type1_cf(xs_op, 1.0, data1))))
    d2s = levy.LevyStrengthData.homogeneous(grid, [0.5], [[1.0]])
    op2 = np.max(np.abs(
        levy.operator_vacuum_cf(levy.bounded_type2_operator(basis, [0.5], [[1.0]], 1.0), xs_op)
        - np.asarray(levy.type2_cf(xs_op, 1.0, d2s))))

    passed = max(sup1, sup2, supc) <= bound and max(op1, op2) < 1e-5
    print(f"  empirical sup: type1 {sup1:.4f}, type2 {sup2:.4f}, combined {supc:.4f} "
          f"(bound {bound:.4f}); operator route {max(op1, op2):.2e}")
    report(8, "Levy statistics: sampling CLT bound and operator-route CF",
           max(sup1, sup2, supc), bound, passed)


def test_criterion_09_infinite_divisibility():
    xs = np.linspace(-3.0, 3.0, 25)
    rate1 = levy.type1_exponent_rate(xs, [0.6], [[1.5]])
    rate2 = levy.type2_exponent_rate(xs, [0.5, 0.2],
                                     np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex))
    worst = 0.0
    for rate in (rate1, rate2):
        cf_full = np.exp(rate)
        for n in (2, 4, 8, 16):
            worst = max(worst, float(np.max(np.abs(cf_full - np.exp(rate / n) ** n))))
    report(9, "infinite divisibility CF(x,t) = CF(x,t/n)^n", worst, 1e-12, worst < 1e-12)


def test_criterion_10_wiener_isomorphism():
    grid = qsc.TimeGrid.uniform(1.0, 6)
    paths = wiener.BrownianGrid.simulate(grid, 100_000, 424242)
    u = np.array([0.5, -0.3, 0.8, 0.2, -0.6, 0.4])
    v = np.array([0.2, 0.4, -0.1, 0.3, 0.5, -0.2])
    pair = wiener.product_expectation(u, v, paths)
    split = max(wiener.split_product_residual(u, t, paths) for t in (0, 2, 4, 6))
    passed = abs(pair.z_score) <= 5.0 and split < 1e-12
    print(f"  pair z-score {pair.z_score:.2f}, split residual {split:.2e}")
    report(10, "Wiener isomorphism moments and split product",
           abs(pair.z_score), 5.0, passed)
