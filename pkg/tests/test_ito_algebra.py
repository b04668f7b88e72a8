import numpy as np
import pytest

from fockbench import ito_algebra as ia
from fockbench.numerics import max_abs, random_cmatrix, random_cvector
from fockbench.qsc import StepFunction, TimeGrid


def random_ito(rng, dim=2):
    return ia.ItoMatrix(
        alpha=complex(random_cvector(rng, 1)[0]),
        bra=random_cvector(rng, dim),
        ket=random_cvector(rng, dim),
        op=random_cmatrix(rng, dim),
    )


def ito_distance(a, b):
    return max(abs(a.alpha - b.alpha), max_abs(a.bra - b.bra),
               max_abs(a.ket - b.ket), max_abs(a.op - b.op))


def test_circ_annihilates_zero():
    rng = np.random.default_rng(0)
    n = random_ito(rng)
    out = ia.circ(n, ia.ItoMatrix.zero(2))
    assert ito_distance(out, ia.ItoMatrix.zero(2)) == 0.0


def test_circ_drops_input_alphas():
    e1 = np.array([1.0, 0.0], dtype=complex)
    n = ia.ItoMatrix(7.0, e1, e1, np.eye(2))
    out = ia.circ(n, n)
    expected = ia.ItoMatrix(1.0, e1, e1, np.eye(2))
    assert ito_distance(out, expected) < 1e-15


def test_circ_associative():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n1, n2, n3 = (random_ito(rng) for _ in range(3))
        left = ia.circ(ia.circ(n1, n2), n3)
        right = ia.circ(n1, ia.circ(n2, n3))
        assert ito_distance(left, right) < 1e-12


def test_circ_matches_sandwich_oracle():
    rng = np.random.default_rng(2)
    for _ in range(50):
        n1, n2 = random_ito(rng), random_ito(rng)
        assert ito_distance(ia.circ(n1, n2), ia.circ_sandwich(n1, n2)) < 1e-12


def test_circ_dimension_mismatch():
    rng = np.random.default_rng(3)
    with pytest.raises(ValueError, match="mismatch"):
        ia.circ(random_ito(rng, 2), random_ito(rng, 3))


def test_dagger_involution_bitwise():
    rng = np.random.default_rng(4)
    n = random_ito(rng)
    back = ia.dagger(ia.dagger(n))
    assert back.alpha == n.alpha
    assert np.array_equal(back.bra, n.bra)
    assert np.array_equal(back.ket, n.ket)
    assert np.array_equal(back.op, n.op)
    assert ito_distance(ia.dagger(ia.ItoMatrix.zero(2)), ia.ItoMatrix.zero(2)) == 0.0


def test_dagger_anti_multiplicative():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n1, n2 = random_ito(rng), random_ito(rng)
        left = ia.dagger(ia.circ(n1, n2))
        right = ia.circ(ia.dagger(n2), ia.dagger(n1))
        assert ito_distance(left, right) < 1e-12


def test_block_roundtrip():
    rng = np.random.default_rng(6)
    n = random_ito(rng, 3)
    assert ito_distance(ia.from_block(ia.to_block(n)), n) < 1e-15


def test_nu_special_cases():
    rng = np.random.default_rng(7)
    n = random_ito(rng)
    zeros = np.zeros(2)
    assert ia.nu(n, zeros, zeros) == n.alpha
    only_op = ia.ItoMatrix(0.0, zeros, zeros, np.eye(2))
    f = random_cvector(rng, 2)
    g = random_cvector(rng, 2)
    assert abs(ia.nu(only_op, f, g) - np.vdot(f, g)) < 1e-14


def test_nu_adjoint_identity():
    rng = np.random.default_rng(8)
    for _ in range(100):
        n = random_ito(rng)
        f = random_cvector(rng, 2)
        g = random_cvector(rng, 2)
        assert abs(ia.nu(ia.dagger(n), f, g) - np.conj(ia.nu(n, g, f))) < 1e-14


def test_nu_linear_in_strength():
    rng = np.random.default_rng(9)
    n1, n2 = random_ito(rng), random_ito(rng)
    f = random_cvector(rng, 2)
    g = random_cvector(rng, 2)
    c = 0.7 + 0.2j
    combined = ia.nu(n1.scale(c) + n2, f, g)
    assert abs(combined - (c * ia.nu(n1, f, g) + ia.nu(n2, f, g))) < 1e-13


def test_nu_dimension_mismatch():
    rng = np.random.default_rng(10)
    with pytest.raises(ValueError):
        ia.nu(random_ito(rng, 2), np.zeros(3), np.zeros(3))


def test_nu_integral():
    grid = TimeGrid.uniform(2.0, 4)
    f = StepFunction.constant(grid, [0.0, 0.0])
    g = StepFunction.constant(grid, [0.0, 0.0])
    n = ia.ItoMatrix(0.5 + 0.25j, np.zeros(2), np.zeros(2), np.zeros((2, 2)))
    strength = ia.StrengthFunction.constant(grid, n)
    assert ia.nu_integral(strength, f, g, 0.0) == 0.0
    assert abs(ia.nu_integral(strength, f, g, 2.0) - (0.5 + 0.25j) * 2.0) < 1e-14


def test_nu_integral_two_slot_manual():
    grid = TimeGrid(np.array([0.0, 0.5, 2.0]))
    rng = np.random.default_rng(11)
    n1, n2 = random_ito(rng), random_ito(rng)
    strength = ia.StrengthFunction(grid, [n1, n2])
    fv = np.array([random_cvector(rng, 2), random_cvector(rng, 2)])
    gv = np.array([random_cvector(rng, 2), random_cvector(rng, 2)])
    f = StepFunction(grid, fv)
    g = StepFunction(grid, gv)
    manual = ia.nu(n1, fv[0], gv[0]) * 0.5 + ia.nu(n2, fv[1], gv[1]) * 1.5
    assert abs(ia.nu_integral(strength, f, g, 2.0) - manual) < 1e-14


def test_nu_integral_off_grid_rejected():
    grid = TimeGrid.uniform(1.0, 4)
    f = StepFunction.constant(grid, [0.0])
    strength = ia.StrengthFunction.constant(grid, ia.ItoMatrix.zero(1))
    with pytest.raises(ValueError, match="grid point"):
        ia.nu_integral(strength, f, f, 0.37)


def test_serialization_roundtrip():
    rng = np.random.default_rng(12)
    n = random_ito(rng, 3)
    doc = ia.ito_to_document(n)
    back = ia.ito_from_document(doc)
    assert ito_distance(n, back) < 1e-15


def test_strength_function_slot_count():
    grid = TimeGrid.uniform(1.0, 3)
    with pytest.raises(ValueError, match="slot values"):
        ia.StrengthFunction(grid, [ia.ItoMatrix.zero(1)] * 2)
