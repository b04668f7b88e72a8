import numpy as np
import pytest

from fockbench import qsc, wiener

U = np.array([0.5, -0.3, 0.8, 0.2, -0.6, 0.4])
V = np.array([0.2, 0.4, -0.1, 0.3, 0.5, -0.2])


def make_paths(n_paths=100_000, seed=12345):
    grid = qsc.TimeGrid.uniform(1.0, 6)
    return wiener.BrownianGrid.simulate(grid, n_paths, seed)


def test_zero_integrand_gives_one():
    paths = make_paths(n_paths=50)
    np.testing.assert_allclose(wiener_values := wiener.wiener_exponential(np.zeros(6), paths),
                               np.ones(50))
    assert wiener_values.shape == (50,)


def test_mean_is_one():
    paths = make_paths()
    report = wiener.mean_exponential(U, paths)
    assert abs(report.z_score) <= 5.0
    assert report.n_paths == 100_000


def test_pair_overlap_expectation():
    paths = make_paths()
    report = wiener.product_expectation(U, V, paths)
    assert abs(report.z_score) <= 5.0
    assert abs(report.target - np.exp(np.sum(U * V) / 6.0)) < 1e-12


def test_second_moment():
    paths = make_paths()
    report = wiener.second_moment(U, paths)
    assert abs(report.z_score) <= 5.0


def test_split_product_identity_exact():
    paths = make_paths(n_paths=10_000)
    for t_index in (0, 3, 6):
        assert wiener.split_product_residual(U, t_index, paths) < 1e-12


def test_conditional_projection_check():
    paths = make_paths()
    report = wiener.conditional_projection_check(U, 3, paths)
    assert report.max_split_residual < 1e-12
    assert abs(report.mean_report.z_score) <= 5.0
    doc = report.to_dict()
    assert set(doc) == {"n_paths", "max_split_residual", "mean"}
    # conditioning on the full path is no conditioning at all
    full = wiener.conditional_projection_check(U, 6, paths)
    assert full.mean_report.estimate == 1.0


def test_seed_determinism_bitwise():
    a = make_paths(n_paths=1000, seed=77)
    b = make_paths(n_paths=1000, seed=77)
    assert np.array_equal(a.increments, b.increments)
    c = make_paths(n_paths=1000, seed=78)
    assert not np.array_equal(a.increments, c.increments)


def test_shape_validation():
    grid = qsc.TimeGrid.uniform(1.0, 6)
    paths = wiener.BrownianGrid.simulate(grid, 10, 1)
    with pytest.raises(ValueError, match="one real value per slot"):
        wiener.wiener_exponential(np.zeros(4), paths)
    with pytest.raises(ValueError, match="n_paths"):
        wiener.BrownianGrid(grid, np.zeros((3, 4)))
