import numpy as np
import pytest

from movingframe.moving_frame import (
    CoefficientPair,
    coeff_a,
    coeff_b,
    delta,
    frame_coefficients,
    gamma,
    lift_hat_coefficients,
    project_Z_to_X,
    x_from_y,
    y_from_x,
)
from movingframe.noise import sample_driver, zero_driver
from movingframe.semigroups import DiagonalGroup, DiagonalSemigroup, GroupFrame, build_dilation
from movingframe.solvers import euler_maruyama, exp_euler_mild
from movingframe.spaces import PathRecord, SpatialGrid, TimeGrid, is_adapted, sup_distance

RATES = np.arange(1.0, 4.0)


@pytest.fixture(scope="module")
def frame():
    return build_dilation(RATES, SpatialGrid(-12.0, 1.25, 1.0 / 32), t_end=1.0)


@pytest.fixture
def grid():
    return TimeGrid(1.0, 32)


def _random_path(rng, grid, shape):
    return PathRecord(grid, rng.standard_normal((grid.n_steps + 1,) + shape))


def test_coefficient_maps_at_time_zero(frame, grid, rng):
    alpha = lambda t, w: np.array([1.0, 0.0, -1.0])
    sigma = lambda t, w: np.ones((3, 2))
    coeffs = CoefficientPair(alpha, sigma)
    w = _random_path(rng, grid, (3,))
    np.testing.assert_array_equal(coeff_a(frame, coeffs, 0.0, w), frame.embed(alpha(0.0, w)))
    assert coeff_b(frame, coeffs, 0.5, w).shape == frame.shape + (2,)
    zero = CoefficientPair(lambda t, w: np.zeros(3), sigma)
    assert not coeff_a(frame, zero, 0.5, w).any()


def test_transported_unit_drift_projects_to_decay(frame, grid):
    coeffs = CoefficientPair(lambda t, w: np.eye(3)[0], lambda t, w: np.zeros((3, 1)))
    w = PathRecord(grid, np.zeros((grid.n_steps + 1, 3)))
    a = coeff_a(frame, coeffs, 1.0, w)
    assert frame.project_shifted(1.0, a)[0] == pytest.approx(1.0, abs=1e-12)
    assert frame.project(a)[0] == pytest.approx(np.exp(-1.0), abs=1e-6)


class TestGammaDelta:
    def test_zero_paths(self, frame, grid):
        z = PathRecord(grid, np.zeros((grid.n_steps + 1, 3)))
        assert not gamma(frame, delta(frame, z)).states.any()

    def test_right_inverse(self, frame, grid, rng):
        for _ in range(5):
            v = _random_path(rng, grid, (3,))
            assert sup_distance(gamma(frame, delta(frame, v)), v) <= 1e-12

    def test_constant_embedded_path_gives_semigroup(self, frame, grid):
        v = np.array([1.0, -0.5, 2.0])
        w = PathRecord(grid, np.tile(frame.embed(v), (grid.n_steps + 1, 1, 1)))
        expected = np.stack([DiagonalSemigroup(RATES).apply(t, v) for t in grid.times])
        np.testing.assert_allclose(gamma(frame, w).states, expected, atol=1e-6)

    def test_correction_vanishes_for_embedded_start(self, frame, grid, rng):
        states = rng.standard_normal((grid.n_steps + 1,) + frame.shape)
        states[0] = frame.embed(rng.standard_normal(3))
        w = PathRecord(grid, states)
        np.testing.assert_allclose(gamma(frame, w).states, gamma(frame, w, correct=False).states, atol=1e-13)

    def test_group_case_is_bijective(self, grid, rng):
        gf = GroupFrame(DiagonalGroup(RATES))
        w = _random_path(rng, grid, (3,))
        assert sup_distance(delta(gf, gamma(gf, w)), w) <= 1e-12
        assert sup_distance(gamma(gf, delta(gf, w)), w) <= 1e-12
        other = _random_path(rng, grid, (3,))
        assert sup_distance(gamma(gf, w), gamma(gf, other)) > 0


class TestLiftedCoefficients:
    def test_embedded_path(self, frame, grid, rng):
        alpha = lambda t, x: np.sin(x)
        sigma = lambda t, x: np.outer(x, [1.0, 0.5])
        coeffs = CoefficientPair.from_state(alpha, sigma)
        v = _random_path(rng, grid, (3,))
        w = PathRecord(grid, np.stack([frame.embed(s) for s in v.states]))
        hat = lift_hat_coefficients(frame, coeffs)
        np.testing.assert_allclose(hat.alpha(0.5, w), frame.embed(alpha(0.5, v.at(0.5))), atol=1e-12)
        np.testing.assert_allclose(project_Z_to_X(frame, w).states, v.states, atol=1e-12)

    def test_adaptedness_is_inherited(self, frame, rng):
        g = TimeGrid(1.0, 8)
        running_mean = CoefficientPair(
            lambda t, w: w.states[: w.grid.index_of(t) + 1].mean(axis=0),
            lambda t, w: np.zeros((3, 1)),
        )
        w = PathRecord(g, rng.standard_normal((9,) + frame.shape))
        assert is_adapted(lift_hat_coefficients(frame, running_mean).alpha, w, atol=1e-14)
        assert is_adapted(frame_coefficients(frame, running_mean).alpha, w, atol=1e-14)


class TestCorrespondence:
    def test_y_from_x_trivial_coefficients(self, frame, grid, rng):
        x0 = np.array([0.3, -0.2, 0.1])
        X = PathRecord(grid, np.tile(x0, (grid.n_steps + 1, 1)))
        zero = CoefficientPair(lambda t, w: np.zeros(3), lambda t, w: np.eye(3))
        Y = y_from_x(frame, zero, X, zero_driver(grid, 3))
        np.testing.assert_array_equal(Y.states, np.tile(frame.embed(x0), (grid.n_steps + 1, 1, 1)))

    def test_deterministic_drift_matches_convolution(self, frame):
        g = TimeGrid(1.0, 256)
        big = build_dilation(RATES, SpatialGrid(-12.0, 1.25, 1.0 / 256), t_end=1.0)
        coeffs = CoefficientPair(lambda t, w: np.eye(3)[0], lambda t, w: np.zeros((3, 3)))
        X = PathRecord(g, np.zeros((257, 3)))
        Y = y_from_x(big, coeffs, X, zero_driver(g, 3))
        got = x_from_y(big, Y).at(1.0)[0]
        assert abs(got - (1 - np.exp(-1.0))) <= 2 * g.dt

    def test_constant_y_is_semigroup_orbit(self, frame, grid):
        x0 = np.array([1.0, 1.0, 1.0])
        Y = PathRecord(grid, np.tile(frame.embed(x0), (grid.n_steps + 1, 1, 1)))
        X = x_from_y(frame, Y)
        np.testing.assert_allclose(X.at(1.0), np.exp(-RATES) * x0, atol=1e-6)

    def test_frame_sde_reproduces_mild_scheme(self, frame, grid):
        coeffs = CoefficientPair.from_state(lambda t, x: -x, lambda t, x: np.diag(1.0 / RATES))
        driver = sample_driver(grid, 3, seed=4)
        x0 = np.full(3, 0.5)
        X = exp_euler_mild(DiagonalSemigroup(RATES), coeffs, x0, driver)
        Y = euler_maruyama(frame_coefficients(frame, coeffs), frame.embed(x0), driver, weight=frame.weight)
        assert sup_distance(X, x_from_y(frame, Y)) <= 1e-6
        # the same Y is also the frame transport of X itself
        assert sup_distance(Y, y_from_x(frame, coeffs, X, driver)) <= 1e-6

    def test_path_dependent_coefficients(self, frame, grid):
        memory = CoefficientPair(
            lambda t, w: -w.states[: w.grid.index_of(t) + 1].mean(axis=0),
            lambda t, w: np.diag(1.0 / RATES),
        )
        driver = sample_driver(grid, 3, seed=8)
        x0 = np.full(3, 0.5)
        X = exp_euler_mild(DiagonalSemigroup(RATES), memory, x0, driver)
        Y = euler_maruyama(frame_coefficients(frame, memory), frame.embed(x0), driver, weight=frame.weight)
        assert sup_distance(X, x_from_y(frame, Y)) <= 1e-6
