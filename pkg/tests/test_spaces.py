import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from movingframe.errors import CommensurabilityError, DimensionError, OffGridError
from movingframe.spaces import (
    GridFunction,
    PathRecord,
    SpatialGrid,
    TimeGrid,
    is_adapted,
    norm,
    path_metric_rho,
    prefix_freeze,
    sup_distance,
)


class TestTimeGrid:
    def test_times_and_index(self):
        g = TimeGrid(1.0, 8)
        assert g.dt == 0.125
        assert g.times[-1] == 1.0
        assert g.index_of(0.375) == 3

    def test_off_grid_time_raises(self):
        with pytest.raises(OffGridError):
            TimeGrid(1.0, 8).index_of(0.3)

    @pytest.mark.parametrize("t_end, n", [(0.0, 4), (-1.0, 4), (1.0, 0), (1.0, -3)])
    def test_rejects_degenerate(self, t_end, n):
        with pytest.raises(ValueError):
            TimeGrid(t_end, n)

    def test_truncate_keeps_spacing(self):
        g = TimeGrid(1.0, 16).truncate(4)
        assert g.n_steps == 4 and g.t_end == pytest.approx(0.25)


class TestSpatialGrid:
    def test_points(self):
        g = SpatialGrid(0.0, 1.0, 0.25)
        assert g.n_points == 5
        np.testing.assert_allclose(g.x, [0, 0.25, 0.5, 0.75, 1.0])

    def test_shift_must_be_multiple_of_h(self):
        g = SpatialGrid(0.0, 1.0, 0.25)
        assert g.steps(0.5) == 2
        with pytest.raises(CommensurabilityError):
            g.steps(0.3)

    def test_window_must_fit_spacing(self):
        with pytest.raises(CommensurabilityError):
            SpatialGrid(0.0, 1.0, 0.3)


def test_norm_examples():
    assert norm(np.zeros(4)) == 0.0
    e1 = np.zeros(8)
    e1[0] = 1.0
    assert norm(e1) == 1.0
    f = GridFunction(SpatialGrid(0.0, 1.0, 0.25), np.ones(5))
    assert norm(f) == pytest.approx(np.sqrt(0.25 * 5))
    assert norm(f) == pytest.approx(1.1180, abs=1e-4)


def _const_path(grid, c, dim=2):
    return PathRecord(grid, np.tile(c, (grid.n_steps + 1, 1)) if np.ndim(c) else np.full((grid.n_steps + 1, dim), c))


class TestPathMetric:
    def test_zero_on_identical_paths(self, rng):
        g = TimeGrid(4.0, 32)
        w = PathRecord(g, rng.standard_normal((33, 3)))
        assert path_metric_rho(w, w, 4) == 0.0

    def test_geometric_series_example(self):
        g = TimeGrid(20.0, 40)
        w1 = _const_path(g, np.array([0.0, 0.0]))
        w2 = _const_path(g, np.array([0.3, 0.4]))
        assert path_metric_rho(w1, w2, 20) == pytest.approx(0.5 * (1 - 2.0**-20), rel=1e-14)

    def test_k_max_beyond_horizon_rejected(self):
        g = TimeGrid(2.0, 8)
        w = _const_path(g, 0.0)
        with pytest.raises(ValueError):
            path_metric_rho(w, w, 3)

    def test_grid_mismatch(self):
        a = _const_path(TimeGrid(1.0, 4), 0.0)
        b = _const_path(TimeGrid(1.0, 8), 0.0)
        with pytest.raises(DimensionError):
            sup_distance(a, b)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 10.0))
def test_rho_is_bounded_pseudometric(seed, scale):
    r = np.random.default_rng(seed)
    g = TimeGrid(3.0, 12)
    w1, w2, w3 = (PathRecord(g, scale * r.standard_normal((13, 2))) for _ in range(3))
    d12, d21 = path_metric_rho(w1, w2, 3), path_metric_rho(w2, w1, 3)
    assert d12 == d21
    assert 0.0 <= d12 <= 1.0
    assert path_metric_rho(w1, w3, 3) <= d12 + path_metric_rho(w2, w3, 3) + 1e-15


class TestPrefixFreeze:
    def test_at_end_and_start(self, rng):
        g = TimeGrid(1.0, 10)
        w = PathRecord(g, rng.standard_normal((11, 2)))
        np.testing.assert_array_equal(prefix_freeze(w, 1.0).states, w.states)
        frozen = prefix_freeze(w, 0.0)
        np.testing.assert_array_equal(frozen.states, np.tile(w.states[0], (11, 1)))

    def test_linear_path(self):
        g = TimeGrid(1.0, 10)
        states = np.zeros((11, 2))
        states[:, 0] = g.times
        frozen = prefix_freeze(PathRecord(g, states), 0.5)
        np.testing.assert_allclose(frozen.states[:, 0], np.minimum(g.times, 0.5))


def test_adaptedness_detects_lookahead(rng):
    g = TimeGrid(1.0, 10)
    w = PathRecord(g, rng.standard_normal((11, 2)))
    causal = lambda t, p: p.states[: p.grid.index_of(t) + 1].sum(axis=0)
    peeking = lambda t, p: p.states[-1]
    assert is_adapted(causal, w)
    assert not is_adapted(peeking, w)


def test_prefix_is_read_only(rng):
    g = TimeGrid(1.0, 10)
    w = PathRecord(g, rng.standard_normal((11, 2)))
    p = w.prefix(4)
    assert p.grid.n_steps == 4
    with pytest.raises(ValueError):
        p.states[0, 0] = 1.0
    first = w.prefix(0)
    assert first.grid.n_steps == 1
    np.testing.assert_array_equal(first.states[1], w.states[0])
