import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from movingframe.errors import DomainError, WindowError
from movingframe.semigroups import (
    DiagonalGroup,
    DiagonalSemigroup,
    GroupFrame,
    TranslationGroup,
    build_dilation,
    dilation_diagram_error,
    shift_axis,
)
from movingframe.spaces import GridFunction, SpatialGrid


class TestDiagonal:
    def test_identity_at_zero(self, rng):
        v = rng.standard_normal(5)
        np.testing.assert_array_equal(DiagonalSemigroup.default(5).apply(0.0, v), v)

    def test_second_mode_decay(self):
        v = np.array([0.0, 1.0, 0.0])
        out = DiagonalSemigroup.default(3).apply(1.0, v)
        assert out[1] == pytest.approx(np.exp(-2.0))
        assert out[1] == pytest.approx(0.13534, abs=1e-5)

    def test_contraction(self, rng):
        s = DiagonalSemigroup.default(6)
        for t in rng.uniform(0.01, 3.0, size=20):
            v = rng.standard_normal(6)
            assert np.linalg.norm(s.apply(t, v)) <= np.linalg.norm(v)

    def test_negative_time_only_for_group(self):
        with pytest.raises(DomainError):
            DiagonalSemigroup.default(2).apply(-1.0, np.ones(2))
        np.testing.assert_allclose(DiagonalGroup(np.array([1.0, 2.0])).apply(-1.0, np.ones(2)), np.exp([1.0, 2.0]))

    def test_acts_on_columns(self, rng):
        s = DiagonalSemigroup.default(3)
        m = rng.standard_normal((3, 4))
        np.testing.assert_allclose(s.apply(0.5, m), np.diag(np.exp(-0.5 * np.arange(1, 4))) @ m)


class TestTranslation:
    def test_indicator_shift(self):
        grid = SpatialGrid(-1.0, 1.0, 0.25)
        x = grid.x
        f = GridFunction(grid, ((x >= 0) & (x < 0.5)).astype(float))
        g = TranslationGroup(grid).apply(0.25, f)
        np.testing.assert_array_equal(g.values, ((x >= -0.25) & (x < 0.25)).astype(float))

    def test_adjoint_for_interior_support(self, rng):
        grid = SpatialGrid(-4.0, 4.0, 0.125)
        interior = np.abs(grid.x) < 2
        f = GridFunction(grid, rng.standard_normal(grid.n_points) * interior)
        g = GridFunction(grid, rng.standard_normal(grid.n_points) * interior)
        U = TranslationGroup(grid)
        assert U.apply(0.75, f).inner(g) == pytest.approx(f.inner(U.apply(-0.75, g)), abs=1e-13)


def test_shift_axis_zero_fill():
    a = np.arange(5.0)
    np.testing.assert_array_equal(shift_axis(a, 2, 0), [2, 3, 4, 0, 0])
    np.testing.assert_array_equal(shift_axis(a, -1, 0), [0, 0, 1, 2, 3])
    assert not shift_axis(a, 7, 0).any()


class TestDilation:
    def test_projection_inverts_embedding(self, line, rng):
        frame = build_dilation(np.arange(1.0, 9.0), line)
        v = rng.standard_normal(8)
        np.testing.assert_allclose(frame.project(frame.embed(v)), v, atol=1e-12)

    def test_modes_are_orthonormal(self, line):
        frame = build_dilation(np.arange(1.0, 5.0), line)
        gram = np.array([[frame.inner(frame.embed(np.eye(4)[j]), frame.embed(np.eye(4)[k])) for k in range(4)] for j in range(4)])
        np.testing.assert_allclose(gram, np.eye(4), atol=1e-13)

    def test_first_mode_overlap(self, line):
        frame = build_dilation(np.array([1.0]), line)
        f = frame.embed(np.array([1.0]))
        assert abs(frame.inner(f, frame.apply(1.0, f)) - np.exp(-1.0)) <= 1e-6

    def test_geometric_sum_formula(self, line):
        lam, t = 1.0, 1.0
        frame = build_dilation(np.array([lam]), line)
        f = frame.embed(np.array([1.0]))
        exact = (np.exp(-lam * t) - np.exp(lam * t + 2 * lam * line.x_min)) / (1 - np.exp(2 * lam * line.x_min))
        assert frame.inner(f, frame.apply(t, f)) == pytest.approx(exact, rel=1e-12)

    def test_diagram(self, line):
        frame = build_dilation(np.arange(1.0, 9.0), line)
        assert dilation_diagram_error(frame, [0.0]) == pytest.approx(0.0, abs=1e-12)
        assert dilation_diagram_error(frame, [0.25, 0.5, 1.0, 2.0]) <= 1e-6

    def test_error_shrinks_with_window(self):
        errs = []
        for x_min in (-4.0, -8.0, -12.0):
            frame = build_dilation(np.array([1.0]), SpatialGrid(x_min, 4.0, 1.0 / 16), tail_tol=1.0)
            errs.append(dilation_diagram_error(frame, [1.0]))
        assert errs[0] > errs[1] > errs[2]

    def test_window_checks(self):
        with pytest.raises(WindowError):
            build_dilation(np.array([1.0]), SpatialGrid(-4.0, 4.0, 1.0 / 16))
        with pytest.raises(WindowError):
            build_dilation(np.array([1.0]), SpatialGrid(-12.0, 1.0, 1.0 / 16), t_end=2.0)

    def test_group_law_and_unitarity(self, line, rng):
        frame = build_dilation(np.arange(1.0, 3.0), line)
        g = np.zeros(frame.shape)
        mid = np.abs(line.x + 4) < 2
        g[:, mid] = rng.standard_normal((2, mid.sum()))
        np.testing.assert_array_equal(frame.apply(0.0, g), g)
        np.testing.assert_array_equal(frame.apply(0.5, frame.apply(0.75, g)), frame.apply(1.25, g))
        assert frame.norm(frame.apply(1.5, g)) == pytest.approx(frame.norm(g), rel=1e-14)

    def test_project_shifted_matches_composition(self, line, rng):
        frame = build_dilation(np.arange(1.0, 4.0), line)
        g = rng.standard_normal(frame.shape + (2,))
        for t in (-1.0, 0.0, 0.5, 3.0):
            np.testing.assert_allclose(frame.project_shifted(t, g), frame.project(frame.apply(t, g)), atol=1e-12)

    def test_summary_is_serializable(self, line):
        import json

        json.dumps(build_dilation(np.arange(1.0, 3.0), line).summary())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_adjointness_and_isometry(seed):
    r = np.random.default_rng(seed)
    frame = build_dilation(np.arange(1.0, 9.0), SpatialGrid(-12.0, 4.0, 1.0 / 16))
    v = r.standard_normal(8)
    g = r.standard_normal(frame.shape)
    assert abs(frame.inner(frame.embed(v), g) - v @ frame.project(g)) <= 1e-12
    assert abs(frame.norm(frame.embed(v)) - np.linalg.norm(v)) <= 1e-12


def test_complement_is_orthogonal_projection(line, rng):
    frame = build_dilation(np.arange(1.0, 4.0), line)
    g = rng.standard_normal(frame.shape)
    c = frame.complement(g)
    np.testing.assert_allclose(frame.project(c), 0.0, atol=1e-12)
    np.testing.assert_allclose(frame.complement(c), c, atol=1e-12)


def test_group_frame_is_trivial():
    gf = GroupFrame(DiagonalGroup(np.array([1.0, 2.0])))
    v = np.array([1.0, -2.0])
    np.testing.assert_array_equal(gf.project(gf.embed(v)), v)
    assert not gf.complement(v).any()
