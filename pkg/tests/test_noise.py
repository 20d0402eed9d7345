import numpy as np
import pytest

from movingframe.errors import DimensionError, SingularEmbeddingError
from movingframe.noise import (
    QWienerPath,
    associate_q_wiener,
    recover_components,
    sample_driver,
    write_driver_csv,
    zero_driver,
)
from movingframe.spaces import TimeGrid


def test_same_stream_is_bitwise_identical():
    g = TimeGrid(1.0, 128)
    a = sample_driver(g, 3, seed=9, stream_id=4)
    b = sample_driver(g, 3, seed=9, stream_id=4)
    assert np.array_equal(a.increments, b.increments)
    c = sample_driver(g, 3, seed=9, stream_id=5)
    assert not np.array_equal(a.increments, c.increments)


def test_increment_variance_and_independence():
    n = 2**14
    g = TimeGrid(1.0, n)
    one = sample_driver(g, 1, seed=1).increments[:, 0]
    assert abs(one.var() / g.dt - 1.0) <= 5.0 / np.sqrt(n)
    two = sample_driver(g, 2, seed=2).increments
    assert abs(np.corrcoef(two.T)[0, 1]) < 0.05


def test_coarsen_sums_blocks():
    g = TimeGrid(1.0, 16)
    d = sample_driver(g, 2, seed=0)
    c = d.coarsen(4)
    assert c.grid.n_steps == 4
    np.testing.assert_allclose(c.cumulative(), d.cumulative()[::4], atol=1e-15)
    with pytest.raises(DimensionError):
        d.coarsen(3)


class TestQWiener:
    def test_identity_embedding_is_partial_sum(self):
        d = sample_driver(TimeGrid(1.0, 32), 3, seed=3)
        q = associate_q_wiener(d, np.ones(3))
        np.testing.assert_array_equal(q.cumulative, d.cumulative())

    def test_zero_driver(self):
        q = associate_q_wiener(zero_driver(TimeGrid(1.0, 8), 2))
        assert not q.cumulative.any()

    def test_second_mode_variance(self):
        n = 2**13
        g = TimeGrid(1.0, 4)
        ends = np.array([associate_q_wiener(sample_driver(g, 2, 11, p)).cumulative[-1, 1] for p in range(n)])
        assert abs(ends.var() / 0.25 - 1.0) <= 5.0 * np.sqrt(2.0 / n)

    def test_recover_is_inverse(self):
        d = sample_driver(TimeGrid(1.0, 64), 4, seed=5)
        back = recover_components(associate_q_wiener(d))
        np.testing.assert_allclose(back.increments, d.increments, rtol=1e-13, atol=1e-15)

    def test_recover_scales_by_inverse_root(self):
        g = TimeGrid(1.0, 2)
        cum = np.zeros((3, 3))
        cum[1:, 2] = [1.0, 2.0]
        q = QWienerPath(g, cum, 1.0 / np.arange(1, 4) ** 2)
        np.testing.assert_allclose(recover_components(q).increments[:, 2], [3.0, 3.0])

    def test_zero_eigenvalue_rejected(self):
        q = QWienerPath(TimeGrid(1.0, 2), np.zeros((3, 2)), np.array([1.0, 0.0]))
        with pytest.raises(SingularEmbeddingError):
            recover_components(q)

    def test_non_injective_j_rejected(self):
        d = sample_driver(TimeGrid(1.0, 4), 2, seed=0)
        with pytest.raises(ValueError):
            associate_q_wiener(d, np.array([1.0, 0.0]))


def test_driver_csv_header(tmp_path):
    d = sample_driver(TimeGrid(1.0, 4), 2, seed=0)
    path = write_driver_csv(d, tmp_path / "d.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "t,beta_1,beta_2"
    assert len(lines) == 6
