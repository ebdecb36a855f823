import numpy as np
import pytest

from blerkit.deweight import DeweightState, SnrGrid, batch_loss, partition_batch
from blerkit.rng import derive_stream


class TestSnrGrid:
    def test_uniform_spacing(self):
        g = SnrGrid(1.0, 7.0, 7)
        np.testing.assert_allclose(g.values, [1, 2, 3, 4, 5, 6, 7])
        assert g.center_index == 3
        assert g.values[g.center_index] == 4.0

    def test_single_bin_is_midpoint(self):
        g = SnrGrid(2.0, 6.0, 1)
        np.testing.assert_array_equal(g.values, [4.0])
        assert g.center_index == 0

    def test_point_mode(self):
        g = SnrGrid.point(3.5)
        assert g.num == 1 and g.values[0] == 3.5

    def test_bad_bounds(self):
        with pytest.raises(ValueError):
            SnrGrid(5.0, 5.0, 3)
        with pytest.raises(ValueError):
            SnrGrid(0.0, 1.0, 0)


class TestPartition:
    def test_even_split(self):
        a = partition_batch(200, SnrGrid(0, 9, 10))
        counts = np.bincount(a, minlength=10)
        np.testing.assert_array_equal(counts, np.full(10, 20))

    def test_uneven_split(self):
        a = partition_batch(7, SnrGrid(0, 2, 3))
        np.testing.assert_array_equal(np.bincount(a), [3, 2, 2])

    def test_more_bins_than_samples(self):
        with pytest.raises(ValueError):
            partition_batch(2, SnrGrid(0, 9, 10))


class TestBatchLoss:
    def test_weighted_mean(self):
        state = DeweightState(SnrGrid(0, 1, 2))
        state.weights = np.array([2.0, 1.0])
        value = batch_loss([1.0, 1.0], [0, 1], state)
        assert value == pytest.approx(1.5)
        np.testing.assert_array_equal(state.cum_loss, [1.0, 1.0])

    def test_accumulates_unweighted(self):
        state = DeweightState(SnrGrid(0, 2, 3))
        state.weights = np.array([5.0, 5.0, 5.0])
        batch_loss([1.0, 2.0, 3.0, 4.0], [0, 1, 2, 0], state)
        np.testing.assert_array_equal(state.cum_loss, [5.0, 2.0, 3.0])

    def test_length_mismatch(self):
        state = DeweightState(SnrGrid(0, 1, 2))
        with pytest.raises(ValueError):
            batch_loss([1.0, 2.0, 3.0], [0, 1], state)


class TestEpochUpdate:
    def test_inverse_cumulative_normalized_at_center(self):
        state = DeweightState(SnrGrid(0, 2, 3), delta=0.0 + 1e-300)
        state.cum_loss = np.array([10.0, 5.0, 1.0])
        state.epoch_update()
        np.testing.assert_allclose(state.weights, [0.5, 1.0, 5.0])
        np.testing.assert_array_equal(state.cum_loss, 0.0)

    def test_center_weight_exactly_one(self):
        state = DeweightState(SnrGrid(1, 7, 7), delta=1e-6)
        state.cum_loss = derive_stream(3, "cum").uniform(0.1, 9.0, 7)
        state.epoch_update()
        assert state.weights[3] == 1.0

    def test_empty_bin_bounded_by_delta(self):
        state = DeweightState(SnrGrid(0, 1, 2), delta=1e-6)
        state.cum_loss = np.array([0.0, 1.0])
        state.epoch_update()
        # center bin is index 1; empty bin weight = (1/delta)/(1/(1+delta))
        assert state.weights[0] == pytest.approx((1.0 + 1e-6) / 1e-6)

    def test_range_mode_keeps_uniform_weights(self):
        state = DeweightState(SnrGrid(1, 7, 7), adaptive=False)
        state.cum_loss = np.arange(1.0, 8.0)
        state.epoch_update()
        np.testing.assert_array_equal(state.weights, 1.0)
        np.testing.assert_array_equal(state.cum_loss, 0.0)


def test_fixed_point_equalizes_weighted_bin_losses():
    # if per-bin losses are stationary, the update drives w_j * c_j to a
    # constant across bins after one step
    base = np.array([8.0, 4.0, 2.0, 1.0, 0.5])
    state = DeweightState(SnrGrid(0, 4, 5), delta=1e-12)
    for _ in range(3):
        state.cum_loss = base.copy()
        state.epoch_update()
    products = state.weights * base
    assert np.max(np.abs(products - products[state.grid.center_index]
                         * np.ones_like(products))) <= 1e-9
