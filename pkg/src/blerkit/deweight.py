"""SNR grid handling and the deweighted training schedule.

Each batch of N Monte-Carlo samples is partitioned round-robin over J SNR
bins drawn from a uniform (in dB) grid.  The batch loss is the weighted
mean (1/N) sum_j sum_{n in bin j} w_j * l_n.  After every epoch the weights
become the inverse cumulative (unweighted) bin losses, normalized so the
grid-center weight is exactly 1; a constant delta > 0 bounds the weights
when a bin accumulates no loss.
"""

import numpy as np


class SnrGrid:
    """J uniformly spaced (in dB) SNR values covering [lo, hi]."""

    def __init__(self, lo, hi, num):
        if num < 1:
            raise ValueError("grid needs at least one bin")
        if num == 1:
            self.values = np.array([0.5 * (lo + hi)])
        else:
            if hi <= lo:
                raise ValueError("grid needs hi > lo")
            self.values = np.linspace(lo, hi, num)
        self.num = num

    @classmethod
    def point(cls, snr_db):
        g = cls.__new__(cls)
        g.values = np.array([float(snr_db)])
        g.num = 1
        return g

    @property
    def center_index(self):
        return self.num // 2


class DeweightState:
    """Per-bin weights and cumulative losses for one training run."""

    def __init__(self, grid, delta=1e-6, adaptive=True):
        self.grid = grid
        self.delta = float(delta)
        self.adaptive = adaptive   # False = "range" mode: weights stay at 1
        self.weights = np.ones(grid.num)
        self.cum_loss = np.zeros(grid.num)

    def epoch_update(self):
        """Set weights to normalized inverse cumulative losses; reset the accumulator."""
        if self.adaptive:
            wt = 1.0 / (self.cum_loss + self.delta)
            self.weights = wt / wt[self.grid.center_index]
        self.cum_loss = np.zeros(self.grid.num)


def partition_batch(num_samples, grid):
    """Round-robin sample -> bin assignment; bin sizes differ by at most one."""
    if grid.num > num_samples:
        raise ValueError("more SNR bins (%d) than samples (%d)" % (grid.num, num_samples))
    return np.arange(num_samples) % grid.num


def batch_loss(per_sample_losses, assignment, state):
    """Weighted batch mean per the deweighting rule; accumulates unweighted bin losses."""
    l = np.asarray(per_sample_losses, dtype=float)
    a = np.asarray(assignment)
    if l.shape != a.shape:
        raise ValueError("losses and assignment differ in length")
    np.add.at(state.cum_loss, a, l)
    return float(np.sum(state.weights[a] * l) / len(l))
