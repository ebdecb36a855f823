"""Two-phase training of the unfolded decoder.

Phase 1 pre-trains with BCE, phase 2 fine-tunes with the configured loss.
Every batch: sample information bits, encode, QPSK-map, add AWGN at the
per-sample SNRs from the grid assignment, demap, decode, evaluate the loss
on the information-bit logits, aggregate with the deweighting rule, and take
one Adam step on (beta_raw, edge_weights).  SNR deweighting (when enabled)
is active during fine-tuning only; pre-training always uses unit weights.
Everything is deterministic given the master seed.
"""

import time
from dataclasses import dataclass, field, asdict

import numpy as np

from . import channel, losses
from .autodiff import decoder_loss_and_gradient
from .decoder import DecoderParams
from .deweight import SnrGrid, DeweightState, partition_batch, batch_loss
from .rng import derive_stream


@dataclass
class TrainConfig:
    pre_batches: int = 300
    fine_batches: int = 300
    batch_size: int = 200
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epoch_length: int = 50
    loss: str = "product"
    loss_alpha: float = 0.5
    loss_gamma: float = None
    loss_p: float = 2.0
    snr_mode: str = "range"        # "point" | "range" | "deweight"
    snr_lo: float = 1.0
    snr_hi: float = 7.0
    snr_bins: int = 7
    snr_point: float = 4.0
    delta: float = 1e-6
    iterations: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1 or self.pre_batches < 0 or self.fine_batches < 0:
            raise ValueError("counts must be nonnegative, batch_size >= 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.snr_mode not in ("point", "range", "deweight"):
            raise ValueError("snr_mode must be point, range or deweight")

    def make_grid(self):
        if self.snr_mode == "point":
            return SnrGrid.point(self.snr_point)
        return SnrGrid(self.snr_lo, self.snr_hi, self.snr_bins)

    def make_loss(self):
        return losses.make_loss(self.loss, alpha=self.loss_alpha,
                                gamma=self.loss_gamma, p=self.loss_p)


@dataclass
class TrainReport:
    batch_losses: list = field(default_factory=list)
    batch_loss_kinds: list = field(default_factory=list)
    epoch_weights: list = field(default_factory=list)   # (batch_index, weights)
    wall_clock_s: float = 0.0

    def to_dict(self):
        return asdict(self)


class AdamState:
    """Bias-corrected adaptive-moment update for one parameter array."""

    def __init__(self, shape, lr, beta1, beta2, eps):
        self.m = np.zeros(shape)
        self.v = np.zeros(shape)
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0

    def step(self, param, grad):
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad * grad
        mhat = self.m / (1 - self.beta1 ** self.t)
        vhat = self.v / (1 - self.beta2 ** self.t)
        param -= self.lr * mhat / (np.sqrt(vhat) + self.eps)


def sample_batch(code, snrs_db, rng):
    """One Monte-Carlo batch: (info bits, channel LLRs) at per-sample SNRs."""
    n_samples = len(snrs_db)
    bits = rng.integers(0, 2, size=(n_samples, code.k), dtype=np.uint8)
    cw = code.encode(bits)
    syms = channel.map_qpsk(cw)
    received = channel.awgn(syms, snrs_db, rng)
    llrs = channel.demap_qpsk(received, snrs_db)
    return bits, llrs


def run_training(config, code, initial_params=None):
    """Run both phases; returns (final DecoderParams, TrainReport)."""
    t0 = time.perf_counter()
    params = (initial_params.copy() if initial_params is not None
              else DecoderParams.identity(code, iterations=config.iterations))
    grid = config.make_grid()
    state = DeweightState(grid, delta=config.delta, adaptive=False)
    assignment = partition_batch(config.batch_size, grid)
    snrs = grid.values[assignment]
    fine_loss = config.make_loss()

    adam_beta = AdamState(params.beta_raw.shape, config.learning_rate,
                          config.beta1, config.beta2, config.eps)
    adam_w = AdamState(params.edge_weights.shape, config.learning_rate,
                       config.beta1, config.beta2, config.eps)

    report = TrainReport()
    total_batches = config.pre_batches + config.fine_batches
    for bi in range(total_batches):
        fine_phase = bi >= config.pre_batches
        if fine_phase and bi == config.pre_batches:
            # deweighting (if requested) starts with the fine-tuning phase
            state.adaptive = config.snr_mode == "deweight"
            state.cum_loss[:] = 0.0
        kind = config.loss if fine_phase else "bce"
        loss_fn = fine_loss if fine_phase else losses.bce

        rng = derive_stream(config.seed, "train", bi)
        bits, llrs = sample_batch(code, snrs, rng)
        scale = state.weights[assignment] / config.batch_size
        total, values, grad = decoder_loss_and_gradient(
            code, params, llrs, bits, loss_fn, sample_scale=scale)
        weighted_mean = batch_loss(values, assignment, state)

        if config.learning_rate > 0:
            adam_beta.step(params.beta_raw, grad.d_beta_raw)
            adam_w.step(params.edge_weights, grad.d_edge_weights)

        report.batch_losses.append(weighted_mean)
        report.batch_loss_kinds.append(kind)

        if state.adaptive and (bi - config.pre_batches + 1) % config.epoch_length == 0:
            state.epoch_update()
            report.epoch_weights.append((bi, state.weights.tolist()))

    report.wall_clock_s = time.perf_counter() - t0
    return params, report


def validation_loss(config, code, params, loss_fn=None, batch_size=None):
    """Mean loss on a fixed held-out batch derived from (seed, "val")."""
    grid = config.make_grid()
    n = batch_size if batch_size is not None else config.batch_size
    assignment = partition_batch(n, grid)
    snrs = grid.values[assignment]
    rng = derive_stream(config.seed, "val")
    bits, llrs = sample_batch(code, snrs, rng)
    if loss_fn is None:
        loss_fn = config.make_loss()
    from .decoder import decode_forward
    out, _ = decode_forward(code, params, llrs, keep_trace=False)
    values, _ = loss_fn(bits, out[:, code.info_positions])
    return float(values.mean())
