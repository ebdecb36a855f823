"""Monte-Carlo link evaluation: BER/BLER with confidence intervals, loss-vs-SNR
sweeps, and deterministic CSV output.

Blocks are simulated in fixed-size chunks whose random streams depend only on
(seed, chunk index), and the early-stopping decision is taken on aggregated
counts at fixed chunk-group boundaries.  Results are therefore identical for
any worker count.
"""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict

import numpy as np

from . import channel
from .decoder import decode_forward, hard_decision
from .rng import derive_stream

Z_95 = 1.959963984540054   # two-sided 95% normal quantile
CHUNK_BLOCKS = 2000
DECISION_INTERVAL = 4      # chunks between early-stop decisions


@dataclass
class McResult:
    snr_db: float
    bits_sent: int
    bit_errors: int
    blocks_sent: int
    block_errors: int

    @property
    def ber(self):
        return self.bit_errors / self.bits_sent if self.bits_sent else 0.0

    @property
    def bler(self):
        return self.block_errors / self.blocks_sent if self.blocks_sent else 0.0

    def _ci(self, p, n):
        return Z_95 * np.sqrt(max(p * (1.0 - p), 0.0) / n) if n else 0.0

    @property
    def ber_ci_half(self):
        return self._ci(self.ber, self.bits_sent)

    @property
    def bler_ci_half(self):
        return self._ci(self.bler, self.blocks_sent)

    def to_dict(self):
        d = asdict(self)
        d.update(ber=self.ber, bler=self.bler,
                 ber_ci_half=self.ber_ci_half, bler_ci_half=self.bler_ci_half)
        return d


def _mc_chunk(args):
    """Simulate one chunk of blocks; returns (bits, bit_errs, blocks, block_errs)."""
    code, params, snr_db, blocks, seed, chunk_index, uncoded_bits = args
    rng = derive_stream(seed, "mc", chunk_index)
    if code is None:
        bits = rng.integers(0, 2, size=(blocks, uncoded_bits), dtype=np.uint8)
        syms = channel.map_qpsk(bits)
        llrs = channel.demap_qpsk(channel.awgn(syms, snr_db, rng), snr_db)
        decided = hard_decision(llrs)
        tx = bits
    else:
        bits = rng.integers(0, 2, size=(blocks, code.k), dtype=np.uint8)
        cw = code.encode(bits)
        syms = channel.map_qpsk(cw)
        llrs = channel.demap_qpsk(channel.awgn(syms, snr_db, rng), snr_db)
        out, _ = decode_forward(code, params, llrs, keep_trace=False)
        decided = hard_decision(out[:, code.info_positions])
        tx = bits
    errs = decided != tx
    return (tx.size, int(errs.sum()), blocks, int(errs.any(axis=1).sum()))


def mc_link_run(code, params, snr_db, max_blocks, target_block_errors=100,
                seed=0, workers=1, uncoded_bits=96):
    """BER/BLER at one SNR.  code=None means uncoded QPSK passthrough.

    Stops at whichever of max_blocks / target_block_errors hits first, with
    the decision made on fixed chunk-group boundaries so the result does not
    depend on the worker count.
    """
    if max_blocks < 1 or target_block_errors < 1:
        raise ValueError("stop criteria must be positive")
    result = McResult(float(snr_db), 0, 0, 0, 0)
    next_chunk = 0
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while result.blocks_sent < max_blocks and result.block_errors < target_block_errors:
            tasks = []
            scheduled = result.blocks_sent
            for _ in range(DECISION_INTERVAL):
                blocks = min(CHUNK_BLOCKS, max_blocks - scheduled)
                if blocks <= 0:
                    break
                tasks.append((code, params, snr_db, blocks, seed, next_chunk,
                              uncoded_bits))
                scheduled += blocks
                next_chunk += 1
            if not tasks:
                break
            if pool is not None:
                outs = list(pool.map(_mc_chunk, tasks))
            else:
                outs = [_mc_chunk(t) for t in tasks]
            for bits, berr, blocks, blerr in outs:
                result.bits_sent += bits
                result.bit_errors += berr
                result.blocks_sent += blocks
                result.block_errors += blerr
    finally:
        if pool is not None:
            pool.shutdown()
    return result


def loss_sweep(code, params, loss_fns, grid, blocks_per_point, reference_snr,
               seed=0):
    """Mean per-block loss per (loss, SNR), normalized at reference_snr.

    loss_fns: dict name -> loss(bits, logits).  Returns a list of row dicts
    with mean, 95% CI half-width and normalized mean per (loss, snr).
    """
    values = np.asarray(grid.values)
    ref_hits = np.nonzero(np.abs(values - reference_snr) < 1e-9)[0]
    if len(ref_hits) == 0:
        raise ValueError("reference SNR %g is not on the grid" % reference_snr)

    stats = {name: {} for name in loss_fns}
    for snr in values:
        sums = {name: 0.0 for name in loss_fns}
        sumsq = {name: 0.0 for name in loss_fns}
        done = 0
        chunk_index = 0
        while done < blocks_per_point:
            blocks = min(CHUNK_BLOCKS, blocks_per_point - done)
            rng = derive_stream(seed, "sweep_%0.6f" % snr, chunk_index)
            bits = rng.integers(0, 2, size=(blocks, code.k), dtype=np.uint8)
            cw = code.encode(bits)
            syms = channel.map_qpsk(cw)
            llrs = channel.demap_qpsk(channel.awgn(syms, snr, rng), snr)
            out, _ = decode_forward(code, params, llrs, keep_trace=False)
            info = out[:, code.info_positions]
            for name, fn in loss_fns.items():
                vals, _ = fn(bits, info)
                sums[name] += float(vals.sum())
                sumsq[name] += float((vals ** 2).sum())
            done += blocks
            chunk_index += 1
        for name in loss_fns:
            mean = sums[name] / blocks_per_point
            var = max(sumsq[name] / blocks_per_point - mean ** 2, 0.0)
            ci = Z_95 * np.sqrt(var / blocks_per_point)
            stats[name][float(snr)] = (mean, ci)

    rows = []
    ref = float(values[ref_hits[0]])
    for name in loss_fns:
        ref_mean = stats[name][ref][0]
        for snr in values:
            mean, ci = stats[name][float(snr)]
            rows.append({"snr_db": float(snr), "loss": name, "mean_loss": mean,
                         "ci_half": ci,
                         "normalized_loss": mean / ref_mean if ref_mean else np.nan})
    return rows


def write_csv(path, rows, seed, config_hash):
    """Write (snr_db, metric, value, ci_half) rows sorted by (metric, snr).

    Values are printed with 17 significant digits so a parse-back recovers
    them exactly.
    """
    rows = sorted(rows, key=lambda r: (r[1], r[0]))
    try:
        with open(path, "w", newline="") as fh:
            fh.write("snr_db,metric,value,ci_half,seed,config_hash\n")
            for snr, metric, value, ci in rows:
                fh.write("%.17g,%s,%.17g,%.17g,%d,%s\n"
                         % (snr, metric, value, ci, seed, config_hash))
    except OSError as exc:
        raise OSError("failed to write CSV %s: %s" % (path, exc)) from exc


def mc_rows(results):
    """Flatten McResults into write_csv rows (ber and bler metrics)."""
    rows = []
    for r in results:
        rows.append((r.snr_db, "ber", r.ber, r.ber_ci_half))
        rows.append((r.snr_db, "bler", r.bler, r.bler_ci_half))
    return rows
