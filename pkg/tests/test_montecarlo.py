import csv

import numpy as np
import pytest
from scipy.special import erfc

from blerkit.decoder import DecoderParams
from blerkit.deweight import SnrGrid
from blerkit.losses import bce, make_loss
from blerkit.montecarlo import (Z_95, McResult, loss_sweep, mc_link_run,
                                mc_rows, write_csv)
from blerkit.rng import derive_stream


def qpsk_ber(snr_db):
    return 0.5 * erfc(np.sqrt(10 ** (snr_db / 10) / 2))


class TestMcResult:
    def test_rates_and_ci(self):
        r = McResult(3.0, 10000, 100, 100, 9)
        assert r.ber == 0.01
        assert r.bler == 0.09
        assert r.ber_ci_half == pytest.approx(
            Z_95 * np.sqrt(0.01 * 0.99 / 10000))

    def test_empty_result(self):
        r = McResult(0.0, 0, 0, 0, 0)
        assert r.ber == 0.0 and r.bler == 0.0
        assert r.ber_ci_half == 0.0


class TestMcLinkRun:
    def test_high_snr_is_error_free(self, ldpc96):
        params = DecoderParams.identity(ldpc96)
        r = mc_link_run(ldpc96, params, 20.0, max_blocks=500, seed=1)
        assert r.bit_errors == 0 and r.block_errors == 0
        assert r.blocks_sent == 500

    def test_uncoded_matches_closed_form(self):
        snr = 4.0
        r = mc_link_run(None, None, snr, max_blocks=11000,
                        target_block_errors=10 ** 9, seed=5, uncoded_bits=96)
        expected = qpsk_ber(snr)
        assert r.bits_sent >= 10 ** 6
        se = np.sqrt(expected * (1 - expected) / r.bits_sent)
        assert abs(r.ber - expected) < 3 * se

    def test_block_errors_bounded_by_bit_errors(self, ldpc96):
        params = DecoderParams.identity(ldpc96)
        r = mc_link_run(ldpc96, params, 2.0, max_blocks=2000, seed=2)
        assert r.block_errors <= r.bit_errors
        assert r.bler >= r.ber

    def test_early_stop_at_target_errors(self):
        r = mc_link_run(None, None, 0.0, max_blocks=10 ** 6,
                        target_block_errors=100, seed=3, uncoded_bits=96)
        # decision happens on chunk-group boundaries, so the count overshoots
        assert r.block_errors >= 100
        assert r.blocks_sent <= DECISION_BLOCKS

    def test_worker_invariance(self, ldpc96):
        params = DecoderParams.identity(ldpc96)
        a = mc_link_run(ldpc96, params, 3.0, max_blocks=4000, seed=7, workers=1)
        b = mc_link_run(ldpc96, params, 3.0, max_blocks=4000, seed=7, workers=4)
        assert (a.bits_sent, a.bit_errors, a.blocks_sent, a.block_errors) \
            == (b.bits_sent, b.bit_errors, b.blocks_sent, b.block_errors)

    def test_deterministic_across_runs(self):
        a = mc_link_run(None, None, 1.0, max_blocks=4000, seed=9, uncoded_bits=32)
        b = mc_link_run(None, None, 1.0, max_blocks=4000, seed=9, uncoded_bits=32)
        assert a == b

    def test_invalid_stop_criteria(self):
        with pytest.raises(ValueError):
            mc_link_run(None, None, 0.0, max_blocks=0)


DECISION_BLOCKS = 4 * 2000 * 2   # at most one extra decision group


class TestCiCoverage:
    def test_95_ci_covers_at_least_90_percent(self):
        # 200 repetitions of a small uncoded run at a known BER
        snr = 2.0
        truth = qpsk_ber(snr)
        blocks, nbits = 40, 50
        hits = 0
        reps = 200
        for rep in range(reps):
            rng = derive_stream(rep, "cov")
            bits = rng.integers(0, 2, size=(blocks, nbits), dtype=np.uint8)
            from blerkit import channel
            syms = channel.map_qpsk(bits)
            llrs = channel.demap_qpsk(channel.awgn(syms, snr, rng), snr)
            errs = int(((llrs > 0) != (bits == 1)).sum())
            r = McResult(snr, blocks * nbits, errs, blocks, 0)
            if abs(r.ber - truth) <= r.ber_ci_half:
                hits += 1
        assert hits / reps >= 0.90


class TestLossSweep:
    def test_single_point_normalizes_to_one(self, ldpc96):
        params = DecoderParams.identity(ldpc96)
        grid = SnrGrid.point(3.0)
        rows = loss_sweep(ldpc96, params, {"bce": bce}, grid, 400, 3.0, seed=1)
        assert len(rows) == 1
        assert rows[0]["normalized_loss"] == pytest.approx(1.0, abs=1e-15)

    def test_reference_off_grid_rejected(self, ldpc96):
        params = DecoderParams.identity(ldpc96)
        with pytest.raises(ValueError):
            loss_sweep(ldpc96, params, {"bce": bce}, SnrGrid(0, 6, 4), 100, 1.0)

    def test_bce_equals_pnorm_p1_up_to_gamma(self, ldpc96):
        params = DecoderParams.identity(ldpc96)
        grid = SnrGrid(1.0, 5.0, 3)
        fns = {"bce": bce, "p1": make_loss("pnorm", p=1.0)}
        rows = loss_sweep(ldpc96, params, fns, grid, 400, 3.0, seed=4)
        by = {(r["loss"], r["snr_db"]): r["mean_loss"] for r in rows}
        for snr in grid.values:
            assert by[("p1", snr)] == pytest.approx(by[("bce", snr)] + 1e-8,
                                                    rel=1e-10)

    def test_loss_decreases_with_snr(self, ldpc96):
        params = DecoderParams.identity(ldpc96)
        grid = SnrGrid(0.0, 6.0, 4)
        rows = loss_sweep(ldpc96, params, {"bce": bce}, grid, 1000, 0.0, seed=6)
        means = [r["mean_loss"] for r in sorted(rows, key=lambda r: r["snr_db"])]
        assert all(means[i + 1] < means[i] for i in range(len(means) - 1))


class TestCsv:
    def test_empty_rows_header_only(self, tmp_path):
        path = tmp_path / "out.csv"
        write_csv(path, [], 0, "abc")
        assert path.read_text() == "snr_db,metric,value,ci_half,seed,config_hash\n"

    def test_round_trip_exact(self, tmp_path):
        rows = [(1.0, "ber", 1.0 / 3.0, 0.001234567890123456),
                (2.0, "ber", 1e-7, 2e-9),
                (1.0, "bler", 0.1 + 1e-15, 0.01)]
        path = tmp_path / "out.csv"
        write_csv(path, rows, 42, "deadbeef")
        with open(path) as fh:
            parsed = list(csv.DictReader(fh))
        assert len(parsed) == 3
        by = {(p["metric"], float(p["snr_db"])): p for p in parsed}
        for snr, metric, value, ci in rows:
            p = by[(metric, snr)]
            assert float(p["value"]) == value
            assert float(p["ci_half"]) == ci
            assert p["seed"] == "42" and p["config_hash"] == "deadbeef"

    def test_sorted_by_metric_then_snr(self, tmp_path):
        rows = [(5.0, "bler", 0.1, 0.0), (1.0, "bler", 0.2, 0.0),
                (3.0, "ber", 0.01, 0.0)]
        path = tmp_path / "out.csv"
        write_csv(path, rows, 0, "x")
        lines = path.read_text().strip().split("\n")[1:]
        keys = [(l.split(",")[1], float(l.split(",")[0])) for l in lines]
        assert keys == sorted(keys)

    def test_byte_identical_across_calls(self, tmp_path):
        rows = mc_rows([McResult(2.0, 1000, 17, 10, 3)])
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(a, rows, 7, "h")
        write_csv(b, rows, 7, "h")
        assert a.read_bytes() == b.read_bytes()

    def test_unwritable_path_raises_oserror(self):
        with pytest.raises(OSError):
            write_csv("/nonexistent_dir_xyz/out.csv", [], 0, "h")


def test_mc_rows_shape():
    rows = mc_rows([McResult(1.0, 100, 3, 10, 2), McResult(2.0, 100, 1, 10, 1)])
    assert len(rows) == 4
    assert {r[1] for r in rows} == {"ber", "bler"}
