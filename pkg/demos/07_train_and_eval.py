"""End-to-end: pre-train with BCE, fine-tune with the product loss, then
measure BLER against the untrained baseline with 95% confidence intervals.

This is a scaled-down run (60 + 60 batches); the full desk-scale schedule is
300 + 300 batches of 200 samples.
"""

from blerkit import bundled_code
from blerkit.decoder import DecoderParams
from blerkit.montecarlo import mc_link_run
from blerkit.training import TrainConfig, run_training

code = bundled_code("ldpc_96_48")
cfg = TrainConfig(pre_batches=60, fine_batches=60, batch_size=200,
                  loss="product", snr_mode="range", snr_lo=1.0, snr_hi=7.0,
                  snr_bins=7, seed=6)
trained, report = run_training(cfg, code)
print("trained %d batches in %.1fs; final batch loss %.4f"
      % (len(report.batch_losses), report.wall_clock_s, report.batch_losses[-1]))

for name, params in (("untrained", DecoderParams.identity(code)),
                     ("trained", trained)):
    for snr in (3.0, 4.0):
        r = mc_link_run(code, params, snr, max_blocks=8000,
                        target_block_errors=100, seed=7)
        print("%-10s %3.1f dB  BLER = %.4f +- %.4f  (%d blocks)"
              % (name, snr, r.bler, r.bler_ci_half, r.blocks_sent))
