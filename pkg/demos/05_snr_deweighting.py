"""Watch the SNR deweighting rule move weight toward high-SNR bins.

Low-SNR bins accumulate most of the loss, so inverse-cumulative-loss weights
suppress them after each epoch; the grid-center weight is pinned to 1.
"""

import numpy as np

from blerkit import bundled_code
from blerkit.training import TrainConfig, run_training

code = bundled_code("ldpc_96_48")
cfg = TrainConfig(pre_batches=20, fine_batches=60, batch_size=100,
                  epoch_length=20, loss="product", snr_mode="deweight",
                  snr_lo=1.0, snr_hi=7.0, snr_bins=7, seed=4)
_, report = run_training(cfg, code)

print("grid (dB):      " + "".join("%10.0f" % v for v in cfg.make_grid().values))
for batch_index, weights in report.epoch_weights:
    # bins with (almost) no accumulated loss saturate near 1/delta
    print("after batch %3d " % batch_index
          + "".join("%10.3g" % w for w in weights))
