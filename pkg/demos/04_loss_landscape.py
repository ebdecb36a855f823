"""Loss-vs-SNR sweep for all seven losses on the untrained decoder.

Normalizing every curve at the lowest SNR makes the shapes comparable: the
block-level losses (product, max, smoothmax, lse, pnorm) decay more slowly
than bit-level BCE/MSE because a block stays wrong until its worst bit flips.
"""

from blerkit import bundled_code
from blerkit.decoder import DecoderParams
from blerkit.deweight import SnrGrid
from blerkit.losses import LOSS_NAMES, make_loss
from blerkit.montecarlo import loss_sweep

code = bundled_code("ldpc_96_48")
params = DecoderParams.identity(code)
grid = SnrGrid(0.0, 6.0, 7)
rows = loss_sweep(code, params, {n: make_loss(n) for n in LOSS_NAMES},
                  grid, 2000, 0.0, seed=3)

table = {}
for r in rows:
    table.setdefault(r["loss"], {})[r["snr_db"]] = r["normalized_loss"]
print("normalized loss  " + "".join("%8.0f" % s for s in grid.values))
for name in LOSS_NAMES:
    print("%-16s " % name
          + "".join("%8.3f" % table[name][s] for s in grid.values))
