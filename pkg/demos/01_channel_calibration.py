"""Uncoded QPSK over AWGN: check the simulated BER against the closed form.

The demapper emits exact LLRs (max-log coincides with exact for QPSK), so
hard decisions on the LLR sign reproduce 0.5 * erfc(sqrt(EsN0 / 2)) per bit.
"""

import numpy as np
from scipy.special import erfc

from blerkit import channel
from blerkit.rng import derive_stream

rng = derive_stream(0, "demo_channel")
for snr_db in (0.0, 2.0, 4.0, 6.0):
    bits = rng.integers(0, 2, size=(20000, 100))
    syms = channel.map_qpsk(bits)
    llrs = channel.demap_qpsk(channel.awgn(syms, snr_db, rng), snr_db)
    ber = np.mean((llrs > 0) != (bits == 1))
    theory = 0.5 * erfc(np.sqrt(10 ** (snr_db / 10) / 2))
    print("Es/N0 = %4.1f dB   BER = %.5f   theory = %.5f" % (snr_db, ber, theory))
