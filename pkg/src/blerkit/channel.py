"""Complex AWGN channel with Gray-mapped QPSK and exact LLR demapping.

SNR is Es/N0 in dB with unit symbol energy (Es = 1).  Bit 1 maps to a
positive amplitude, so a positive logit always means "bit 1" downstream.
For Gray-mapped QPSK the I and Q rails are independent BPSK channels and
the max-log demapper is exact:  l = 4*a*y/N0 with a = 1/sqrt(2).
"""

import numpy as np

QPSK_AMP = 1.0 / np.sqrt(2.0)


def noise_variance(snr_db):
    """Total complex noise variance N0 = 10^(-snr_db/10) for Es = 1."""
    return 10.0 ** (-np.asarray(snr_db, dtype=float) / 10.0)


def map_qpsk(bits):
    """Map a (..., 2*S) bit array to (..., S) unit-energy QPSK symbols.

    Even bit positions drive the I rail, odd positions the Q rail;
    bit 1 -> +a, bit 0 -> -a with a = 1/sqrt(2).
    """
    bits = np.asarray(bits)
    if bits.shape[-1] % 2 != 0:
        raise ValueError("QPSK needs an even number of bits, got %d" % bits.shape[-1])
    amps = (2.0 * bits - 1.0) * QPSK_AMP
    return amps[..., 0::2] + 1j * amps[..., 1::2]


def awgn(symbols, snr_db, rng):
    """Add circularly symmetric complex Gaussian noise at Es/N0 = snr_db.

    snr_db may be a scalar or broadcast against the leading axes of
    `symbols` (e.g. one SNR per row of a batch).  np.inf means noiseless.
    """
    symbols = np.asarray(symbols)
    n0 = np.asarray(noise_variance(snr_db), dtype=float)
    if n0.ndim > 0 or symbols.ndim > 1:
        n0 = np.broadcast_to(n0, symbols.shape[:-1])[..., None]
    sigma = np.sqrt(n0 / 2.0)
    noise = rng.standard_normal(symbols.shape) + 1j * rng.standard_normal(symbols.shape)
    return symbols + sigma * noise


def demap_qpsk(received, snr_db):
    """Exact per-bit LLRs for Gray QPSK: interleaved (I, Q) rails.

    Returns a real array with twice as many entries as symbols along the
    last axis.  Positive LLR favours bit 1.
    """
    received = np.asarray(received)
    n0 = np.asarray(noise_variance(snr_db), dtype=float)
    if received.ndim > 1 or n0.ndim > 0:
        n0 = np.broadcast_to(n0, received.shape[:-1])[..., None]
    scale = 4.0 * QPSK_AMP / n0
    llrs = np.empty(received.shape[:-1] + (2 * received.shape[-1],), dtype=float)
    llrs[..., 0::2] = scale * received.real
    llrs[..., 1::2] = scale * received.imag
    return llrs
