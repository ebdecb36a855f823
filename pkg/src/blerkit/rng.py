"""Counter-derived random streams for reproducible (and parallelizable) sampling.

Every consumer of randomness derives its own stream from a master seed, a
purpose tag and a tuple of counters (batch index, chunk index, ...).  The
derivation hashes all of it into a Philox key, so the same (seed, tag,
counters) always yields the same stream regardless of how work is split
across workers.
"""

import hashlib

import numpy as np


def derive_stream(master_seed, tag, *counters):
    """Return a numpy Generator keyed by (master_seed, tag, *counters)."""
    h = hashlib.sha256()
    h.update(int(master_seed).to_bytes(8, "little", signed=False))
    h.update(tag.encode("utf-8"))
    for c in counters:
        h.update(int(c).to_bytes(8, "little", signed=True))
    key = int.from_bytes(h.digest()[:16], "little")
    return np.random.Generator(np.random.Philox(key=key))
