"""Exhaustive enumeration on small discrete channels.

Blocks of K bits are indexed 0..2^K-1 with bit 1 as the most significant
position, so block index order is lexicographic in (b_1, ..., b_K).  A
channel is a prior over blocks plus a likelihood table over a finite output
alphabet; everything downstream (posteriors, decision rules, error rates,
mutual information) is computed exactly, with no sampling.
"""

import numpy as np


def block_bits(index, K):
    """Block index -> bit tuple (b_1, ..., b_K)."""
    return np.array([(index >> (K - 1 - k)) & 1 for k in range(K)], dtype=np.uint8)


def all_blocks(K):
    """(2^K, K) array of all bit blocks in lexicographic order."""
    return np.array([block_bits(i, K) for i in range(2 ** K)], dtype=np.uint8)


class DiscreteChannel:
    """Finite channel: prior over 2^K bit blocks, likelihood table p(y | b)."""

    def __init__(self, K, prior, likelihood):
        self.K = K
        self.prior = np.asarray(prior, dtype=float)
        self.likelihood = np.asarray(likelihood, dtype=float)
        if self.prior.shape != (2 ** K,):
            raise ValueError("prior must have 2^K entries")
        if self.likelihood.shape[0] != 2 ** K:
            raise ValueError("likelihood needs one row per block")
        if abs(self.prior.sum() - 1.0) > 1e-12:
            raise ValueError("prior does not sum to 1")
        rows = self.likelihood.sum(axis=1)
        if np.max(np.abs(rows - 1.0)) > 1e-12:
            raise ValueError("likelihood rows must sum to 1")
        if np.any(self.prior < 0) or np.any(self.likelihood < 0):
            raise ValueError("negative probabilities")
        self.num_outputs = self.likelihood.shape[1]
        self.blocks = all_blocks(K)

    def output_marginal(self):
        """p(y) for every output symbol."""
        return self.prior @ self.likelihood

    def joint(self):
        """p(b, y) table of shape (2^K, |Y|)."""
        return self.prior[:, None] * self.likelihood

    def sample(self, n, rng):
        """Draw (bits, y) pairs; bits is (n, K), y is (n,) output indices."""
        b_idx = rng.choice(2 ** self.K, size=n, p=self.prior)
        u = rng.random(n)
        cdf = np.cumsum(self.likelihood, axis=1)
        y = (u[:, None] > cdf[b_idx]).sum(axis=1)
        return self.blocks[b_idx], y


class Codebook:
    """Injective map from block index to a codeword bit vector."""

    def __init__(self, codewords):
        self.codewords = np.asarray(codewords, dtype=np.uint8)
        seen = {tuple(cw) for cw in self.codewords}
        if len(seen) != len(self.codewords):
            raise ValueError("encoder must be injective")

    def __len__(self):
        return len(self.codewords)


def posterior_joint(ch, y):
    """p(b | y) over all 2^K blocks, by Bayes rule."""
    num = ch.prior * ch.likelihood[:, y]
    z = num.sum()
    if z <= 0:
        raise ValueError("output %d has zero probability; posterior undefined" % y)
    return num / z


def posterior_marginals(ch, y):
    """p(b_k = 1 | y) for k = 1..K."""
    post = posterior_joint(ch, y)
    return post @ ch.blocks


def bitwise_map_decode(ch, y):
    """Per-bit threshold of the posterior marginals at 1/2; ties -> 0."""
    return (posterior_marginals(ch, y) > 0.5).astype(np.uint8)


def block_map_decode(ch, codebook, y):
    """Most probable codeword, mapped back to bits; ties -> lexicographically
    smallest codeword."""
    post = posterior_joint(ch, y)
    best = np.max(post)
    cand = np.nonzero(post >= best - 0.0)[0]
    if len(cand) > 1:
        order = sorted(cand, key=lambda i: tuple(codebook.codewords[i]))
        winner = order[0]
    else:
        winner = cand[0]
    return ch.blocks[winner]


def bitwise_map_rule(ch):
    """Decision table of the bitwise-MAP rule: (|Y|, K) bits."""
    return np.array([bitwise_map_decode(ch, y) for y in range(ch.num_outputs)])


def block_map_rule(ch, codebook):
    return np.array([block_map_decode(ch, codebook, y) for y in range(ch.num_outputs)])


def exact_error_rates(ch, decision_table):
    """Exact (BER, BLER) of a decision rule given as a (|Y|, K) bit table."""
    decision_table = np.asarray(decision_table, dtype=np.uint8)
    joint = ch.joint()                       # (2^K, |Y|)
    mism = (ch.blocks[:, None, :] != decision_table[None, :, :])
    ber = float(np.sum(joint * mism.mean(axis=2)))
    bler = float(np.sum(joint * mism.any(axis=2)))
    return ber, bler


def conditional_block_error(ch, y, decision):
    """P(block error | y) for one decided block."""
    post = posterior_joint(ch, y)
    idx = int(np.dot(decision, 1 << np.arange(ch.K - 1, -1, -1)))
    return 1.0 - post[idx]


def erm_fit(bits, y, num_outputs):
    """Empirical risk minimizer over all table functions, for BCE and MSE alike.

    Both losses decouple per (k, y) and are minimized by the bucket mean of
    b_k over the samples with that y.  Raises if some output index in
    0..num_outputs-1 never occurs.
    """
    bits = np.asarray(bits, dtype=float)
    y = np.asarray(y)
    K = bits.shape[1]
    table = np.zeros((num_outputs, K))
    for yy in range(num_outputs):
        sel = y == yy
        if not np.any(sel):
            raise ValueError("no samples observed for output %d" % yy)
        table[yy] = bits[sel].mean(axis=0)
    return table


# -- mutual information -------------------------------------------------------


def _mi_from_joint(joint):
    """I(A; B) in bits from a joint pmf table."""
    joint = np.asarray(joint, dtype=float)
    pa = joint.sum(axis=1, keepdims=True)
    pb = joint.sum(axis=0, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = joint * np.log2(joint / (pa * pb))
    return float(np.sum(terms[joint > 0]))


def mi_bit_output(ch, k):
    """I(b_k; y), exactly."""
    joint = ch.joint()                         # (2^K, |Y|)
    bk = ch.blocks[:, k]
    j2 = np.stack([joint[bk == 0].sum(axis=0), joint[bk == 1].sum(axis=0)])
    return _mi_from_joint(j2)


def mi_bit_function(ch, k, values):
    """I(b_k; g(y)) where `values[y]` is any per-output statistic.

    The function output is quantized only by its realized finite value set.
    """
    values = np.asarray(values)
    uniq, inv = np.unique(values, return_inverse=True)
    joint = ch.joint()
    bk = ch.blocks[:, k]
    j2 = np.zeros((2, len(uniq)))
    for y in range(ch.num_outputs):
        j2[0, inv[y]] += joint[bk == 0, y].sum()
        j2[1, inv[y]] += joint[bk == 1, y].sum()
    return _mi_from_joint(j2)


def mi_block_output(ch):
    """I(b; y) with the whole block as one variable."""
    return _mi_from_joint(ch.joint())


def mi_block_function(ch, table):
    """I(b; g(y)) for a vector-valued per-output table (|Y|, d)."""
    table = np.asarray(table)
    keys = [tuple(row) for row in table]
    uniq = sorted(set(keys))
    index = {u: i for i, u in enumerate(uniq)}
    joint = ch.joint()
    j2 = np.zeros((2 ** ch.K, len(uniq)))
    for y in range(ch.num_outputs):
        j2[:, index[keys[y]]] += joint[:, y]
    return _mi_from_joint(j2)


def posterior_marginal_table(ch):
    """(|Y|, K) table of the true posterior marginals p(b_k = 1 | y)."""
    return np.array([posterior_marginals(ch, y) for y in range(ch.num_outputs)])


def random_channel(K, num_outputs, rng, prior="uniform"):
    """Random instance: likelihood rows are normalized uniform draws."""
    like = rng.random((2 ** K, num_outputs))
    like /= like.sum(axis=1, keepdims=True)
    if prior == "uniform":
        pr = np.full(2 ** K, 1.0 / 2 ** K)
    else:
        pr = rng.random(2 ** K)
        pr /= pr.sum()
    # renormalize exactly so validation at 1e-12 never trips on rounding
    like /= like.sum(axis=1, keepdims=True)
    pr /= pr.sum()
    return DiscreteChannel(K, pr, like)
