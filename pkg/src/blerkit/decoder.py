"""Deep-unfolded weighted min-sum decoder with per-iteration damping.

The forward pass runs a fixed number T of message-passing iterations:

  V2C:   m_vc = l_ch[v] + sum of incoming C2V except the target edge
  C2V:   raw  = w_e * prod(signs of other V2C) * min(|other V2C|)
  damp:  c2v  = (1 - beta_t) * raw + beta_t * c2v_previous

Output logits are l_ch[v] + sum of final C2V into v.  Damping values are
stored unconstrained (beta_raw) and squashed through a sigmoid; one shared
edge-weight vector is used for all iterations.  Everything is batched over
the leading axis and the trace keeps what reverse mode needs.
"""

import json

import numpy as np


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(x, dtype=float)))


class DecoderParams:
    """Trainable unfolding parameters: beta_raw per iteration, one weight per edge."""

    def __init__(self, beta_raw, edge_weights):
        self.beta_raw = np.array(beta_raw, dtype=float)
        self.edge_weights = np.array(edge_weights, dtype=float)
        self.iterations = len(self.beta_raw)

    @property
    def beta(self):
        return _sigmoid(self.beta_raw)

    @classmethod
    def identity(cls, code, iterations=5, beta_raw_init=-4.0):
        """Untrained baseline: w = 1 and beta ~ 0 (classical min-sum)."""
        return cls(np.full(iterations, beta_raw_init), np.ones(code.num_edges))

    def copy(self):
        return DecoderParams(self.beta_raw.copy(), self.edge_weights.copy())

    def to_dict(self):
        return {"beta_raw": self.beta_raw.tolist(), "edge_weights": self.edge_weights.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d["beta_raw"], d["edge_weights"])

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


class DecoderTrace:
    """Per-iteration forward state needed for reverse mode and replay."""

    def __init__(self):
        self.v2c = []          # (B, E) messages entering each check update
        self.raw_unweighted = []  # (B, E) sign-product * extrinsic min, before w
        self.c2v = []          # (B, E) damped C2V after each iteration
        self.src1 = []         # (B, m) edge index of the per-check minimum
        self.src2 = []         # (B, m) edge index of the second minimum


def _check_update(code, v2c):
    """Extrinsic sign/min per edge; returns (raw_unweighted, src1, src2)."""
    ce, mask = code.check_edges, code.check_mask
    idx = np.where(mask, ce, 0)
    vals = v2c[:, idx]                      # (B, m, dc)
    signs = np.where(vals < 0, -1.0, 1.0)
    signs = np.where(mask, signs, 1.0)
    mags = np.where(mask, np.abs(vals), np.inf)

    prod_sign = signs.prod(axis=2)          # (B, m)
    a1 = mags.argmin(axis=2)                # first occurrence = lowest edge index
    min1 = np.take_along_axis(mags, a1[..., None], axis=2)[..., 0]
    mags2 = mags.copy()
    np.put_along_axis(mags2, a1[..., None], np.inf, axis=2)
    a2 = mags2.argmin(axis=2)
    min2 = np.take_along_axis(mags2, a2[..., None], axis=2)[..., 0]

    pos = np.arange(ce.shape[1])[None, None, :]
    ext_min = np.where(pos == a1[..., None], min2[..., None], min1[..., None])
    ext_sign = prod_sign[..., None] * signs   # signs are +-1 so divide == multiply

    B = v2c.shape[0]
    raw = np.zeros_like(v2c)
    flat_edges = ce[mask]
    raw[:, flat_edges] = (ext_sign * ext_min)[:, mask]

    src1 = ce[np.arange(code.m)[None, :], a1]   # (B, m) global edge indices
    src2 = ce[np.arange(code.m)[None, :], a2]
    return raw, src1, src2


def _var_totals(code, per_edge):
    """Sum a (B, E) edge array into (B, n) per-variable totals."""
    B = per_edge.shape[0]
    tot = np.zeros((B, code.n))
    np.add.at(tot, (np.arange(B)[:, None], np.broadcast_to(code.edge_var, (B, code.num_edges))), per_edge)
    return tot


def decode_forward(code, params, channel_llrs, keep_trace=True):
    """Run the unfolded decoder; returns (output_llrs, trace).

    channel_llrs may be (n,) or (B, n).  The returned logits have the same
    shape.  Hard decisions are sign(logit) with ties (exactly 0) -> bit 0.
    """
    llrs = np.asarray(channel_llrs, dtype=float)
    squeeze = llrs.ndim == 1
    if squeeze:
        llrs = llrs[None, :]
    if llrs.shape[1] != code.n:
        raise ValueError("expected %d channel LLRs, got %d" % (code.n, llrs.shape[1]))

    B, E = llrs.shape[0], code.num_edges
    beta = params.beta
    w = params.edge_weights
    trace = DecoderTrace() if keep_trace else None

    c2v = np.zeros((B, E))
    for t in range(params.iterations):
        tot = _var_totals(code, c2v)
        v2c = llrs[:, code.edge_var] + tot[:, code.edge_var] - c2v
        raw_unw, src1, src2 = _check_update(code, v2c)
        c2v_new = (1.0 - beta[t]) * (w[None, :] * raw_unw) + beta[t] * c2v
        if keep_trace:
            trace.v2c.append(v2c)
            trace.raw_unweighted.append(raw_unw)
            trace.c2v.append(c2v_new)
            trace.src1.append(src1)
            trace.src2.append(src2)
        c2v = c2v_new

    out = llrs + _var_totals(code, c2v)
    if squeeze:
        out = out[0]
    return out, trace


def hard_decision(logits):
    """Logits to bits; positive -> 1, ties (exactly zero) -> 0."""
    return (np.asarray(logits) > 0).astype(np.uint8)


def replay_trace(code, params, channel_llrs, trace):
    """Recompute output logits from the stored final C2V messages."""
    llrs = np.atleast_2d(np.asarray(channel_llrs, dtype=float))
    out = llrs + _var_totals(code, trace.c2v[-1])
    return out if np.asarray(channel_llrs).ndim > 1 else out[0]
