"""Reverse-mode gradients through the unfolded decoder, plus an fd verifier.

Subgradient conventions (shared with the forward pass):
  * sign(.) is treated as piecewise constant (derivative 0),
  * the extrinsic min routes its derivative to the stored argmin edge only
    (lowest edge index on ties),
  * damping, weighting and the beta_raw -> beta sigmoid are exact.
"""

import numpy as np

from .decoder import DecoderParams, decode_forward, _var_totals


class Gradient:
    """Derivatives matching DecoderParams: per-iteration beta_raw, per-edge w."""

    def __init__(self, d_beta_raw, d_edge_weights):
        self.d_beta_raw = np.asarray(d_beta_raw, dtype=float)
        self.d_edge_weights = np.asarray(d_edge_weights, dtype=float)

    def __add__(self, other):
        return Gradient(self.d_beta_raw + other.d_beta_raw,
                        self.d_edge_weights + other.d_edge_weights)

    def scaled(self, a):
        return Gradient(a * self.d_beta_raw, a * self.d_edge_weights)


def _edge_sign(x):
    # Forward-pass sign convention: zero counts as positive.
    return np.where(x < 0, -1.0, 1.0)


def backprop(code, params, trace, d_output_llrs):
    """Pull d(loss)/d(output logits) back to DecoderParams derivatives."""
    d_out = np.atleast_2d(np.asarray(d_output_llrs, dtype=float))
    if d_out.shape[1] != code.n:
        raise ValueError("expected %d output adjoints, got %d" % (code.n, d_out.shape[1]))
    T = params.iterations
    if len(trace.v2c) != T:
        raise ValueError("trace has %d iterations, params have %d" % (len(trace.v2c), T))
    B, E = d_out.shape[0], code.num_edges
    beta = params.beta
    w = params.edge_weights
    rows = np.arange(B)[:, None]
    edge_ids = np.arange(E)[None, :]

    d_beta = np.zeros(T)
    d_w = np.zeros(E)
    d_c2v = d_out[:, code.edge_var]          # output layer: plain sum over edges

    for t in range(T - 1, -1, -1):
        v2c = trace.v2c[t]
        raw_unw = trace.raw_unweighted[t]
        c2v_prev = trace.c2v[t - 1] if t > 0 else np.zeros((B, E))

        d_beta[t] = np.sum((c2v_prev - w[None, :] * raw_unw) * d_c2v)
        d_chat = (1.0 - beta[t]) * d_c2v      # adjoint of w * raw_unweighted
        d_c2v_prev = beta[t] * d_c2v          # damping passthrough
        d_w += np.sum(raw_unw * d_chat, axis=0)
        d_raw = w[None, :] * d_chat

        # min routing: raw_unw[e] = ext_sign[e] * |v2c[src(e)]|
        signs = _edge_sign(v2c)
        neg = np.zeros((B, code.m))
        np.add.at(neg, (rows, np.broadcast_to(code.edge_check, (B, E))), (v2c < 0).astype(float))
        prod_sign = 1.0 - 2.0 * (neg % 2)
        ext_sign = prod_sign[:, code.edge_check] * signs

        s1 = trace.src1[t][:, code.edge_check]
        s2 = trace.src2[t][:, code.edge_check]
        src = np.where(edge_ids == s1, s2, s1)
        sign_src = _edge_sign(np.take_along_axis(v2c, src, axis=1))
        contrib = d_raw * ext_sign * sign_src

        d_v2c = np.zeros((B, E))
        np.add.at(d_v2c, (rows, src), contrib)

        # V2C backward: v2c[e] = llr[var] + sum_{e' in var} c2v_prev[e'] - c2v_prev[e]
        tot = _var_totals(code, d_v2c)
        d_c2v = d_c2v_prev + tot[:, code.edge_var] - d_v2c

    d_beta_raw = d_beta * beta * (1.0 - beta)
    return Gradient(d_beta_raw, d_w)


def decoder_loss_and_gradient(code, params, channel_llrs, info_bits, loss_fn,
                              sample_scale=None):
    """Total loss over a batch and its gradient w.r.t. DecoderParams.

    loss_fn(bits, logits) -> (per-sample values, per-bit gradients); the loss
    is evaluated on the information-bit positions only.  sample_scale, if
    given, multiplies each sample's contribution (used for SNR deweighting).
    """
    out, trace = decode_forward(code, params, channel_llrs)
    out2 = np.atleast_2d(out)
    info = out2[:, code.info_positions]
    values, grads = loss_fn(np.atleast_2d(info_bits), info)
    if sample_scale is not None:
        scale = np.asarray(sample_scale, dtype=float)
        total = float(np.sum(scale * values))
        grads = grads * scale[:, None]
    else:
        total = float(np.sum(values))
    d_out = np.zeros_like(out2)
    d_out[:, code.info_positions] = grads
    return total, values, backprop(code, params, trace, d_out)


def _pattern(trace):
    """Hashable summary of the non-smooth choices taken by a forward pass."""
    parts = []
    for t in range(len(trace.v2c)):
        parts.append((trace.v2c[t] < 0).tobytes())
        parts.append(trace.src1[t].tobytes())
        parts.append(trace.src2[t].tobytes())
    return b"".join(parts)


def finite_diff_check(code, params, loss_fn, channel_llrs, info_bits,
                      h_beta=1e-5, h_w=1e-6):
    """Compare backprop against central differences, parameter by parameter.

    Parameters whose +-h evaluations cross a non-smooth boundary (a min tie
    or a message sign flip changes the routing pattern) are flagged and
    excluded from the max relative error.  Returns a report dict.
    """
    if h_beta <= 0 or h_w <= 0:
        raise ValueError("finite-difference step must be positive")

    def total_loss(p):
        out, trace = decode_forward(code, p, channel_llrs)
        info = np.atleast_2d(out)[:, code.info_positions]
        values, _ = loss_fn(np.atleast_2d(info_bits), info)
        return float(np.sum(values)), trace

    base_value, base_trace = total_loss(params)
    base_pat = _pattern(base_trace)
    _, _, grad = decoder_loss_and_gradient(code, params, channel_llrs, info_bits, loss_fn)

    entries = []

    def probe(kind, index, analytic, h):
        p = params.copy()
        arr = p.beta_raw if kind == "beta_raw" else p.edge_weights
        arr[index] += h
        up, tr_up = total_loss(p)
        arr[index] -= 2 * h
        down, tr_down = total_loss(p)
        arr[index] += h
        numeric = (up - down) / (2 * h)
        flagged = _pattern(tr_up) != base_pat or _pattern(tr_down) != base_pat
        # floor on the denominator: central differences cannot resolve
        # derivatives below ~eps * |loss| / h, so gradients that small are
        # compared in absolute terms instead of amplifying round-off
        floor = max(1.0, abs(base_value)) * 1e-5
        denom = max(abs(analytic), abs(numeric), floor)
        exact = analytic == 0.0 and numeric == 0.0
        rel = 0.0 if exact else abs(analytic - numeric) / denom
        entries.append({"param": "%s[%d]" % (kind, index), "analytic": analytic,
                        "numeric": numeric, "rel_error": rel, "flagged": flagged})

    for t in range(params.iterations):
        probe("beta_raw", t, grad.d_beta_raw[t], h_beta)
    for e in range(code.num_edges):
        probe("edge_weights", e, grad.d_edge_weights[e], h_w)

    clean = [en["rel_error"] for en in entries if not en["flagged"]]
    return {
        "value": base_value,
        "entries": entries,
        "num_flagged": sum(en["flagged"] for en in entries),
        "max_rel_error": max(clean) if clean else 0.0,
    }
