"""Bit-level (BCE, MSE) and block-level (Product, Max, SmoothMax, LogSumExp,
p-norm) losses on logits, each returning values and exact logit gradients.

All functions are batched: bits and logits are (B, K), values come back as
(B,) and gradients as (B, K).  The per-bit building block is
x_k = softplus(-(2 b_k - 1) l_k), the binary cross-entropy of bit k,
computed in stable form so confidently wrong bits (|l| > 30) do not lose
precision.  dx_k/dl_k = sigmoid(l_k) - b_k.
"""

import numpy as np


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _softplus(x):
    return np.logaddexp(0.0, x)


def _prep(bits, logits):
    b = np.atleast_2d(np.asarray(bits, dtype=float))
    l = np.atleast_2d(np.asarray(logits, dtype=float))
    if b.shape != l.shape:
        raise ValueError("bits %s and logits %s differ in shape" % (b.shape, l.shape))
    return b, l


def per_bit_bce(bits, logits):
    """x_k = softplus(-(2b-1) l) and its logit derivative sigmoid(l) - b."""
    b, l = _prep(bits, logits)
    s = 2.0 * b - 1.0
    x = _softplus(-s * l)
    dx = _sigmoid(l) - b
    return x, dx


def bce(bits, logits):
    """Sum of per-bit cross-entropies; gradient sigmoid(l) - b."""
    x, dx = per_bit_bce(bits, logits)
    return x.sum(axis=1), dx


def mse(bits, logits):
    """Mean squared error between bits and sigmoid(logits), averaged over K."""
    b, l = _prep(bits, logits)
    K = b.shape[1]
    f = _sigmoid(l)
    value = np.sum((b - f) ** 2, axis=1) / K
    grad = -2.0 * (b - f) * f * (1.0 - f) / K
    return value, grad


def product_loss(bits, logits):
    """1 - prod_k sigmoid((2b-1) l); in [0, 1], small iff all bits are right.

    Uses prod sigmoid(z_k) = exp(-sum x_k), so the leave-one-out products
    never hit 0/0.
    """
    x, _ = per_bit_bce(bits, logits)
    b, l = _prep(bits, logits)
    s = 2.0 * b - 1.0
    total = x.sum(axis=1)
    value = 1.0 - np.exp(-total)
    # d/dl_k = -s_k sigma'(z_k) prod_{j != k} sigma(z_j),  sigma(z_k) = e^{-x_k}
    grad = -s * (1.0 - np.exp(-x)) * np.exp(-total[:, None])
    return value, grad


def max_loss(bits, logits):
    """Worst per-bit cross-entropy; gradient only at the argmax (lowest index on ties)."""
    x, dx = per_bit_bce(bits, logits)
    am = x.argmax(axis=1)
    value = np.take_along_axis(x, am[:, None], axis=1)[:, 0]
    grad = np.zeros_like(x)
    rows = np.arange(x.shape[0])
    grad[rows, am] = dx[rows, am]
    return value, grad


def smoothmax_loss(bits, logits, alpha=0.5):
    """Exponentially weighted average of the x_k, sharpness alpha > 0."""
    if alpha <= 0:
        raise ValueError("smoothmax needs alpha > 0")
    x, dx = per_bit_bce(bits, logits)
    shifted = alpha * (x - x.max(axis=1, keepdims=True))
    e = np.exp(shifted)
    p = e / e.sum(axis=1, keepdims=True)
    value = np.sum(p * x, axis=1)
    # dv/dx_k = p_k (1 + alpha (x_k - v))
    grad = p * (1.0 + alpha * (x - value[:, None])) * dx
    return value, grad


def logsumexp_loss(bits, logits, gamma=None):
    """log(sum_k exp(x_k) - gamma) with gamma defaulting to K - 1.

    With the default the loss is 0 at perfect prediction (all x_k = 0) and
    collapses to x_1 for K = 1.
    """
    x, dx = per_bit_bce(bits, logits)
    K = x.shape[1]
    if gamma is None:
        gamma = K - 1.0
    M = x.max(axis=1, keepdims=True)
    inner = np.exp(x - M).sum(axis=1, keepdims=True) - gamma * np.exp(-M)
    value = (M + np.log(inner))[:, 0]
    grad = np.exp(x - M) / inner * dx
    return value, grad


def pnorm_loss(bits, logits, p=2.0, gamma=1e-8):
    """(sum_k x_k^p + gamma)^(1/p) for p >= 1; gamma keeps the gradient finite at 0."""
    if p < 1:
        raise ValueError("p-norm loss needs p >= 1")
    x, dx = per_bit_bce(bits, logits)
    total = np.sum(x ** p, axis=1) + gamma
    value = total ** (1.0 / p)
    grad = x ** (p - 1.0) * total[:, None] ** (1.0 / p - 1.0) * dx
    return value, grad


LOSS_NAMES = ("bce", "mse", "product", "max", "smoothmax", "lse", "pnorm")


def make_loss(kind, alpha=0.5, gamma=None, p=2.0):
    """Resolve a config name to a loss(bits, logits) -> (values, grads) callable."""
    if kind == "bce":
        return bce
    if kind == "mse":
        return mse
    if kind == "product":
        return product_loss
    if kind == "max":
        return max_loss
    if kind == "smoothmax":
        return lambda b, l: smoothmax_loss(b, l, alpha=alpha)
    if kind == "lse":
        return lambda b, l: logsumexp_loss(b, l, gamma=gamma)
    if kind == "pnorm":
        g = 1e-8 if gamma is None else gamma
        return lambda b, l: pnorm_loss(b, l, p=p, gamma=g)
    raise ValueError("unknown loss kind %r (one of %s)" % (kind, ", ".join(LOSS_NAMES)))
