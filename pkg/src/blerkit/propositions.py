"""Self-contained verification suite for the theory results on finite channels.

Each check returns a dict with a pass flag and a numeric margin; `verify_all`
bundles them into a machine-readable report.  The decoding-gap example uses
the channel with codeword posteriors (0.2, 0.35, 0.4, 0.05), where the
bitwise rule decides (0,0) with conditional block error 0.8 while the block
rule decides (1,0) with conditional block error 0.6.  The bit marginals of
that posterior are p(b1=1|y) = 0.4 + 0.05 = 0.45 and
p(b2=1|y) = 0.35 + 0.05 = 0.40 (any other value for the second marginal is
inconsistent with the block error probabilities: 0.8 pins p(0,0|y) = 0.2,
and the four masses must sum to one).
"""

import numpy as np

from . import discrete
from .rng import derive_stream

HOEFFDING_CONFIDENCE = 0.999


def decoding_gap_channel():
    """Two equiprobable bits, one output realizing posteriors (0.2, 0.35, 0.4, 0.05)."""
    target = np.array([0.2, 0.35, 0.4, 0.05])
    p_y0 = target / target.max()
    like = np.stack([p_y0, 1.0 - p_y0], axis=1)
    prior = np.full(4, 0.25)
    ch = discrete.DiscreteChannel(2, prior, like)
    codebook = discrete.Codebook(discrete.all_blocks(2))   # identity encoder
    return ch, codebook


def check_decoding_gap():
    ch, cb = decoding_gap_channel()
    marg = discrete.posterior_marginals(ch, 0)
    bitwise = discrete.bitwise_map_decode(ch, 0)
    blockwise = discrete.block_map_decode(ch, cb, 0)
    p_err_bitwise = discrete.conditional_block_error(ch, 0, bitwise)
    p_err_block = discrete.conditional_block_error(ch, 0, blockwise)
    errs = [abs(marg[0] - 0.45), abs(marg[1] - 0.40),
            abs(p_err_bitwise - 0.8), abs(p_err_block - 0.6)]
    passed = (max(errs) <= 1e-12 and tuple(bitwise) == (0, 0)
              and tuple(blockwise) == (1, 0))
    return {"name": "decoding_rule_gap", "passed": bool(passed),
            "margin": 1e-12 - max(errs),
            "details": {"marginals": marg.tolist(),
                        "bitwise_decision": bitwise.tolist(),
                        "block_decision": blockwise.tolist(),
                        "p_block_error_bitwise": p_err_bitwise,
                        "p_block_error_block": p_err_block}}


def hoeffding_epsilon(n, confidence=HOEFFDING_CONFIDENCE):
    """Two-sided Hoeffding deviation bound for a mean of n Bernoulli draws."""
    return np.sqrt(np.log(2.0 / (1.0 - confidence)) / (2.0 * n))


def grid_search_fit(bits, y, num_outputs, loss, step=1e-3):
    """Brute-force table minimizer over a value grid; oracle for the closed form."""
    bits = np.asarray(bits, dtype=float)
    y = np.asarray(y)
    K = bits.shape[1]
    grid = np.arange(0.0, 1.0 + step / 2, step)
    table = np.zeros((num_outputs, K))
    for yy in range(num_outputs):
        sel = y == yy
        count = sel.sum()
        ones = bits[sel].sum(axis=0)
        for k in range(K):
            s1, s0 = ones[k], count - ones[k]
            with np.errstate(divide="ignore", invalid="ignore"):
                if loss == "bce":
                    obj = -(s1 * np.log(grid) + s0 * np.log(1.0 - grid))
                    obj = np.where(np.isnan(obj), np.inf, obj)
                else:
                    obj = s1 * (1.0 - grid) ** 2 + s0 * grid ** 2
            table[yy, k] = grid[int(np.argmin(obj))]
    return table


def check_erm_learns_marginals(seed, channels=20, samples=10 ** 5):
    """Sampled ERM tables match the closed form, a grid search, and the true
    marginals within the Hoeffding bound of the smallest bucket."""
    worst_excess = -np.inf
    grid_gap = 0.0
    rng_master = derive_stream(seed, "erm")
    for i in range(channels):
        rng = derive_stream(seed, "erm", i)
        K = int(rng_master.integers(1, 4))
        ny = int(rng_master.integers(2, 9))
        ch = discrete.random_channel(K, ny, rng)
        bits, y = ch.sample(samples, rng)
        fit = discrete.erm_fit(bits, y, ny)
        truth = discrete.posterior_marginal_table(ch)
        n_min = min(int((y == yy).sum()) for yy in range(ny))
        eps = hoeffding_epsilon(n_min)
        dev = float(np.max(np.abs(fit - truth)))
        worst_excess = max(worst_excess, dev - eps)
        if i < 3:   # grid search is slow; spot-check a few instances
            for loss in ("bce", "mse"):
                gfit = grid_search_fit(bits, y, ny, loss)
                grid_gap = max(grid_gap, float(np.max(np.abs(gfit - fit))))
    passed = worst_excess <= 0 and grid_gap <= 5e-4 + 1e-12
    return {"name": "erm_learns_posterior_marginals", "passed": bool(passed),
            "margin": -worst_excess,
            "details": {"worst_deviation_minus_epsilon": worst_excess,
                        "grid_search_gap": grid_gap,
                        "channels": channels, "samples": samples}}


def strict_gap_channel():
    """Joint posterior depends on y but the marginals never move: y = parity.

    Uniform prior on 2 bits; y=0 iff b1 = b2.  Marginals are (1/2, 1/2) for
    every y, so the marginal table is constant and I(b; table(y)) = 0 while
    I(b; y) = 1 bit.
    """
    like = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
    return discrete.DiscreteChannel(2, np.full(4, 0.25), like)


def check_mutual_information(seed, random_channels=20, random_functions=100):
    eq_err = 0.0
    dpi_violation = -np.inf
    bij_err = 0.0
    rng = derive_stream(seed, "mi")
    for i in range(random_channels):
        K = int(rng.integers(1, 4))
        ny = int(rng.integers(2, 9))
        ch = discrete.random_channel(K, ny, rng)
        truth = discrete.posterior_marginal_table(ch)
        for k in range(K):
            iy = discrete.mi_bit_output(ch, k)
            ig = discrete.mi_bit_function(ch, k, truth[:, k])
            eq_err = max(eq_err, abs(ig - iy))
            ibij = discrete.mi_bit_function(ch, k, 1.0 - truth[:, k])
            bij_err = max(bij_err, abs(ibij - ig))
    ch = discrete.random_channel(2, 8, derive_stream(seed, "mi_dpi"))
    rng2 = derive_stream(seed, "mi_dpi", 1)
    for _ in range(random_functions):
        # coarse quantization makes many of these genuinely lossy
        g = np.round(rng2.random(ch.num_outputs) * 3) / 3.0
        for k in range(ch.K):
            gap = discrete.mi_bit_function(ch, k, g) - discrete.mi_bit_output(ch, k)
            dpi_violation = max(dpi_violation, gap)
    gap_ch = strict_gap_channel()
    marg_table = discrete.posterior_marginal_table(gap_ch)
    joint_gap = discrete.mi_block_output(gap_ch) - discrete.mi_block_function(gap_ch, marg_table)
    passed = eq_err <= 1e-12 and dpi_violation <= 1e-12 and joint_gap > 1e-6 and bij_err <= 1e-12
    return {"name": "mutual_information_suite", "passed": bool(passed),
            "margin": min(1e-12 - eq_err, 1e-12 - dpi_violation, joint_gap - 1e-6),
            "details": {"equality_error": eq_err, "dpi_violation": dpi_violation,
                        "bijection_error": bij_err, "strict_joint_gap": joint_gap}}


def check_decoder_optimality(seed, instances=200, random_rules=50):
    """Block-MAP minimizes exact BLER, bitwise-MAP minimizes exact BER."""
    worst_bler = -np.inf
    worst_ber = -np.inf
    worst_random = -np.inf
    rng = derive_stream(seed, "optimality")
    for _ in range(instances):
        K = int(rng.integers(1, 4))
        ny = int(rng.integers(2, 13))
        ch = discrete.random_channel(K, ny, rng, prior="random")
        cb = discrete.Codebook(discrete.all_blocks(K))
        bit_rule = discrete.bitwise_map_rule(ch)
        blk_rule = discrete.block_map_rule(ch, cb)
        ber_bit, bler_bit = discrete.exact_error_rates(ch, bit_rule)
        ber_blk, bler_blk = discrete.exact_error_rates(ch, blk_rule)
        worst_bler = max(worst_bler, bler_blk - bler_bit)
        worst_ber = max(worst_ber, ber_bit - ber_blk)
        for _ in range(random_rules):
            rule = rng.integers(0, 2, size=(ny, K), dtype=np.uint8)
            _, bler_r = discrete.exact_error_rates(ch, rule)
            worst_random = max(worst_random, bler_blk - bler_r)
    tol = 1e-12
    passed = worst_bler <= tol and worst_ber <= tol and worst_random <= tol
    return {"name": "map_decoder_optimality", "passed": bool(passed),
            "margin": tol - max(worst_bler, worst_ber, worst_random),
            "details": {"max_bler_excess_vs_bitwise": worst_bler,
                        "max_ber_excess_vs_block": worst_ber,
                        "max_bler_excess_vs_random": worst_random}}


def verify_all(seed=12345):
    """Run every proposition check; returns {"passed": bool, "checks": [...]}."""
    checks = [
        check_decoding_gap(),
        check_erm_learns_marginals(seed),
        check_mutual_information(seed),
        check_decoder_optimality(seed),
    ]
    return {"passed": all(c["passed"] for c in checks), "checks": checks}
