"""Link-level toolkit for BLER-targeted losses, SNR-deweighted training of a
deep-unfolded weighted min-sum LDPC decoder, and exact verification of the
underlying decision-theory results on finite channels."""

from .channel import map_qpsk, awgn, demap_qpsk, noise_variance
from .codes import LdpcCode, load_alist, parse_alist, bundled_code, bundled_code_path, AlistError
from .decoder import DecoderParams, decode_forward, hard_decision
from .autodiff import Gradient, backprop, finite_diff_check, decoder_loss_and_gradient
from .losses import (bce, mse, product_loss, max_loss, smoothmax_loss,
                     logsumexp_loss, pnorm_loss, per_bit_bce, make_loss, LOSS_NAMES)
from .deweight import SnrGrid, DeweightState, partition_batch, batch_loss
from .training import TrainConfig, TrainReport, run_training, validation_loss
from .discrete import (DiscreteChannel, Codebook, posterior_joint, posterior_marginals,
                       bitwise_map_decode, block_map_decode, exact_error_rates, erm_fit)
from .montecarlo import McResult, mc_link_run, loss_sweep, write_csv
from .propositions import verify_all
from .rng import derive_stream

__version__ = "0.1.0"
