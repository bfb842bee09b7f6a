"""modemlab: GAM constellations and Gaussian codebooks over AWGN, with
exact maximum-likelihood and trainable neural detection, BER Monte Carlo,
and per-query complexity benchmarking."""

from .channel import (add_awgn_complex, add_awgn_real, oversample,
                      sigma2_for_decode, sigma2_for_demod)
from .codebook import (GaussianCodebook, build_codebook, encode,
                       load_codebook, save_codebook)
from .constellation import (GamConstellation, THETA, bits_to_symbol,
                            build_constellation, symbol_to_bits,
                            write_constellation_csv)
from .datasets import (Dataset, generate_decode_dataset,
                       generate_demod_dataset, load_dataset, save_dataset)
from .detectors import (CandidateSet, MLDetector, NeuralDetector,
                        build_candidates_from_codebook,
                        build_candidates_from_constellation, ml_detect)
from .errors import CapacityError, ConfigError, DivergenceError, ModemLabError
from .evaluation import (BerReport, DecodeLink, DemodLink, ber, ber_sweep,
                         mac_count, mac_count_pair, ml_candidate_count,
                         time_per_query, wilson_interval)
from .mlp import (AdamState, Mlp, TrainConfig, adam_init, adam_step, backward,
                  forward, init_mlp, interleave_complex, load_model, mse_loss,
                  predict_bits, save_model, train)

__version__ = "0.1.0"
