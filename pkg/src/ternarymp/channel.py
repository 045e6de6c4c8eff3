"""biAWGN channel model: SNR conversions, channel LLRs, error-and-erasure reliability."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelParams:
    """Consistent biAWGN operating point for BPSK with code rate ``rate``.

    ``llr_mean`` is the mean of the channel LLR conditioned on +1 transmission
    and ``llr_std`` its standard deviation; the two always satisfy
    llr_std**2 == 2 * llr_mean.
    """

    ebn0_db: float
    rate: float
    sigma: float
    llr_mean: float
    llr_std: float


def channel_from_ebn0(ebn0_db: float, rate: float) -> ChannelParams:
    """Channel parameters at a given Eb/N0 in dB for code rate in (0, 1)."""
    if not 0.0 < rate < 1.0:
        raise ValueError(f"rate {rate} outside (0, 1)")
    ebn0 = 10.0 ** (ebn0_db / 10.0)
    llr_mean = 4.0 * rate * ebn0
    sigma = math.sqrt(1.0 / (2.0 * rate * ebn0))
    return ChannelParams(ebn0_db, rate, sigma, llr_mean, math.sqrt(2.0 * llr_mean))


def ebn0_from_sigma(sigma: float, rate: float) -> float:
    """Inverse of channel_from_ebn0: noise std + rate back to Eb/N0 in dB."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return 10.0 * math.log10(1.0 / (2.0 * rate * sigma * sigma))


def llr_from_observation(y, sigma: float):
    """Channel LLR 2*y/sigma^2 of a biAWGN observation (elementwise on arrays)."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return 2.0 * np.asarray(y) / (sigma * sigma)


def rng_stream(seed, *indices) -> np.random.Generator:
    """Named, seedable generator; substreams derive from (seed, *indices).

    Workers use one stream each, e.g. ``rng_stream(seed, point, batch)``, so
    multi-worker runs reproduce regardless of scheduling.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, indices)]))


def sample_awgn_allzero(n: int, sigma: float, seed) -> np.ndarray:
    """Observations for the all-zero codeword (all-(+1) modulated) over biAWGN.

    ``seed`` may be an integer or a ready ``np.random.Generator``. All-zero
    transmission is fully representative because every decoder map here is
    odd in the LLRs, making error statistics codeword independent.
    """
    if n < 1:
        raise ValueError("need n >= 1 samples")
    rng = seed if isinstance(seed, np.random.Generator) else rng_stream(seed)
    return 1.0 + rng.normal(0.0, sigma, size=n)


def beec_reliability(theta: float, epsilon: float) -> float:
    """Reliability ln((1 - theta - epsilon) / theta) of an error-and-erasure channel.

    theta is the error probability, epsilon the erasure probability.
    """
    if theta <= 0.0:
        raise ValueError("theta must be positive (zero error means infinite reliability)")
    if epsilon < 0.0 or theta + epsilon >= 1.0:
        raise ValueError("need epsilon >= 0 and theta + epsilon < 1")
    return math.log((1.0 - theta - epsilon) / theta)
