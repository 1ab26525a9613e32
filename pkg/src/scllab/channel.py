"""BPSK over AWGN with deterministic per-frame noise substreams.

Every random draw is keyed by (seed, frame_index, stream tag), so results do
not depend on processing order or worker count.  Positive LLR favors bit 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DATA_STREAM = 0
NOISE_STREAM = 1


def frame_rng(seed: int, frame_index: int, stream: int) -> np.random.Generator:
    """Independent generator for one (frame, stream) pair under a run seed."""
    ss = np.random.SeedSequence(seed, spawn_key=(frame_index, stream))
    return np.random.default_rng(ss)


@dataclass(frozen=True)
class ChannelConfig:
    """SNR per information bit, code rate, and the run's reproducibility seed."""

    ebn0_db: float
    rate: float
    seed: int

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError(f"rate must lie in (0, 1], got {self.rate}")

    @property
    def sigma2(self) -> float:
        """Noise variance for unit-energy BPSK symbols."""
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0))


def observation_to_llr(y, sigma2: float):
    """Channel LLR of a received value under BPSK/AWGN: 2y / sigma^2."""
    return 2.0 * np.asarray(y, dtype=np.float64) / sigma2


def transmit_batch(codewords: np.ndarray, cfg: ChannelConfig, frame_indices) -> np.ndarray:
    """Modulate, add per-frame keyed noise, and return channel LLRs.

    Parameters
    ----------
    codewords : (frames, n) array of bits
    frame_indices : per-frame counters keying the noise substreams
    """
    codewords = np.asarray(codewords, dtype=np.uint8)
    if codewords.ndim != 2:
        raise ValueError("codewords must be a (frames, n) array")
    frame_indices = np.asarray(frame_indices)
    if frame_indices.shape != (codewords.shape[0],):
        raise ValueError("one frame index per codeword required")
    n = codewords.shape[1]
    sigma2 = cfg.sigma2
    sigma = np.sqrt(sigma2)
    symbols = 1.0 - 2.0 * codewords.astype(np.float64)
    y = symbols.copy()
    for row, fi in enumerate(frame_indices):
        rng = frame_rng(cfg.seed, int(fi), NOISE_STREAM)
        y[row] += sigma * rng.standard_normal(n)
    return 2.0 * y / sigma2


def transmit(codeword, cfg: ChannelConfig, frame_index: int) -> np.ndarray:
    """Single-frame form of :func:`transmit_batch`."""
    codeword = np.asarray(codeword, dtype=np.uint8)
    return transmit_batch(codeword[None, :], cfg, [frame_index])[0]


def noiseless_llrs(codewords, magnitude: float = 40.0) -> np.ndarray:
    """LLRs of a noise-free observation: +magnitude for bit 0, -magnitude for bit 1."""
    codewords = np.asarray(codewords, dtype=np.uint8)
    return magnitude * (1.0 - 2.0 * codewords.astype(np.float64))
