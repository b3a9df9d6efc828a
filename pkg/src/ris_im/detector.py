"""Joint maximum-likelihood detection of symbol and RIS codeword."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import Codebook
from .constellation import Constellation
from .link import effective_gains
from .ris import GroupGains

__all__ = ["Hypothesis", "DetectionResult", "ml_detect", "ml_detect_batch", "count_bit_errors", "popcount"]


@dataclass(frozen=True)
class Hypothesis:
    symbol: int
    codeword: int
    metric: float


@dataclass(frozen=True, eq=False)
class DetectionResult:
    best: Hypothesis
    symbol_bits: np.ndarray
    index_bits: np.ndarray
    runner_up_metric: float
    num_hypotheses: int


def _metrics(y, eff, points, sqrt_pt):
    # (..., R, M) squared distances; codeword-major so a flat argmin breaks
    # ties on the lowest (codeword, symbol) pair.
    cand = sqrt_pt * eff[..., :, None] * points
    return np.abs(np.asarray(y)[..., None, None] - cand) ** 2


def ml_detect_batch(y, eff, points, sqrt_pt) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ML search.

    Parameters
    ----------
    y : complex array, shape (T,)
    eff : complex array, shape (T, R)
        Effective gain of every codeword for each trial's channel.
    points : complex array, shape (M,)
    sqrt_pt : float

    Returns
    -------
    codeword_hat, symbol_hat : int arrays, shape (T,)
    """
    d = _metrics(y, eff, points, sqrt_pt)
    M = d.shape[-1]
    flat = np.argmin(d.reshape(d.shape[:-2] + (-1,)), axis=-1)
    return flat // M, flat % M


def ml_detect(y: complex, gains: GroupGains, codebook: Codebook, constellation: Constellation,
              transmit_power: float) -> DetectionResult:
    """Exhaustive search over all ``M * len(codebook)`` hypotheses for one sample."""
    sqrt_pt = np.sqrt(transmit_power)
    eff = effective_gains(gains, codebook)
    d = _metrics(y, eff, constellation.points, sqrt_pt).ravel()
    order = np.argsort(d, kind="stable")
    best = int(order[0])
    M = constellation.M
    rho, m = divmod(best, M)
    runner_up = float(d[order[1]]) if d.size > 1 else float("inf")
    return DetectionResult(
        best=Hypothesis(symbol=m, codeword=rho, metric=float(d[best])),
        symbol_bits=constellation.demap_index(m),
        index_bits=codebook.demap_codeword(rho),
        runner_up_metric=runner_up,
        num_hypotheses=d.size,
    )


_POP8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


def popcount(values) -> np.ndarray:
    """Number of set bits of non-negative integers (up to 64 bits)."""
    v = np.asarray(values, dtype=np.uint64)
    total = np.zeros(v.shape, dtype=np.int64)
    while np.any(v):
        total += _POP8[(v & np.uint64(0xFF)).astype(np.int64)]
        v = v >> np.uint64(8)
    return total


def count_bit_errors(truth, detected) -> tuple[int, int]:
    """Hamming distances ``(symbol_bit_errors, index_bit_errors)``.

    ``truth`` is a ``(b1, b2)`` pair of bit vectors; ``detected`` is either a
    :class:`DetectionResult` or another ``(b1, b2)`` pair.
    """
    b1, b2 = (np.asarray(b) for b in truth)
    if isinstance(detected, DetectionResult):
        d1, d2 = detected.symbol_bits, detected.index_bits
    else:
        d1, d2 = (np.asarray(b) for b in detected)
    if b1.shape != d1.shape or b2.shape != d2.shape:
        raise ValueError("bit vector lengths differ between truth and detection")
    return int(np.sum(b1 != d1)), int(np.sum(b2 != d2))
