"""Gray-labelled PSK/QAM constellations with unit average energy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ConstellationKind

__all__ = ["Constellation", "build", "gray", "bits_to_int", "int_to_bits"]


def gray(n):
    """Binary-reflected Gray code of ``n`` (works on ints and int arrays)."""
    return n ^ (n >> 1)


def bits_to_int(bits) -> np.ndarray | int:
    """Pack a bit vector (MSB first) into an integer.

    Leading axes are treated as a batch, so a ``(T, k)`` array returns
    ``T`` integers.
    """
    bits = np.asarray(bits, dtype=np.int64)
    k = bits.shape[-1]
    weights = 1 << np.arange(k - 1, -1, -1, dtype=np.int64)
    out = bits @ weights
    return int(out) if out.ndim == 0 else out


def int_to_bits(values, k: int) -> np.ndarray:
    """Inverse of :func:`bits_to_int`; returns ``(..., k)`` MSB-first bits."""
    values = np.asarray(values, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    return (values[..., None] >> shifts) & 1


@dataclass(frozen=True, eq=False)
class Constellation:
    """An M-ary constellation.

    ``points[i]`` carries the bit label ``labels[i]`` (an integer whose
    binary expansion, MSB first, is the bit vector mapped onto it).
    """

    kind: ConstellationKind
    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        inverse = np.empty_like(self.labels)
        inverse[self.labels] = np.arange(self.labels.size)
        object.__setattr__(self, "_index_of_label", inverse)
        self.points.setflags(write=False)
        self.labels.setflags(write=False)

    @property
    def M(self) -> int:
        return self.points.size

    @property
    def bits_per_symbol(self) -> int:
        return self.M.bit_length() - 1

    def index_of_bits(self, bits):
        """Point index carrying the given bits (batched over leading axes)."""
        bits = np.asarray(bits)
        if bits.shape[-1] != self.bits_per_symbol:
            raise ValueError(f"expected {self.bits_per_symbol} bits per symbol, got {bits.shape[-1]}")
        return self._index_of_label[bits_to_int(bits)]

    def map_bits(self, bits):
        """Modulate a bit vector (or a ``(..., k)`` batch) onto symbols."""
        idx = self.index_of_bits(bits)
        return self.points[idx]

    def demap_index(self, index):
        """Bits carried by the point(s) at ``index``."""
        index = np.asarray(index)
        if np.any(index < 0) or np.any(index >= self.M):
            raise IndexError(f"point index out of range for M={self.M}")
        return int_to_bits(self.labels[index], self.bits_per_symbol)


def _psk(M: int) -> tuple[np.ndarray, np.ndarray]:
    # QPSK sits on the diagonals; other orders start at phase 0 so BPSK is +-1.
    offset = np.pi / 4 if M == 4 else 0.0
    k = np.arange(M)
    points = np.exp(1j * (2 * np.pi * k / M + offset))
    if M == 2:
        points = np.array([1.0 + 0j, -1.0 + 0j])
    return points, gray(k)


def _qam(M: int) -> tuple[np.ndarray, np.ndarray]:
    half = (M.bit_length() - 1) // 2
    L = 1 << half
    idx = np.arange(M)
    row, col = idx // L, idx % L
    points = (2 * col - L + 1) + 1j * (2 * row - L + 1)
    points = points / np.sqrt(2 * (M - 1) / 3)
    labels = (gray(row) << half) | gray(col)
    return points.astype(complex), labels


def build(M: int, kind=ConstellationKind.PSK) -> Constellation:
    """Build a unit-average-energy, Gray-labelled constellation.

    >>> build(2).points
    array([ 1.+0.j, -1.+0.j])
    """
    kind = ConstellationKind(kind)
    if not isinstance(M, (int, np.integer)) or M < 2 or M & (M - 1):
        raise ValueError(f"M={M!r} is not a power of two >= 2")
    if kind is ConstellationKind.PSK:
        points, labels = _psk(int(M))
    else:
        if (M.bit_length() - 1) % 2:
            raise ValueError(f"square QAM needs an even number of bits per symbol, got M={M}")
        points, labels = _qam(int(M))
    return Constellation(kind, points, labels.astype(np.int64))
