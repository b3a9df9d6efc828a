"""Index-modulation codebooks: bits <-> per-group RIS states."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .constellation import bits_to_int, int_to_bits
from .params import InactiveMode, Scheme, SystemConfig

__all__ = [
    "State",
    "StateCodeword",
    "Codebook",
    "ota_codebook",
    "eota_codebook",
    "rgb_codebook",
    "codebook_for",
    "index_bits_for",
    "spectral_efficiency",
]


class State(enum.IntEnum):
    ACTIVE = 0
    PASSIVE = 1
    ABSORPTION = 2
    INACTIVE = 3  # benchmark: reflects with zero phase shift, not aligned

    @property
    def label(self) -> str:
        return self.name.capitalize()


def index_bits_for(scheme, G: int) -> int:
    """Number of index bits a scheme carries with ``G`` groups.

    Uses integer arithmetic only: floor(log2(3**G)) is the bit length of
    3**G minus one.
    """
    scheme = Scheme(scheme)
    if scheme is Scheme.OTA:
        return G
    if scheme is Scheme.EOTA:
        return (3**G).bit_length() - 1
    return G.bit_length() - 1


def spectral_efficiency(scheme, M: int, G: int) -> int:
    """Bits per channel use: symbol bits plus index bits."""
    if M < 2 or M & (M - 1):
        raise ValueError(f"M={M} is not a power of two >= 2")
    return (M.bit_length() - 1) + index_bits_for(scheme, G)


@dataclass(frozen=True)
class StateCodeword:
    index: int
    states: tuple[State, ...]
    gains: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class Codebook:
    """Ordered list of RIS state vectors, one per index-bit pattern.

    ``states`` is an ``(R, G)`` integer array of :class:`State` values;
    codeword ``r`` is selected by the index bits whose binary value is ``r``.
    """

    scheme: Scheme
    states: np.ndarray
    alpha: float
    index_bits: int

    def __post_init__(self):
        self.states.setflags(write=False)

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def num_groups(self) -> int:
        return self.states.shape[1]

    @property
    def gains(self) -> np.ndarray:
        """Amplitude each group applies to its aligned gain, shape ``(R, G)``."""
        g = np.zeros(self.states.shape)
        g[self.states == State.ACTIVE] = np.sqrt(self.alpha)
        g[self.states == State.PASSIVE] = 1.0
        return g

    @property
    def active_mask(self) -> np.ndarray:
        """Groups that amplify, and therefore inject amplifier noise."""
        return self.states == State.ACTIVE

    @property
    def inactive_mask(self) -> np.ndarray:
        return self.states == State.INACTIVE

    def codeword(self, index: int) -> StateCodeword:
        if not 0 <= index < len(self):
            raise IndexError(f"codeword index {index} out of range for {len(self)} codewords")
        states = tuple(State(s) for s in self.states[index])
        return StateCodeword(index, states, tuple(float(x) for x in self.gains[index]))

    def map_index_bits(self, bits) -> StateCodeword:
        bits = np.asarray(bits)
        if bits.shape != (self.index_bits,):
            raise ValueError(f"expected {self.index_bits} index bits, got shape {bits.shape}")
        return self.codeword(bits_to_int(bits) if self.index_bits else 0)

    def demap_codeword(self, index) -> np.ndarray:
        index = np.asarray(index)
        if np.any(index < 0) or np.any(index >= len(self)):
            raise IndexError("codeword index out of range")
        return int_to_bits(index, self.index_bits)

    def rows(self):
        """Yield ``(bits, index, state labels)`` for tabulation."""
        for r in range(len(self)):
            bits = "".join(str(b) for b in self.demap_codeword(r))
            yield bits, r, [State(s).label for s in self.states[r]]


def ota_codebook(G: int, alpha: float) -> Codebook:
    """Every group active (bit 1) or passive (bit 0); first group is the MSB."""
    if G < 1:
        raise ValueError("G must be >= 1")
    bits = int_to_bits(np.arange(2**G), G)
    states = np.where(bits == 1, State.ACTIVE, State.PASSIVE).astype(np.int8)
    return Codebook(Scheme.OTA, states, alpha, G)


def eota_codebook(G: int, alpha: float) -> Codebook:
    """Ternary active/passive/absorption vectors in base-3 order, truncated.

    Codeword ``r`` is ``r`` written in base 3 with the first group as the most
    significant trit and digits active=0, passive=1, absorption=2. Only the
    first ``2**floor(log2(3**G))`` are kept, which always drops the
    all-absorption vector.
    """
    if G < 1:
        raise ValueError("G must be >= 1")
    nbits = index_bits_for(Scheme.EOTA, G)
    r = np.arange(2**nbits, dtype=np.int64)
    powers = 3 ** np.arange(G - 1, -1, -1, dtype=np.int64)
    states = ((r[:, None] // powers) % 3).astype(np.int8)
    return Codebook(Scheme.EOTA, states, alpha, nbits)


def rgb_codebook(G: int, alpha: float, config: SystemConfig | None = None) -> Codebook:
    """One-hot group activation for the RGB-IM benchmark.

    Codeword ``k`` switches on group ``k``; groups beyond
    ``2**floor(log2 G)`` are never selected.
    """
    if G < 2:
        raise ValueError("the RGB benchmark needs G >= 2")
    amplified = True if config is None else config.rgb_active_amplified
    mode = InactiveMode.ZERO_PHASE if config is None else config.rgb_inactive_mode
    nbits = index_bits_for(Scheme.RGB, G)
    off = State.INACTIVE if mode is InactiveMode.ZERO_PHASE else State.ABSORPTION
    states = np.full((2**nbits, G), off, dtype=np.int8)
    states[np.arange(2**nbits), np.arange(2**nbits)] = State.ACTIVE if amplified else State.PASSIVE
    return Codebook(Scheme.RGB, states, alpha, nbits)


def codebook_for(config: SystemConfig) -> Codebook:
    if config.scheme is Scheme.OTA:
        return ota_codebook(config.num_groups, config.alpha)
    if config.scheme is Scheme.EOTA:
        return eota_codebook(config.num_groups, config.alpha)
    return rgb_codebook(config.num_groups, config.alpha, config)
