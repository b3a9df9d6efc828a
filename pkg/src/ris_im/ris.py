"""RIS group model: phase alignment, coherent group gains, amplifier noise."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, complex_normal

__all__ = ["GroupGains", "align_phases", "group_gains", "amplifier_noise", "amplifier_noise_all"]


@dataclass(frozen=True, eq=False)
class GroupGains:
    """Per-group quantities the link and detector need, shape ``(..., G)``.

    Attributes
    ----------
    H : real array
        Coherent cascaded gain ``sum_i |h_gi| |f_gi|`` of each group after
        phase alignment.
    f_energy : real array
        ``sum_i |f_gi|**2``, which sets the amplifier-noise power of a group.
    unaligned : complex array
        ``sum_i h_gi f_gi``, the contribution of a group left at zero phase
        shift (benchmark inactive groups).
    """

    H: np.ndarray
    f_energy: np.ndarray
    unaligned: np.ndarray


def align_phases(real: ChannelRealization) -> np.ndarray:
    """Reflection coefficients cancelling the cascaded phase of every element.

    Elements with a zero-magnitude channel get ``theta = 1``.
    """
    return np.exp(-1j * (np.angle(real.h) + np.angle(real.f)))


def group_gains(real: ChannelRealization) -> GroupGains:
    H = np.sum(np.abs(real.h) * np.abs(real.f), axis=-1)
    f_energy = np.sum(np.abs(real.f) ** 2, axis=-1)
    unaligned = np.sum(real.h * real.f, axis=-1)
    return GroupGains(H, f_energy, unaligned)


def amplifier_noise(g: int, real: ChannelRealization, theta: np.ndarray, alpha: float, v0: float,
                    rng: np.random.Generator):
    """Amplifier noise seen at the UE from group ``g`` (0-based).

    Each element adds CN(0, v0) noise before amplification by ``sqrt(alpha)``
    and reflection, so conditioned on the channel the result is
    CN(0, alpha * v0 * sum_i |f_gi|**2).
    """
    f_g = real.f[..., g, :]
    v = complex_normal(rng, f_g.shape, v0)
    return np.sqrt(alpha) * np.sum(theta[..., g, :] * f_g * v, axis=-1)


def amplifier_noise_all(real: ChannelRealization, theta: np.ndarray, alpha: float, v0: float,
                        rng: np.random.Generator, groups=None, batch: tuple = ()) -> np.ndarray:
    """Amplifier noise of several groups at once, shape ``batch + (..., G)``.

    Only the groups flagged in the boolean ``groups`` mask (default: all) are
    drawn; the others are returned as zero. A non-empty ``batch`` draws that
    many independent noise vectors over the (broadcast) channel. Callers
    still gate the result with their per-trial active-state mask.
    """
    G = real.f.shape[-2]
    groups = np.ones(G, dtype=bool) if groups is None else np.asarray(groups, dtype=bool)
    shape = np.broadcast_shapes(tuple(batch) + real.f.shape[-2:], real.f.shape)
    out = np.zeros(shape[:-1], dtype=complex)
    if groups.any():
        weights = (theta * real.f)[..., groups, :]
        v = complex_normal(rng, shape[:-2] + weights.shape[-2:], v0)
        out[..., groups] = np.sqrt(alpha) * np.einsum("...gi,...gi->...g", v, weights)
    return out
