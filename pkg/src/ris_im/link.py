"""Received-sample synthesis and analytic SNR for a given RIS state vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, complex_normal
from .codec import Codebook, State, StateCodeword
from .params import NoisePlacement, SystemConfig
from .ris import GroupGains, align_phases, amplifier_noise_all

__all__ = ["RxSample", "state_amplitudes", "effective_gain", "effective_gains", "transmit", "analytic_snr"]


@dataclass(frozen=True, eq=False)
class RxSample:
    y: np.ndarray
    signal_part: np.ndarray


def _states(s) -> np.ndarray:
    if isinstance(s, StateCodeword):
        return np.asarray(s.states, dtype=np.int8)
    return np.asarray(s, dtype=np.int8)


def state_amplitudes(states, alpha: float) -> np.ndarray:
    """Amplitude applied to each group's aligned gain: sqrt(alpha), 1 or 0."""
    states = _states(states)
    return np.where(states == State.ACTIVE, np.sqrt(alpha), np.where(states == State.PASSIVE, 1.0, 0.0))


def effective_gain(gains: GroupGains, s, alpha: float):
    """Noise-free cascaded gain ``sum_g H_g s_g`` for one state vector.

    Groups in the benchmark's inactive state add their unaligned sum
    ``sum_i h_gi f_gi`` instead; absorbing groups add nothing.
    """
    states = _states(s)
    amp = state_amplitudes(states, alpha)
    total = np.sum(gains.H * amp, axis=-1)
    inactive = states == State.INACTIVE
    if np.any(inactive):
        total = total + np.sum(np.where(inactive, gains.unaligned, 0.0), axis=-1)
    return total


def effective_gains(gains: GroupGains, codebook: Codebook) -> np.ndarray:
    """Effective gain of every codeword, shape ``(..., R)``.

    Real-valued unless the codebook has inactive (zero-phase) groups.
    """
    out = gains.H @ codebook.gains.T
    inactive = codebook.inactive_mask
    if inactive.any():
        out = out + gains.unaligned @ inactive.T.astype(float)
    return out


def transmit(x, s, real: ChannelRealization, gains: GroupGains, config: SystemConfig,
             rng: np.random.Generator, theta: np.ndarray | None = None) -> RxSample:
    """Synthesize the received sample(s) for symbol(s) ``x`` and states ``s``.

    ``x``, the leading axes of ``real`` and the leading axes of ``s`` (a
    :class:`StateCodeword` or a ``(..., G)`` state array) broadcast against
    each other; every element of the broadcast shape is an independent noise
    draw. Passing one realization with a vector ``x`` therefore gives many
    noisy observations over a fixed channel.

    Amplifier noise is drawn only for groups active in at least one trial.
    """
    states = _states(s)
    x = np.asarray(x)
    G = real.f.shape[-2]
    batch = np.broadcast_shapes(x.shape, real.f.shape[:-2], states.shape[:-1])
    sqrt_pt = np.sqrt(config.transmit_power)
    gain = effective_gain(gains, states, config.alpha)
    signal = np.broadcast_to(sqrt_pt * x * gain, batch)

    if theta is None:
        theta = align_phases(real)
    active = np.broadcast_to(states == State.ACTIVE, batch + (G,))
    needed = active.reshape(-1, G).any(axis=0)
    wa = amplifier_noise_all(real, theta, config.alpha, config.v0, rng, groups=needed, batch=batch)
    amp_noise = np.sum(np.where(active, wa, 0.0), axis=-1)
    w = complex_normal(rng, batch, config.n0)

    if config.noise_placement is NoisePlacement.EQ4:
        y = sqrt_pt * x * (gain + amp_noise) + w
    else:
        y = signal + amp_noise + w
    return RxSample(y, signal)


def analytic_snr(gains: GroupGains, s, config: SystemConfig):
    """Received SNR: signal power over amplifier-plus-thermal noise power."""
    states = _states(s)
    gain = effective_gain(gains, states, config.alpha)
    active = states == State.ACTIVE
    amp_power = config.alpha * config.v0 * np.sum(np.where(active, gains.f_energy, 0.0), axis=-1)
    return config.transmit_power * np.abs(gain) ** 2 / (amp_power + config.n0)
