"""Path loss and Rician fading for the BS-RIS and RIS-UE hops."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .params import SystemConfig

__all__ = ["ChannelRealization", "path_loss", "complex_normal", "sample_rician", "realize", "to_csv"]


def path_loss(zeta0: float, d: float, exponent: float) -> float:
    """Large-scale gain ``zeta0 * d**(-exponent)`` with a 1 m reference distance."""
    if d < 1.0:
        raise ValueError(f"distance {d} m is below the 1 m reference distance")
    if zeta0 <= 0:
        raise ValueError("reference path loss must be positive")
    return zeta0 * d ** (-exponent)


def complex_normal(rng: np.random.Generator, size=None, variance: float = 1.0):
    """Circularly-symmetric complex Gaussian samples, CN(0, variance)."""
    shape = () if size is None else tuple(np.atleast_1d(size))
    z = rng.standard_normal(shape + (2,)).view(np.complex128)[..., 0]
    z *= np.sqrt(variance / 2.0)
    return z[()] if size is None else z


def sample_rician(K: float, rng: np.random.Generator, size=None):
    """Unit-power Rician coefficient(s) with K-factor ``K``.

    Both the LoS and the NLoS component are drawn as independent CN(0, 1)
    variables, so the result is CN(0, 1) for every K; K only changes the
    mixing weights.
    """
    if K < 0:
        raise ValueError("Rician K-factor must be non-negative")
    los = complex_normal(rng, size)
    nlos = complex_normal(rng, size)
    return np.sqrt(K / (K + 1.0)) * los + np.sqrt(1.0 / (K + 1.0)) * nlos


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Cascaded channel for one coherence block.

    ``h`` and ``f`` have shape ``(..., G, Nbar)``; any leading axes index
    independent trials.
    """

    h: np.ndarray
    f: np.ndarray
    L_h: float
    L_f: float

    @property
    def num_groups(self) -> int:
        return self.h.shape[-2]

    @property
    def elements_per_group(self) -> int:
        return self.h.shape[-1]


def realize(config: SystemConfig, rng: np.random.Generator, trials: int | None = None) -> ChannelRealization:
    """Draw one channel realization (or ``trials`` of them stacked on axis 0)."""
    shape = (config.num_groups, config.elements_per_group)
    if trials is not None:
        shape = (trials,) + shape
    L_h = path_loss(config.zeta0, config.d_h, config.exponent_h)
    L_f = path_loss(config.zeta0, config.d_f, config.exponent_f)
    h = np.sqrt(L_h) * sample_rician(config.k_h, rng, shape)
    f = np.sqrt(L_f) * sample_rician(config.k_f, rng, shape)
    return ChannelRealization(h, f, L_h, L_f)


def to_csv(real: ChannelRealization) -> str:
    """Dump a single realization as ``g,i,re_h,im_h,re_f,im_f`` rows (1-based g, i)."""
    if real.h.ndim != 2:
        raise ValueError("to_csv expects a single (G, Nbar) realization")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["g", "i", "re_h", "im_h", "re_f", "im_f"])
    G, nbar = real.h.shape
    for g in range(G):
        for i in range(nbar):
            h, f = real.h[g, i], real.f[g, i]
            writer.writerow([g + 1, i + 1, *(repr(float(v)) for v in (h.real, h.imag, f.real, f.imag))])
    return buf.getvalue()
