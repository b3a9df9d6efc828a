"""Scenario configuration and unit conversions.

Powers and gains are configured the way link budgets are usually quoted
(dB for ratios, dBm for absolute powers) and exposed in linear units through
read-only properties.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from dataclasses import dataclass, fields
from typing import Any

__all__ = [
    "Scheme",
    "ConstellationKind",
    "InactiveMode",
    "NoisePlacement",
    "SystemConfig",
    "ConfigError",
    "from_db",
    "to_db",
    "from_dbm",
    "to_dbm",
    "validate",
]


def from_db(value_db):
    """Convert decibels to a linear power ratio."""
    return 10.0 ** (value_db / 10.0)


def to_db(value):
    return 10.0 * math.log10(value)


def from_dbm(value_dbm):
    """Convert dBm to watts."""
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


def to_dbm(watts):
    return 10.0 * math.log10(watts) + 30.0


class Scheme(str, enum.Enum):
    OTA = "ota"
    EOTA = "eota"
    RGB = "rgb"


class ConstellationKind(str, enum.Enum):
    PSK = "psk"
    QAM = "qam"


class InactiveMode(str, enum.Enum):
    """What the non-selected groups of the benchmark do."""

    ZERO_PHASE = "zero_phase"  # reflect with theta = 1 (no phase alignment)
    ABSORB = "absorb"


class NoisePlacement(str, enum.Enum):
    """Where the amplifier noise of active groups enters the received sample.

    ``EQ6`` adds it next to the thermal noise, so the received SNR does not
    depend on the data symbol. ``EQ4`` keeps it inside the symbol product.
    """

    EQ6 = "eq6"
    EQ4 = "eq4"


class ConfigError(ValueError):
    """Raised when a configuration violates one or more invariants.

    ``errors`` holds one ``"field: reason"`` string per violation.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def _default_kind(M: int) -> ConstellationKind:
    return ConstellationKind.PSK if M <= 8 else ConstellationKind.QAM


@dataclass(frozen=True)
class SystemConfig:
    """All parameters of one simulated scenario.

    Defaults reproduce the common simulation setup: 20 m BS-RIS and 50 m
    RIS-UE distances, exponents 2.2 / 2.8, Rayleigh fading, -30 dB reference
    loss and -130 dBm noise powers.
    """

    scheme: Scheme = Scheme.OTA
    num_groups: int = 2
    elements_per_group: int = 128
    modulation_order: int = 4
    constellation_kind: ConstellationKind | None = None
    alpha_db: float = 30.0
    transmit_power_dbm: float = 0.0
    d_h: float = 20.0
    d_f: float = 50.0
    exponent_h: float = 2.2
    exponent_f: float = 2.8
    k_h: float = 0.0
    k_f: float = 0.0
    zeta0_db: float = -30.0
    n0_dbm: float = -130.0
    v0_dbm: float = -130.0
    rgb_inactive_mode: InactiveMode = InactiveMode.ZERO_PHASE
    rgb_active_amplified: bool = True
    noise_placement: NoisePlacement = NoisePlacement.EQ6

    def __post_init__(self):
        # Coerce enum-valued fields given as strings (e.g. from JSON).
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "rgb_inactive_mode", InactiveMode(self.rgb_inactive_mode))
        object.__setattr__(self, "noise_placement", NoisePlacement(self.noise_placement))
        kind = self.constellation_kind
        if kind is None:
            kind = _default_kind(self.modulation_order) if isinstance(self.modulation_order, int) else "psk"
        object.__setattr__(self, "constellation_kind", ConstellationKind(kind))

    # linear views
    @property
    def N(self) -> int:
        return self.num_groups * self.elements_per_group

    @property
    def alpha(self) -> float:
        return from_db(self.alpha_db)

    @property
    def transmit_power(self) -> float:
        return from_dbm(self.transmit_power_dbm)

    @property
    def zeta0(self) -> float:
        return from_db(self.zeta0_db)

    @property
    def n0(self) -> float:
        return from_dbm(self.n0_dbm)

    @property
    def v0(self) -> float:
        return from_dbm(self.v0_dbm)

    @property
    def bits_per_symbol(self) -> int:
        return self.modulation_order.bit_length() - 1

    def replace(self, **changes) -> SystemConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = value.value if isinstance(value, enum.Enum) else value
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SystemConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError([f"{k}: unknown field" for k in unknown])
        try:
            return cls(**data)
        except ValueError as exc:
            raise ConfigError([str(exc)]) from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> SystemConfig:
        return cls.from_dict(json.loads(text))


def _is_power_of_two(n) -> bool:
    return isinstance(n, int) and not isinstance(n, bool) and n >= 1 and n & (n - 1) == 0


def _finite(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def validate(config: SystemConfig) -> SystemConfig:
    """Check every invariant of ``config`` and return it unchanged.

    Raises
    ------
    ConfigError
        Listing every violated invariant, not only the first one.
    """
    errors = []
    M = config.modulation_order
    if not _is_power_of_two(M) or M < 2:
        errors.append(f"modulation_order: M={M!r} is not a power of two >= 2")
    elif config.constellation_kind is ConstellationKind.QAM:
        k = M.bit_length() - 1
        if k % 2:
            errors.append(f"modulation_order: M={M} is not a square QAM order")

    G = config.num_groups
    if not isinstance(G, int) or isinstance(G, bool) or G < 1:
        errors.append(f"num_groups: G={G!r} must be a positive integer")
    elif config.scheme is Scheme.RGB and G < 2:
        errors.append(f"num_groups: G={G} < 2 for the RGB benchmark (no index bits)")

    nbar = config.elements_per_group
    if not isinstance(nbar, int) or isinstance(nbar, bool) or nbar < 1:
        errors.append(f"elements_per_group: {nbar!r} must be a positive integer")

    for name in ("alpha_db", "transmit_power_dbm", "zeta0_db", "exponent_h", "exponent_f"):
        if not _finite(getattr(config, name)):
            errors.append(f"{name}: {getattr(config, name)!r} is not a finite number")
    # -inf dBm is accepted as an exactly-zero noise power (noiseless runs).
    for name in ("n0_dbm", "v0_dbm"):
        value = getattr(config, name)
        if not (_finite(value) or value == -math.inf):
            errors.append(f"{name}: {value!r} is not a finite power or -inf")
    if _finite(config.alpha_db) and config.alpha_db < 0:
        errors.append(f"alpha_db: {config.alpha_db} dB is an attenuation (alpha must be >= 1)")
    for name in ("d_h", "d_f"):
        d = getattr(config, name)
        if not _finite(d) or d < 1.0:
            errors.append(f"{name}: {d!r} m is below the 1 m reference distance")
    for name in ("k_h", "k_f"):
        k = getattr(config, name)
        if not _finite(k) or k < 0:
            errors.append(f"{name}: Rician K={k!r} must be >= 0")

    if errors:
        raise ConfigError(errors)
    return config
