"""Monte Carlo BER estimation, sweeps and figure presets.

Trials are simulated in fixed-size chunks. Chunk ``c`` of a point seeded
with ``s`` always draws from the stream ``SeedSequence(s, spawn_key=(c,))``
and chunks are consumed in order, so results do not depend on how many
worker processes computed them.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .channel import realize
from .codec import codebook_for, spectral_efficiency
from .constellation import bits_to_int, build
from .detector import ml_detect_batch, popcount
from .link import effective_gains, transmit
from .params import ConfigError, Scheme, SystemConfig, validate
from .ris import align_phases, group_gains

__all__ = [
    "StoppingRule",
    "BerResult",
    "SweepSpec",
    "Experiment",
    "CSV_COLUMNS",
    "derive_seed",
    "simulate_chunk",
    "run_point",
    "run_sweep",
    "run_experiment",
    "figure_preset",
    "PRESETS",
    "rate_table",
    "results_to_csv",
    "rate_table_to_csv",
]

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("scheme", "M", "G", "N", "alpha_db", "pt_dbm", "trials", "bit_errors", "ber",
               "ci_halfwidth", "seed")
SWEEP_VARIABLES = ("pt_dbm", "alpha_db", "elements_per_group", "num_groups")
DEFAULT_CHUNK = 4096


@dataclass(frozen=True)
class StoppingRule:
    min_errors: int = 200
    max_trials: int = 10_000_000

    def __post_init__(self):
        if self.min_errors < 1 or self.max_trials < 1:
            raise ValueError("min_errors and max_trials must be positive")


@dataclass(frozen=True)
class BerResult:
    scheme: str
    M: int
    G: int
    N: int
    alpha_db: float
    pt_dbm: float
    trials: int
    bit_errors: int
    symbol_bit_errors: int
    index_bit_errors: int
    ber: float
    ci_halfwidth: float
    seed: int
    eta: int
    wall_time: float = field(default=0.0, compare=False)

    def summary(self) -> str:
        return (f"{self.scheme:>4} M={self.M} G={self.G} N={self.N} alpha={self.alpha_db:g} dB "
                f"Pt={self.pt_dbm:g} dBm  BER={self.ber:.3e} +- {self.ci_halfwidth:.1e} "
                f"({self.bit_errors} errors / {self.trials} trials)")


def derive_seed(seed: int, *key: int) -> int:
    """Deterministic 64-bit child seed of ``seed`` for the given key path."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(key))
    return int(ss.generate_state(1, np.uint64)[0])


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def simulate_chunk(config: SystemConfig, seed: int, chunk: int, trials: int) -> tuple[np.ndarray, np.ndarray]:
    """Run ``trials`` independent transmissions.

    Returns per-trial symbol-bit and index-bit error counts.
    """
    rng = _chunk_rng(seed, chunk)
    const = build(config.modulation_order, config.constellation_kind)
    codebook = codebook_for(config)
    k, ib = const.bits_per_symbol, codebook.index_bits

    bits = rng.integers(0, 2, size=(trials, k + ib), dtype=np.int64)
    sym = const.index_of_bits(bits[:, :k])
    rho = bits_to_int(bits[:, k:])

    real = realize(config, rng, trials)
    theta = align_phases(real)
    gains = group_gains(real)
    rx = transmit(const.points[sym], codebook.states[rho], real, gains, config, rng, theta)

    eff = effective_gains(gains, codebook)
    rho_hat, sym_hat = ml_detect_batch(rx.y, eff, const.points, np.sqrt(config.transmit_power))
    sym_err = popcount(const.labels[sym] ^ const.labels[sym_hat])
    idx_err = popcount(rho ^ rho_hat)
    return sym_err, idx_err


def _chunk_sizes(max_trials: int, chunk_size: int):
    done = 0
    while done < max_trials:
        n = min(chunk_size, max_trials - done)
        yield n
        done += n


def _iter_chunks(config, seed, stopping, chunk_size, executor, workers):
    gen = _chunk_sizes(stopping.max_trials, chunk_size)
    if executor is None or workers <= 1:
        for c, n in enumerate(gen):
            yield simulate_chunk(config, seed, c, n)
        return
    c = 0
    while True:
        wave = []
        for _ in range(workers):
            n = next(gen, None)
            if n is None:
                break
            wave.append(executor.submit(simulate_chunk, config, seed, c, n))
            c += 1
        if not wave:
            return
        try:
            for fut in wave:
                yield fut.result()
        finally:
            for fut in wave:
                fut.cancel()


def run_point(config: SystemConfig, pt_dbm: float | None = None, seed: int = 0,
              stopping: StoppingRule = StoppingRule(), *, workers: int = 1,
              executor: Executor | None = None, chunk_size: int = DEFAULT_CHUNK) -> BerResult:
    """Estimate the BER of one configuration at one transmit power.

    Trials stop at the first trial count where at least ``min_errors`` bit
    errors have been seen and at least ``10 * min_errors / eta`` trials have
    run, or at ``max_trials``. The result is identical for any ``workers``.
    """
    if pt_dbm is not None:
        config = config.replace(transmit_power_dbm=pt_dbm)
    validate(config)
    eta = spectral_efficiency(config.scheme, config.modulation_order, config.num_groups)
    min_trials = math.ceil(10 * stopping.min_errors / eta)

    own_pool = None
    if executor is None and workers > 1:
        executor = own_pool = ProcessPoolExecutor(max_workers=workers)
    t0 = time.perf_counter()
    trials = sym_total = idx_total = 0
    try:
        for sym_err, idx_err in _iter_chunks(config, seed, stopping, chunk_size, executor, workers):
            total = np.cumsum(sym_err + idx_err) + (sym_total + idx_total)
            count = trials + np.arange(1, sym_err.size + 1)
            hit = np.flatnonzero((total >= stopping.min_errors) & (count >= min_trials))
            take = int(hit[0]) + 1 if hit.size else sym_err.size
            trials += take
            sym_total += int(sym_err[:take].sum())
            idx_total += int(idx_err[:take].sum())
            if hit.size:
                break
    finally:
        if own_pool is not None:
            own_pool.shutdown(cancel_futures=True)

    bit_errors = sym_total + idx_total
    nbits = trials * eta
    ber = bit_errors / nbits
    ci = 1.96 * math.sqrt(ber * (1 - ber) / nbits)
    return BerResult(
        scheme=config.scheme.value, M=config.modulation_order, G=config.num_groups, N=config.N,
        alpha_db=float(config.alpha_db), pt_dbm=float(config.transmit_power_dbm), trials=trials,
        bit_errors=bit_errors, symbol_bit_errors=sym_total, index_bit_errors=idx_total,
        ber=ber, ci_halfwidth=ci, seed=seed, eta=eta, wall_time=time.perf_counter() - t0,
    )


@dataclass(frozen=True)
class SweepSpec:
    """One curve: a base configuration swept over one variable."""

    config: SystemConfig
    variable: str
    values: tuple
    stopping: StoppingRule = StoppingRule()

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"sweep variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}")
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ValueError("sweep grid is empty")

    def point_config(self, value) -> SystemConfig:
        name = "transmit_power_dbm" if self.variable == "pt_dbm" else self.variable
        return self.config.replace(**{name: value})

    def to_dict(self) -> dict:
        return {"config": self.config.to_dict(), "variable": self.variable,
                "values": list(self.values), "stopping": asdict(self.stopping)}

    @classmethod
    def from_dict(cls, data: dict) -> SweepSpec:
        try:
            config = SystemConfig.from_dict(data["config"])
            stopping = StoppingRule(**data.get("stopping", {}))
            return cls(config, data["variable"], data["values"], stopping)
        except (KeyError, TypeError) as exc:
            raise ConfigError([f"sweep: malformed entry ({exc})"]) from exc


def run_sweep(spec: SweepSpec, seed: int = 0, *, workers: int = 1, executor: Executor | None = None,
              chunk_size: int = DEFAULT_CHUNK, progress=None) -> list[BerResult]:
    """Run every grid point of ``spec``; point ``i`` uses ``derive_seed(seed, i)``."""
    own_pool = None
    if executor is None and workers > 1:
        executor = own_pool = ProcessPoolExecutor(max_workers=workers)
    results = []
    try:
        for i, value in enumerate(spec.values):
            config = spec.point_config(value)
            try:
                res = run_point(config, None, derive_seed(seed, i), spec.stopping, workers=workers,
                                executor=executor, chunk_size=chunk_size)
            except ConfigError as exc:
                raise ConfigError([f"grid point {i} ({spec.variable}={value!r}): {e}" for e in exc.errors]) from exc
            results.append(res)
            logger.info(res.summary())
            if progress is not None:
                progress(res)
    finally:
        if own_pool is not None:
            own_pool.shutdown(cancel_futures=True)
    return results


@dataclass(frozen=True)
class Experiment:
    """A named set of curves (``kind="ber"``) or a rate table request."""

    name: str
    kind: str = "ber"
    curves: tuple[SweepSpec, ...] = ()
    seed: int = 0
    modulation_order: int = 2
    groups: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        if self.kind == "rate-table":
            return {"name": self.name, "kind": self.kind, "modulation_order": self.modulation_order,
                    "groups": list(self.groups)}
        return {"name": self.name, "kind": self.kind, "seed": self.seed,
                "curves": [c.to_dict() for c in self.curves]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> Experiment:
        kind = data.get("kind", "ber")
        name = data.get("name", "experiment")
        if kind == "rate-table":
            return cls(name, kind, modulation_order=int(data.get("modulation_order", 2)),
                       groups=tuple(data.get("groups", range(1, 11))))
        if kind != "ber":
            raise ConfigError([f"kind: unknown experiment kind {kind!r}"])
        curves = data.get("curves")
        if not curves:
            raise ConfigError(["curves: experiment has no curves"])
        specs = []
        errors = []
        for j, c in enumerate(curves):
            try:
                spec = SweepSpec.from_dict(c)
                for v in spec.values:
                    validate(spec.point_config(v))
                specs.append(spec)
            except ConfigError as exc:
                errors.extend(f"curves[{j}].{e}" for e in exc.errors)
            except ValueError as exc:
                errors.append(f"curves[{j}]: {exc}")
        if errors:
            raise ConfigError(errors)
        return cls(name, kind, tuple(specs), int(data.get("seed", 0)))


def run_experiment(exp: Experiment, seed: int | None = None, *, workers: int = 1,
                   chunk_size: int = DEFAULT_CHUNK, progress=None) -> list[BerResult]:
    seed = exp.seed if seed is None else seed
    results = []
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for spec in exp.curves:
            results.extend(run_sweep(spec, seed, workers=workers, executor=executor,
                                     chunk_size=chunk_size, progress=progress))
    finally:
        if executor is not None:
            executor.shutdown(cancel_futures=True)
    return results


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def results_to_csv(results) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in results:
        writer.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def rate_table(M: int = 2, groups=range(1, 11)) -> list[dict]:
    """Spectral efficiency of every scheme for each G."""
    return [{"G": G, **{s.value: spectral_efficiency(s, M, G) for s in Scheme}} for G in groups]


def rate_table_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["G", "ota", "eota", "rgb"])
    for row in rows:
        writer.writerow([row["G"], row["ota"], row["eota"], row["rgb"]])
    return buf.getvalue()


# Transmit-power grid (dBm): BER from ~0.4 down to ~1e-4 at the default
# link budget.
_PT_GRID = tuple(float(p) for p in range(-60, 1, 5))

# (scheme, M, G) triples equalizing the rate: 4 bpcu with G=2, 5 bpcu with M=2.
_RATE4 = ((Scheme.OTA, 4, 2), (Scheme.EOTA, 2, 2), (Scheme.RGB, 8, 2))
_RATE5 = ((Scheme.OTA, 2, 4), (Scheme.EOTA, 2, 3), (Scheme.RGB, 2, 16))


def _fig3() -> Experiment:
    curves = []
    for scheme, M, G in _RATE4:
        for alpha_db in (10.0, 20.0, 30.0):
            cfg = SystemConfig(scheme=scheme, num_groups=G, elements_per_group=256 // G,
                               modulation_order=M, alpha_db=alpha_db)
            curves.append(SweepSpec(cfg, "pt_dbm", _PT_GRID))
    return Experiment("fig3", "ber", tuple(curves), seed=42)


def _fig4() -> Experiment:
    curves = []
    for scheme, M, G in _RATE4:
        for N in (64, 128, 256, 512):
            cfg = SystemConfig(scheme=scheme, num_groups=G, elements_per_group=N // G,
                               modulation_order=M, alpha_db=30.0)
            curves.append(SweepSpec(cfg, "pt_dbm", _PT_GRID))
    return Experiment("fig4", "ber", tuple(curves), seed=42)


def _fig5() -> Experiment:
    curves = []
    for scheme, M, G in _RATE5:
        cfg = SystemConfig(scheme=scheme, num_groups=G, elements_per_group=480 // G,
                           modulation_order=M, alpha_db=30.0)
        curves.append(SweepSpec(cfg, "pt_dbm", _PT_GRID))
    return Experiment("fig5", "ber", tuple(curves), seed=42)


def _fig6() -> Experiment:
    return Experiment("fig6", "rate-table", modulation_order=2, groups=tuple(range(1, 11)))


PRESETS = {"fig3": _fig3, "fig4": _fig4, "fig5": _fig5, "fig6": _fig6}


def figure_preset(name: str) -> Experiment:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; valid names: {', '.join(PRESETS)}") from None
