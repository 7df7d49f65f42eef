"""Instance generation, configuration presets, and canonical serialization.

Generation follows the simulation recipe: SBSs on a uniform grid over a
square region, users uniform at random, distance power-law gains, file
sizes uniform (on a 0.1 MB grid so the knapsack DP stays exact) and
per-file SINR thresholds uniform in a configured range. Config values use
field units (dBm, MB, kHz); instances store linear-scale SI.

The instance file format is sectioned UTF-8 text with units in key names,
matrices as row-major blocks with declared dimensions, fixed field order,
and 17-significant-digit floats, so equal instances serialize to
byte-identical files and round-trip exactly.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, fields, replace
from typing import List, Optional, TextIO, Tuple, Union

import numpy as np

from .model import DemandMatrix, ModelError, Scenario
from .popularity import (
    DEFAULT_VARIANCE_RANGE,
    PreferenceMatrix,
    local_popularity,
    sample_demands,
    sample_preferences,
)

SIZE_GRID_BYTES = 100_000.0   # 0.1 MB; matches the knapsack DP default grid
MB = 1_000_000.0
FORMAT_HEADER = "dscnopt-instance v1"


class ConfigError(ModelError):
    """Raised with the full list of config violations."""


class ParseError(ValueError):
    """Raised on malformed instance files, naming the offending field."""


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class GenerationConfig:
    """Knobs for random instance generation; defaults follow the full-size preset."""

    sbs_count: int = 25
    user_count: int = 150
    file_count: int = 600
    region_size_m: float = 250.0
    max_power_dbm: float = 23.0
    bandwidth_khz: float = 200.0
    noise_density_dbm_hz: float = -174.0
    file_size_range_mb: Tuple[float, float] = (0.5, 50.0)
    sinr_threshold_range: Tuple[float, float] = (1.5, 5.0)
    cache_fraction: float = 0.1          # of total catalog bytes, per SBS
    backhaul_mean_range_s: Tuple[float, float] = (0.5, 2.0)
    alpha: float = 0.5
    pathloss_exponent: float = 3.0
    central_zone_radius_m: float = 25.0
    min_user_sbs_distance_m: float = 1.0
    user_cluster_radius_m: Optional[float] = None  # None: uniform over the region
    preference_variance_range: Tuple[float, float] = DEFAULT_VARIANCE_RANGE

    def validate(self) -> None:
        problems: List[str] = []
        if self.sbs_count < 1:
            problems.append("sbs_count must be positive")
        if self.user_count < 1:
            problems.append("user_count must be positive")
        if self.file_count < 1:
            problems.append("file_count must be positive")
        if self.region_size_m <= 0:
            problems.append("region_size_m must be positive")
        if self.bandwidth_khz <= 0:
            problems.append("bandwidth_khz must be positive")
        if not 2.0 <= self.pathloss_exponent <= 5.0:
            problems.append("pathloss_exponent must lie in [2, 5]")
        if not 0.0 <= self.alpha <= 1.0:
            problems.append("alpha must lie in [0, 1]")
        lo, hi = self.file_size_range_mb
        if lo <= 0 or hi < lo:
            problems.append("file_size_range_mb must be positive and ordered")
        lo, hi = self.sinr_threshold_range
        if lo <= 0 or hi < lo:
            problems.append("sinr_threshold_range must be positive and ordered")
        if not 0.0 <= self.cache_fraction <= 1.0:
            problems.append("cache_fraction must lie in [0, 1]")
        lo, hi = self.backhaul_mean_range_s
        if lo < 0 or hi < lo:
            problems.append("backhaul_mean_range_s must be nonnegative and ordered")
        if self.min_user_sbs_distance_m <= 0:
            problems.append("min_user_sbs_distance_m must be positive")
        if self.central_zone_radius_m <= 0:
            problems.append("central_zone_radius_m must be positive")
        if problems:
            raise ConfigError("; ".join(problems))


def paper_scale() -> GenerationConfig:
    """The published simulation setting."""
    return GenerationConfig()


def desk_scale(**overrides) -> GenerationConfig:
    """Tiny preset whose 3^6 association space is exhaustively enumerable.

    Users are clustered near SBSs so that nearly every seeded instance
    admits a jointly feasible power allocation.
    """
    base = GenerationConfig(
        sbs_count=3,
        user_count=6,
        file_count=8,
        region_size_m=220.0,
        cache_fraction=0.4,
        max_power_dbm=26.0,
        noise_density_dbm_hz=-92.0,
        sinr_threshold_range=(0.5, 2.0),
        central_zone_radius_m=45.0,
        min_user_sbs_distance_m=8.0,
        user_cluster_radius_m=28.0,
        preference_variance_range=(1.0, 3.0**2),
    )
    return replace(base, **overrides)


def sbs_grid(count: int, region: float) -> np.ndarray:
    """Uniform grid positions: each SBS at the center of its cell."""
    cols = int(np.ceil(np.sqrt(count)))
    rows = int(np.ceil(count / cols))
    xs = (np.arange(cols) + 0.5) * region / cols
    ys = (np.arange(rows) + 0.5) * region / rows
    grid = [(x, y) for y in ys for x in xs]
    return np.array(grid[:count])


@dataclass(frozen=True)
class Instance:
    """A scenario together with its sampled preferences and demands."""

    scenario: Scenario
    preferences: PreferenceMatrix
    demands: DemandMatrix


def generate(config: GenerationConfig, seed: int) -> Instance:
    """Deterministically generate a full instance from a config and seed."""
    config.validate()
    rng = np.random.default_rng(seed)
    B, U, F = config.sbs_count, config.user_count, config.file_count
    region = config.region_size_m

    sbs_pos = sbs_grid(B, region)
    users = np.empty((U, 2))
    for i in range(U):
        for _ in range(10_000):
            if config.user_cluster_radius_m is None:
                cand = rng.uniform(0.0, region, size=2)
            else:
                center = sbs_pos[rng.integers(B)]
                offset = rng.uniform(-config.user_cluster_radius_m,
                                     config.user_cluster_radius_m, size=2)
                cand = np.clip(center + offset, 0.0, region)
            dmin = np.linalg.norm(sbs_pos - cand, axis=1).min()
            if dmin >= config.min_user_sbs_distance_m:
                users[i] = cand
                break
        else:
            raise ConfigError("could not place a user outside the exclusion radius")

    dist = np.linalg.norm(users[:, None, :] - sbs_pos[None, :, :], axis=2)
    gains = dist ** (-config.pathloss_exponent)

    lo, hi = config.file_size_range_mb
    cells = rng.integers(
        int(round(lo * MB / SIZE_GRID_BYTES)),
        int(round(hi * MB / SIZE_GRID_BYTES)) + 1,
        size=F,
    )
    sizes = cells.astype(float) * SIZE_GRID_BYTES
    thresholds = rng.uniform(*config.sinr_threshold_range, size=F)
    backhaul = rng.uniform(*config.backhaul_mean_range_s, size=B)
    bandwidth = config.bandwidth_khz * 1e3
    noise = dbm_to_watts(config.noise_density_dbm_hz) * bandwidth
    capacity = np.full(B, config.cache_fraction * sizes.sum())

    scenario = Scenario(
        sbs_count=B,
        user_count=U,
        file_count=F,
        max_power=np.full(B, dbm_to_watts(config.max_power_dbm)),
        cache_capacity=capacity,
        backhaul_mean=backhaul,
        file_sizes=sizes,
        sinr_thresholds=thresholds,
        bandwidth=bandwidth,
        noise_power=noise,
        pathloss_exponent=config.pathloss_exponent,
        channel_gains=gains,
        alpha=config.alpha,
        load_coefficients=np.full(B, 1.0 / B),
        central_zone_radius=config.central_zone_radius_m,
        sbs_positions=sbs_pos,
        user_positions=users,
    )
    prefs = sample_preferences(
        scenario, seed, variance_range=config.preference_variance_range
    )
    popularity = local_popularity(scenario, prefs)
    demands = sample_demands(scenario, popularity, prefs, seed)
    return Instance(scenario, prefs, demands)


# --- serialization ---------------------------------------------------------

_SCALARS = [
    ("sbs_count", int),
    ("user_count", int),
    ("file_count", int),
    ("bandwidth_hz", float),
    ("noise_power_w", float),
    ("pathloss_exponent", float),
    ("alpha", float),
    ("central_zone_radius_m", float),
]
_BLOCKS = [
    # (name, kind, rows attr, cols attr or None for vectors)
    ("sbs_positions_m", "float", "B", 2),
    ("user_positions_m", "float", "U", 2),
    ("max_power_w", "float", "B", None),
    ("cache_capacity_bytes", "float", "B", None),
    ("backhaul_mean_s", "float", "B", None),
    ("load_coefficients", "float", "B", None),
    ("file_sizes_bytes", "float", "F", None),
    ("sinr_thresholds", "float", "F", None),
    ("preference_rho", "float", "U", "F"),
    ("demand_theta", "int", "U", "F"),
]


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _write(instance: Instance, out: TextIO) -> None:
    sc = instance.scenario
    scalars = {
        "sbs_count": sc.sbs_count,
        "user_count": sc.user_count,
        "file_count": sc.file_count,
        "bandwidth_hz": sc.bandwidth,
        "noise_power_w": sc.noise_power,
        "pathloss_exponent": sc.pathloss_exponent,
        "alpha": sc.alpha,
        "central_zone_radius_m": sc.central_zone_radius,
    }
    blocks = {
        "sbs_positions_m": sc.sbs_positions,
        "user_positions_m": sc.user_positions,
        "max_power_w": sc.max_power,
        "cache_capacity_bytes": sc.cache_capacity,
        "backhaul_mean_s": sc.backhaul_mean,
        "load_coefficients": sc.load_coefficients,
        "file_sizes_bytes": sc.file_sizes,
        "sinr_thresholds": sc.sinr_thresholds,
        "preference_rho": instance.preferences.rho,
        "demand_theta": instance.demands.theta,
    }
    if sc.sbs_positions is None or sc.user_positions is None:
        raise ModelError("only instances with positions can be serialized")
    out.write(FORMAT_HEADER + "\n[scenario]\n")
    for name, kind in _SCALARS:
        value = scalars[name]
        out.write(f"{name} = {value if kind is int else _fmt(value)}\n")
    for name, kind, _, _cols in _BLOCKS:
        data = np.asarray(blocks[name])
        if data.ndim == 1:
            data = data[:, None]
        out.write(f"[matrix {name} {data.shape[0]} {data.shape[1]}]\n")
        for row in data:
            if kind == "int":
                out.write(" ".join(str(int(v)) for v in row) + "\n")
            else:
                out.write(" ".join(_fmt(v) for v in row) + "\n")


def save(instance: Instance, path: str) -> None:
    buf = io.StringIO()
    _write(instance, buf)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())


def dumps(instance: Instance) -> str:
    buf = io.StringIO()
    _write(instance, buf)
    return buf.getvalue()


def _parse_blocks(lines: List[str]):
    scalars = {}
    matrices = {}
    i = 0
    if not lines or lines[0].strip() != FORMAT_HEADER:
        raise ParseError("missing or unknown format header")
    i = 1
    if i >= len(lines) or lines[i].strip() != "[scenario]":
        raise ParseError("missing [scenario] section")
    i += 1
    scalar_types = dict(_SCALARS)
    while i < len(lines) and not lines[i].startswith("["):
        line = lines[i].strip()
        i += 1
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {i}: expected 'key = value'")
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in scalar_types:
            raise ParseError(f"line {i}: unknown scalar key {key!r}")
        if key in scalars:
            raise ParseError(f"line {i}: duplicate key {key!r}")
        try:
            scalars[key] = scalar_types[key](raw)
        except ValueError as exc:
            raise ParseError(f"line {i}: bad value for {key!r}: {raw!r}") from exc
    known_blocks = {name for name, *_ in _BLOCKS}
    while i < len(lines):
        header = lines[i].strip()
        i += 1
        if not header:
            continue
        parts = header.strip("[]").split()
        if len(parts) != 4 or parts[0] != "matrix":
            raise ParseError(f"line {i}: expected a matrix header, got {header!r}")
        name, rows, cols = parts[1], int(parts[2]), int(parts[3])
        if name not in known_blocks:
            raise ParseError(f"line {i}: unknown matrix {name!r}")
        if name in matrices:
            raise ParseError(f"line {i}: duplicate matrix {name!r}")
        data = []
        for r in range(rows):
            if i >= len(lines):
                raise ParseError(f"matrix {name!r} truncated: expected {rows} rows")
            values = lines[i].split()
            i += 1
            if len(values) != cols:
                raise ParseError(
                    f"matrix {name!r} row {r}: expected {cols} values, got {len(values)}"
                )
            try:
                data.append([float(v) for v in values])
            except ValueError as exc:
                raise ParseError(f"matrix {name!r} row {r}: bad number") from exc
        matrices[name] = np.array(data)
    for key, _ in _SCALARS:
        if key not in scalars:
            raise ParseError(f"missing scalar {key!r} in [scenario]")
    for name, *_ in _BLOCKS:
        if name not in matrices:
            raise ParseError(f"missing matrix section {name!r}")
    return scalars, matrices


def loads(text: str) -> Instance:
    scalars, matrices = _parse_blocks(text.splitlines())
    B, U, F = scalars["sbs_count"], scalars["user_count"], scalars["file_count"]
    expected = {
        "sbs_positions_m": (B, 2),
        "user_positions_m": (U, 2),
        "max_power_w": (B, 1),
        "cache_capacity_bytes": (B, 1),
        "backhaul_mean_s": (B, 1),
        "load_coefficients": (B, 1),
        "file_sizes_bytes": (F, 1),
        "sinr_thresholds": (F, 1),
        "preference_rho": (U, F),
        "demand_theta": (U, F),
    }
    for name, shape in expected.items():
        if matrices[name].shape != shape:
            raise ParseError(
                f"matrix {name!r} has shape {matrices[name].shape}, expected {shape}"
            )
    sbs_pos = matrices["sbs_positions_m"]
    users = matrices["user_positions_m"]
    dist = np.linalg.norm(users[:, None, :] - sbs_pos[None, :, :], axis=2)
    gains = dist ** (-scalars["pathloss_exponent"])
    scenario = Scenario(
        sbs_count=B,
        user_count=U,
        file_count=F,
        max_power=matrices["max_power_w"][:, 0],
        cache_capacity=matrices["cache_capacity_bytes"][:, 0],
        backhaul_mean=matrices["backhaul_mean_s"][:, 0],
        file_sizes=matrices["file_sizes_bytes"][:, 0],
        sinr_thresholds=matrices["sinr_thresholds"][:, 0],
        bandwidth=scalars["bandwidth_hz"],
        noise_power=scalars["noise_power_w"],
        pathloss_exponent=scalars["pathloss_exponent"],
        channel_gains=gains,
        alpha=scalars["alpha"],
        load_coefficients=matrices["load_coefficients"][:, 0],
        central_zone_radius=scalars["central_zone_radius_m"],
        sbs_positions=sbs_pos,
        user_positions=users,
    )
    U_ = scenario.user_count
    prefs = PreferenceMatrix(matrices["preference_rho"], np.full(U_, 1.0 / U_))
    demands = DemandMatrix(matrices["demand_theta"].astype(np.int8))
    return Instance(scenario, prefs, demands)


def load(path: str) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
