"""Core domain types and physical formulas for cache-enabled small cell networks.

All internal math is linear-scale SI: powers in watts, sizes in bytes,
rates in bit/s, gains dimensionless. Unit conversions (dBm, MB) happen
once at scenario construction time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

BITS_PER_BYTE = 8.0


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def _frozen_int(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int8)
    arr.setflags(write=False)
    return arr


class ModelError(ValueError):
    """Raised on invalid model inputs (bad shapes, violated invariants)."""


@dataclass(frozen=True)
class Scenario:
    """Immutable network instance: geometry, physics constants and weights.

    ``channel_gains[i, j]`` is the gain between user i and SBS j. When
    positions are given, gains follow the distance power law
    ``dist**(-pathloss_exponent)``; hand-built instances may supply gains
    directly and omit positions.
    """

    sbs_count: int
    user_count: int
    file_count: int
    max_power: np.ndarray          # watts, per SBS
    cache_capacity: np.ndarray     # bytes, per SBS
    backhaul_mean: np.ndarray      # seconds, per SBS
    file_sizes: np.ndarray         # bytes, per file
    sinr_thresholds: np.ndarray    # linear scale, per file
    bandwidth: float               # Hz
    noise_power: float             # watts
    pathloss_exponent: float
    channel_gains: np.ndarray      # user x SBS
    alpha: float                   # energy-delay tradeoff weight
    load_coefficients: np.ndarray  # per SBS, sums to 1
    central_zone_radius: float     # meters
    sbs_positions: Optional[np.ndarray] = None   # (B, 2) meters
    user_positions: Optional[np.ndarray] = None  # (U, 2) meters
    rate_requirements: np.ndarray = field(init=False)  # bit/s, per file

    def __post_init__(self):
        B, U, F = self.sbs_count, self.user_count, self.file_count
        if B < 1 or U < 1 or F < 1:
            raise ModelError("counts must be positive")
        for name, arr, n in [
            ("max_power", self.max_power, B),
            ("cache_capacity", self.cache_capacity, B),
            ("backhaul_mean", self.backhaul_mean, B),
            ("load_coefficients", self.load_coefficients, B),
            ("file_sizes", self.file_sizes, F),
            ("sinr_thresholds", self.sinr_thresholds, F),
        ]:
            arr = _frozen(arr)
            object.__setattr__(self, name, arr)
            if arr.shape != (n,):
                raise ModelError(f"{name} must have shape ({n},)")
        g = _frozen(self.channel_gains)
        object.__setattr__(self, "channel_gains", g)
        if g.shape != (U, B):
            raise ModelError(f"channel_gains must have shape ({U}, {B})")

        if np.any(self.max_power <= 0) or np.any(self.file_sizes <= 0):
            raise ModelError("powers and file sizes must be strictly positive")
        if np.any(self.sinr_thresholds <= 0) or np.any(g <= 0):
            raise ModelError("SINR thresholds and gains must be strictly positive")
        if np.any(self.cache_capacity < 0) or np.any(self.backhaul_mean < 0):
            raise ModelError("capacities and backhaul means must be nonnegative")
        if self.noise_power <= 0 or self.bandwidth <= 0:
            raise ModelError("noise power and bandwidth must be strictly positive")
        if not 2.0 <= self.pathloss_exponent <= 5.0:
            raise ModelError("pathloss exponent must lie in [2, 5]")
        if not 0.0 <= self.alpha <= 1.0:
            raise ModelError("alpha must lie in [0, 1]")
        if np.any(self.load_coefficients <= 0) or not np.isclose(
            self.load_coefficients.sum(), 1.0, atol=1e-9
        ):
            raise ModelError("load coefficients must be positive and sum to 1")

        for name, n in [("sbs_positions", B), ("user_positions", U)]:
            pos = getattr(self, name)
            if pos is not None:
                pos = _frozen(pos)
                object.__setattr__(self, name, pos)
                if pos.shape != (n, 2):
                    raise ModelError(f"{name} must have shape ({n}, 2)")
        if self.sbs_positions is not None and self.user_positions is not None:
            dist = np.linalg.norm(
                self.user_positions[:, None, :] - self.sbs_positions[None, :, :],
                axis=2,
            )
            expected = dist ** (-self.pathloss_exponent)
            if not np.allclose(g, expected, rtol=1e-9):
                raise ModelError(
                    "channel gains inconsistent with positions and pathloss exponent"
                )

        object.__setattr__(
            self,
            "rate_requirements",
            _frozen(self.bandwidth * np.log2(1.0 + self.sinr_thresholds)),
        )


@dataclass(frozen=True)
class DemandMatrix:
    """Binary user x file request matrix; each user requests exactly one file."""

    theta: np.ndarray

    def __post_init__(self):
        th = _frozen_int(self.theta)
        object.__setattr__(self, "theta", th)
        if th.ndim != 2 or not np.isin(th, (0, 1)).all():
            raise ModelError("theta must be a binary matrix")
        if np.any(th.sum(axis=1) != 1):
            raise ModelError("each user must request exactly one file")

    @property
    def requested_file(self) -> np.ndarray:
        """Index of the file each user requests."""
        return np.argmax(self.theta, axis=1)


@dataclass(frozen=True)
class Association:
    """Binary user x SBS assignment matrix; each user joins exactly one SBS."""

    x: np.ndarray

    def __post_init__(self):
        x = _frozen_int(self.x)
        object.__setattr__(self, "x", x)
        if x.ndim != 2 or not np.isin(x, (0, 1)).all():
            raise ModelError("x must be a binary matrix")
        if np.any(x.sum(axis=1) != 1):
            raise ModelError("each user must associate with exactly one SBS")

    @classmethod
    def from_assignment(cls, assigned_sbs, sbs_count: int) -> "Association":
        assigned = np.asarray(assigned_sbs, dtype=int)
        x = np.zeros((assigned.size, sbs_count), dtype=np.int8)
        x[np.arange(assigned.size), assigned] = 1
        return cls(x)

    @property
    def assigned_sbs(self) -> np.ndarray:
        return np.argmax(self.x, axis=1)


@dataclass(frozen=True)
class PowerVector:
    """Per-SBS transmit powers in watts, within [0, P_max]."""

    p: np.ndarray

    def __post_init__(self):
        p = _frozen(self.p)
        object.__setattr__(self, "p", p)
        if p.ndim != 1:
            raise ModelError("p must be a vector")
        if np.any(p < 0):
            raise ModelError("powers must be nonnegative")

    def check_bounds(self, scenario: Scenario, tol: float = 1e-9) -> bool:
        return bool(np.all(self.p <= scenario.max_power + tol))


@dataclass(frozen=True)
class CachePlacement:
    """Binary SBS x file caching matrix under per-SBS byte capacity."""

    y: np.ndarray

    def __post_init__(self):
        y = _frozen_int(self.y)
        object.__setattr__(self, "y", y)
        if y.ndim != 2 or not np.isin(y, (0, 1)).all():
            raise ModelError("y must be a binary matrix")

    def check_capacity(self, scenario: Scenario) -> bool:
        used = self.y @ scenario.file_sizes
        return bool(np.all(used <= scenario.cache_capacity + 1e-6))


@dataclass(frozen=True)
class ObjectiveValue:
    energy: float     # joules
    delay: float      # seconds
    weighted: float


@dataclass(frozen=True)
class FeasibilityReport:
    ok: bool
    violation: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


def _check_indices(scenario: Scenario, i: int, j: int):
    if not 0 <= i < scenario.user_count:
        raise ModelError(f"user index {i} out of range")
    if not 0 <= j < scenario.sbs_count:
        raise ModelError(f"SBS index {j} out of range")


def sinr(scenario: Scenario, p: PowerVector, i: int, j: int) -> float:
    """Signal-to-interference-plus-noise ratio at user i served by SBS j."""
    _check_indices(scenario, i, j)
    g = scenario.channel_gains[i]
    interference = float(g @ p.p) - g[j] * p.p[j]
    return float(p.p[j] * g[j] / (interference + scenario.noise_power))


def rate(scenario: Scenario, p: PowerVector, i: int, j: int) -> float:
    """Shannon downlink rate in bit/s for user i served by SBS j."""
    return float(scenario.bandwidth * np.log2(1.0 + sinr(scenario, p, i, j)))


def wireless_delay(
    scenario: Scenario,
    i: int,
    j: int,
    k: int,
    mode: str = "relaxed",
    p: Optional[PowerVector] = None,
) -> float:
    """Over-the-air transmission time of file k from SBS j to user i.

    Relaxed mode charges the file at its required rate (s_k / R_k), which
    does not depend on the association; exact mode uses the achieved rate.
    """
    bits = scenario.file_sizes[k] * BITS_PER_BYTE
    if mode == "relaxed":
        return float(bits / scenario.rate_requirements[k])
    if mode == "exact":
        if p is None:
            raise ModelError("exact mode requires a power vector")
        r = rate(scenario, p, i, j)
        if r <= 0:
            raise ModelError(f"zero rate for user {i} at SBS {j}, delay undefined")
        return float(bits / r)
    raise ModelError(f"unknown mode {mode!r}")


def delivery_delay(
    scenario: Scenario,
    placement: CachePlacement,
    i: int,
    j: int,
    k: int,
    mode: str = "relaxed",
    p: Optional[PowerVector] = None,
) -> float:
    """End-to-end delivery delay: wireless time plus backhaul on a cache miss.

    The backhaul term uses the deterministic mean delay of SBS j.
    """
    _check_indices(scenario, i, j)
    tau = wireless_delay(scenario, i, j, k, mode, p)
    return float(tau + (1 - placement.y[j, k]) * scenario.backhaul_mean[j])


def relaxed_delay_table(scenario: Scenario, placement: CachePlacement) -> np.ndarray:
    """Relaxed d_ij^k as a (B, F) table: s_k/R_k plus backhaul on misses.

    Relaxed wireless delay is user-independent, so the table only depends
    on the serving SBS and the file.
    """
    tau = scenario.file_sizes * BITS_PER_BYTE / scenario.rate_requirements
    return tau[None, :] + (1 - placement.y) * scenario.backhaul_mean[:, None]


def total_transmission_time(scenario: Scenario, demands: DemandMatrix) -> float:
    """Association-independent total wireless time D under the relaxed model."""
    tau = scenario.file_sizes * BITS_PER_BYTE / scenario.rate_requirements
    return float(tau[demands.requested_file].sum())


def serving_time(
    scenario: Scenario,
    demands: DemandMatrix,
    assoc: Optional[Association],
    mode: str = "relaxed",
    p: Optional[PowerVector] = None,
) -> np.ndarray:
    """Per-SBS time T_j needed to transmit every file requested at that SBS."""
    if mode == "relaxed":
        return scenario.load_coefficients * total_transmission_time(scenario, demands)
    if mode != "exact":
        raise ModelError(f"unknown mode {mode!r}")
    if assoc is None:
        raise ModelError("exact mode requires an association")
    T = np.zeros(scenario.sbs_count)
    files = demands.requested_file
    for i in range(scenario.user_count):
        j = int(assoc.assigned_sbs[i])
        T[j] += wireless_delay(scenario, i, j, int(files[i]), "exact", p)
    return T


def total_delay(
    scenario: Scenario,
    demands: DemandMatrix,
    placement: CachePlacement,
    assoc: Association,
    mode: str = "relaxed",
    p: Optional[PowerVector] = None,
) -> float:
    """Sum of end-to-end delivery delays over all users."""
    files = demands.requested_file
    return float(
        sum(
            delivery_delay(
                scenario, placement, i, int(assoc.assigned_sbs[i]), int(files[i]), mode, p
            )
            for i in range(scenario.user_count)
        )
    )


def objective(
    scenario: Scenario,
    demands: DemandMatrix,
    placement: CachePlacement,
    assoc: Association,
    p: PowerVector,
    mode: str = "relaxed",
    alpha: Optional[float] = None,
) -> ObjectiveValue:
    """Weighted energy-delay objective with both components reported."""
    if alpha is None:
        alpha = scenario.alpha
    T = serving_time(scenario, demands, assoc, mode, p)
    energy = float(p.p @ T)
    delay = total_delay(scenario, demands, placement, assoc, mode, p)
    return ObjectiveValue(energy, delay, alpha * energy + (1 - alpha) * delay)


def requested_thresholds(scenario: Scenario, demands: DemandMatrix) -> np.ndarray:
    """Per-user SINR threshold of the requested file (gamma_{f_i})."""
    return scenario.sinr_thresholds[demands.requested_file]


def check_feasible(
    scenario: Scenario,
    demands: DemandMatrix,
    assoc: Association,
    p: PowerVector,
    tol: float = 1e-7,
) -> FeasibilityReport:
    """Verify power bounds, association structure and per-user SINR requirements.

    Returns a report naming the first violated constraint instead of raising.
    """
    if assoc.x.shape != (scenario.user_count, scenario.sbs_count):
        return FeasibilityReport(False, "association shape mismatch")
    if p.p.shape != (scenario.sbs_count,):
        return FeasibilityReport(False, "power vector shape mismatch")
    over = np.nonzero(p.p > scenario.max_power + tol)[0]
    if over.size:
        j = int(over[0])
        return FeasibilityReport(
            False, f"power bound violated at SBS {j}: {p.p[j]} > {scenario.max_power[j]}"
        )
    gammas = requested_thresholds(scenario, demands)
    for i in range(scenario.user_count):
        j = int(assoc.assigned_sbs[i])
        s = sinr(scenario, p, i, j)
        if s < gammas[i] * (1 - tol) - tol:
            return FeasibilityReport(
                False,
                f"SINR requirement violated for user {i} at SBS {j}: "
                f"{s:.6g} < {gammas[i]:.6g}",
            )
    return FeasibilityReport(True)
