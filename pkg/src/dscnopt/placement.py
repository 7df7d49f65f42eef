"""Cache placement policies and an exact knapsack oracle.

The main policy caches each cell's locally most popular files greedily by
popularity density; baselines cache by a global ranking (GPC) or at
random (RC). The dynamic-programming knapsack is the testing oracle for
per-cell placement optimality.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

from .model import CachePlacement, ModelError, Scenario
from .popularity import PopularityTable

DEFAULT_GRID_BYTES = 100_000.0   # 0.1 MB DP quantization cell
MAX_DP_CELLS = 50_000_000


class KnapsackError(ModelError):
    """Raised when the DP capacity grid would be intractably large."""


def _greedy_fill(order: Sequence[int], sizes: np.ndarray, capacity: float) -> np.ndarray:
    """Admit items in the given order, skipping any that no longer fit."""
    chosen = np.zeros(sizes.size, dtype=np.int8)
    used = 0.0
    for k in order:
        if used + sizes[k] <= capacity:
            chosen[k] = 1
            used += sizes[k]
    return chosen


def lpf_greedy(
    scenario: Scenario, popularity: PopularityTable
) -> Tuple[CachePlacement, np.ndarray]:
    """Per-cell greedy placement by popularity density psi_jk / s_k.

    Items that do not fit are skipped and scanning continues, so capacity
    is never exceeded. Returns the placement and the per-SBS cached
    popularity mass.
    """
    B, F = scenario.sbs_count, scenario.file_count
    y = np.zeros((B, F), dtype=np.int8)
    for j in range(B):
        density = popularity.psi[j] / scenario.file_sizes
        order = np.lexsort((np.arange(F), -density))
        y[j] = _greedy_fill(order, scenario.file_sizes, scenario.cache_capacity[j])
    placement = CachePlacement(y)
    return placement, (popularity.psi * y).sum(axis=1)


def knapsack_exact(
    sizes: Sequence[float],
    values: Sequence[float],
    capacity: float,
    grid: float = DEFAULT_GRID_BYTES,
) -> Tuple[np.ndarray, float]:
    """Exact 0-1 knapsack by dynamic programming over a quantized capacity grid.

    Sizes are divided by ``grid`` and must land on integers (within 1e-9);
    the result is then a true optimum. Returns (selection mask, value).
    """
    sizes = np.asarray(sizes, dtype=float)
    values = np.asarray(values, dtype=float)
    if np.any(sizes <= 0):
        raise ModelError("item sizes must be strictly positive")
    if np.any(values < 0):
        raise ModelError("item values must be nonnegative")
    units = sizes / grid
    w = np.rint(units).astype(int)
    if not np.allclose(units, w, atol=1e-9):
        raise ModelError("item sizes must be multiples of the DP grid")
    cap = int(np.floor(capacity / grid + 1e-9))
    n = sizes.size
    if n * (cap + 1) > MAX_DP_CELLS:
        raise KnapsackError(
            f"DP table of {n * (cap + 1)} cells too large; use a coarser grid"
        )
    best = np.zeros(cap + 1)
    take = np.zeros((n, cap + 1), dtype=bool)
    for item in range(n):
        wk = w[item]
        if wk <= cap:
            candidate = best[: cap + 1 - wk] + values[item]
            improved = candidate > best[wk:] + 1e-15
            take[item, wk:] = improved
            best[wk:] = np.where(improved, candidate, best[wk:])
    chosen = np.zeros(n, dtype=np.int8)
    c = cap
    for item in range(n - 1, -1, -1):
        if take[item, c]:
            chosen[item] = 1
            c -= w[item]
    return chosen, float(values @ chosen)


def gpc_placement(scenario: Scenario, zipf_exponent: float = 0.8) -> CachePlacement:
    """Global-popularity caching: every SBS caches the same top-ranked files.

    The global ranking is Zipf over the file index (rank = index), so the
    exponent only shapes the implied probabilities, not the order.
    """
    if zipf_exponent <= 0:
        raise ModelError("Zipf exponent must be positive")
    order = np.arange(scenario.file_count)
    row = _greedy_fill(order, scenario.file_sizes, float(scenario.cache_capacity[0]))
    B = scenario.sbs_count
    y = np.zeros((B, scenario.file_count), dtype=np.int8)
    for j in range(B):
        if scenario.cache_capacity[j] == scenario.cache_capacity[0]:
            y[j] = row
        else:
            y[j] = _greedy_fill(order, scenario.file_sizes, scenario.cache_capacity[j])
    return CachePlacement(y)


def rc_placement(scenario: Scenario, seed: int) -> CachePlacement:
    """Random caching: per-SBS uniformly random order, greedy admit."""
    rng = np.random.default_rng(seed)
    B, F = scenario.sbs_count, scenario.file_count
    y = np.zeros((B, F), dtype=np.int8)
    for j in range(B):
        order = rng.permutation(F)
        y[j] = _greedy_fill(order, scenario.file_sizes, scenario.cache_capacity[j])
    return CachePlacement(y)


def hit_ratio(
    placement: CachePlacement, popularity: PopularityTable
) -> Tuple[np.ndarray, float]:
    """Cached popularity mass per SBS and its network mean."""
    if placement.y.shape != popularity.psi.shape:
        raise ModelError("placement and popularity shapes disagree")
    per_sbs = (popularity.psi * placement.y).sum(axis=1)
    return per_sbs, float(per_sbs.mean())
