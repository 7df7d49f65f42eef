"""Ground-truth solver: exhaustive enumeration over binary associations.

Deliberately simple so it can be trusted: a mixed-radix counter walks
every row-stochastic binary association, each one gets an exact
minimum-power LP, and the weighted objective is compared directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .baselines import min_power_for, reachable_sbs
from .benders import delay_coefficients
from .model import (
    Association,
    CachePlacement,
    DemandMatrix,
    ModelError,
    PowerVector,
    Scenario,
    serving_time,
)

DEFAULT_ENUMERATION_CAP = 10**6


class EnumerationCapError(ModelError):
    """The association space exceeds the configured enumeration cap."""


class InstanceInfeasibleError(ModelError):
    """No association admits a feasible power vector."""


@dataclass(frozen=True)
class OracleSolution:
    assoc: Association
    power: PowerVector
    energy: float
    delay: float
    objective: float


def iter_assignments(user_count: int, sbs_count: int) -> Iterator[np.ndarray]:
    """All assignments in lexicographic (mixed-radix, user 0 most significant) order."""
    assigned = np.zeros(user_count, dtype=int)
    while True:
        yield assigned.copy()
        i = user_count - 1
        while i >= 0 and assigned[i] == sbs_count - 1:
            assigned[i] = 0
            i -= 1
        if i < 0:
            return
        assigned[i] += 1


@dataclass(frozen=True)
class Candidate:
    assigned: np.ndarray
    power: PowerVector
    energy: float
    delay: float


def enumerate_candidates(
    scenario: Scenario,
    demands: DemandMatrix,
    placement: CachePlacement,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> List[Candidate]:
    """Every power-feasible association with its minimum energy and total delay.

    Alpha-independent, so a single enumeration serves a whole tradeoff
    sweep.
    """
    U, B = scenario.user_count, scenario.sbs_count
    if B**U > cap:
        raise EnumerationCapError(
            f"{B}^{U} associations exceed the cap of {cap}; use a smaller instance"
        )
    dcoef = delay_coefficients(scenario, demands, placement)
    T = serving_time(scenario, demands, None, "relaxed")
    # single-user reachability is a necessary condition (interference only
    # hurts), so assignments using an unreachable pair are skipped unsolved
    reach = reachable_sbs(scenario, demands)
    out: List[Candidate] = []
    for assigned in iter_assignments(U, B):
        if not reach[np.arange(U), assigned].all():
            continue
        assoc = Association.from_assignment(assigned, B)
        power = min_power_for(scenario, demands, assoc)
        if power is None:
            continue
        energy = float(power.p @ T)
        delay = float(dcoef[np.arange(U), assigned].sum())
        out.append(Candidate(assigned, power, energy, delay))
    return out


def _pick(
    candidates: Sequence[Candidate], alpha: float, sbs_count: int
) -> OracleSolution:
    best = math.inf
    chosen: Optional[Candidate] = None
    for cand in candidates:   # lexicographic enumeration order breaks ties
        value = alpha * cand.energy + (1.0 - alpha) * cand.delay
        if value < best:
            best, chosen = value, cand
    assert chosen is not None
    return OracleSolution(
        assoc=Association.from_assignment(chosen.assigned, sbs_count),
        power=chosen.power,
        energy=chosen.energy,
        delay=chosen.delay,
        objective=best,
    )


def brute_force(
    scenario: Scenario,
    demands: DemandMatrix,
    placement: CachePlacement,
    alpha: float,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> OracleSolution:
    """Global optimum of the weighted energy-delay problem by full enumeration."""
    if not 0.0 <= alpha <= 1.0:
        raise ModelError("alpha must lie in [0, 1]")
    candidates = enumerate_candidates(scenario, demands, placement, cap)
    if not candidates:
        raise InstanceInfeasibleError("every association is power-infeasible")
    return _pick(candidates, alpha, scenario.sbs_count)


def brute_force_sweep(
    scenario: Scenario,
    demands: DemandMatrix,
    placement: CachePlacement,
    alphas: Sequence[float],
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> List[Tuple[float, OracleSolution]]:
    """One enumeration reused across a whole alpha grid."""
    candidates = enumerate_candidates(scenario, demands, placement, cap)
    if not candidates:
        raise InstanceInfeasibleError("every association is power-infeasible")
    return [(a, _pick(candidates, a, scenario.sbs_count)) for a in alphas]
