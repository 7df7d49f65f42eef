"""Exhaustive-enumeration solver: ordering, pruning, tie-breaking."""

import numpy as np
import pytest

from dscnopt import scenario as scn
from dscnopt.baselines import min_power_for, reachable_sbs
from dscnopt.model import (
    Association,
    CachePlacement,
    DemandMatrix,
    ModelError,
    Scenario,
    serving_time,
)
from dscnopt.benders import delay_coefficients
from dscnopt.oracle import (
    EnumerationCapError,
    InstanceInfeasibleError,
    brute_force,
    brute_force_sweep,
    enumerate_candidates,
    iter_assignments,
)
from dscnopt.placement import lpf_greedy
from dscnopt.popularity import local_popularity


def make_scenario(
    gains, thresholds, max_power=1.0, backhaul=(0.5, 1.5), file_sizes=(1e6, 2e6)
):
    return Scenario(
        sbs_count=2,
        user_count=2,
        file_count=2,
        max_power=[max_power] * 2,
        cache_capacity=[3e6, 3e6],
        backhaul_mean=list(backhaul),
        file_sizes=list(file_sizes),
        sinr_thresholds=thresholds,
        bandwidth=1e6,
        noise_power=1e-3,
        pathloss_exponent=3.0,
        channel_gains=gains,
        alpha=0.5,
        load_coefficients=[0.5, 0.5],
        central_zone_radius=25.0,
    )


def all_feasible_case():
    s = make_scenario([[1.0, 0.5], [0.5, 0.8]], [0.2, 0.3])
    return s, DemandMatrix([[1, 0], [0, 1]]), CachePlacement([[1, 0], [0, 1]])


class TestIterAssignments:
    def test_count_and_order(self):
        got = [a.tolist() for a in iter_assignments(2, 3)]
        assert len(got) == 9
        assert got[:4] == [[0, 0], [0, 1], [0, 2], [1, 0]]
        assert got[-1] == [2, 2]

    def test_single_sbs(self):
        assert [a.tolist() for a in iter_assignments(3, 1)] == [[0, 0, 0]]


class TestEnumerateCandidates:
    def test_keeps_only_feasible(self):
        s = make_scenario([[1.0, 0.9], [0.9, 0.8]], [3.0, 3.0])
        demands = DemandMatrix([[1, 0], [0, 1]])
        placement = CachePlacement([[1, 1], [0, 0]])
        cands = enumerate_candidates(s, demands, placement)
        kept = {tuple(c.assigned) for c in cands}
        for assigned in iter_assignments(2, 2):
            feasible = (
                min_power_for(s, demands, Association.from_assignment(assigned, 2))
                is not None
            )
            assert (tuple(assigned) in kept) == feasible

    def test_energy_and_delay_fields(self):
        s, demands, placement = all_feasible_case()
        T = serving_time(s, demands, None, "relaxed")
        dcoef = delay_coefficients(s, demands, placement)
        for cand in enumerate_candidates(s, demands, placement):
            assert cand.energy == pytest.approx(float(cand.power.p @ T))
            assert cand.delay == pytest.approx(
                float(dcoef[np.arange(2), cand.assigned].sum())
            )

    def test_reachability_prescreen_matches_lp(self):
        # prescreen must only skip assignments the LP would reject anyway
        inst = scn.generate(scn.desk_scale(), 0)
        s, demands = inst.scenario, inst.demands
        reach = reachable_sbs(s, demands)
        for assigned in list(iter_assignments(s.user_count, s.sbs_count))[:60]:
            if not reach[np.arange(s.user_count), assigned].all():
                assoc = Association.from_assignment(assigned, s.sbs_count)
                assert min_power_for(s, demands, assoc) is None

    def test_cap_enforced(self):
        s, demands, placement = all_feasible_case()
        with pytest.raises(EnumerationCapError):
            enumerate_candidates(s, demands, placement, cap=3)


class TestBruteForce:
    def test_matches_manual_minimum(self):
        s, demands, placement = all_feasible_case()
        alpha = 0.3
        T = serving_time(s, demands, None, "relaxed")
        dcoef = delay_coefficients(s, demands, placement)
        best, best_assigned = None, None
        for assigned in iter_assignments(2, 2):
            power = min_power_for(s, demands, Association.from_assignment(assigned, 2))
            value = alpha * float(power.p @ T) + (1 - alpha) * float(
                dcoef[np.arange(2), assigned].sum()
            )
            if best is None or value < best:
                best, best_assigned = value, assigned
        sol = brute_force(s, demands, placement, alpha)
        assert sol.objective == pytest.approx(best)
        assert sol.assoc.assigned_sbs.tolist() == best_assigned.tolist()
        assert sol.objective == pytest.approx(
            alpha * sol.energy + (1 - alpha) * sol.delay
        )

    def test_rejects_bad_alpha(self):
        s, demands, placement = all_feasible_case()
        with pytest.raises(ModelError):
            brute_force(s, demands, placement, -0.1)

    def test_infeasible_instance_raises(self):
        s = make_scenario([[1.0, 0.9], [0.9, 0.8]], [3.0, 3.0], max_power=1e-4)
        demands = DemandMatrix([[1, 0], [0, 1]])
        with pytest.raises(InstanceInfeasibleError):
            brute_force(s, demands, CachePlacement([[1, 1], [0, 0]]), 0.5)

    def test_tie_breaks_lexicographically(self):
        # alpha = 0 with a placement caching nothing: all-equal-backhaul
        # delays make many associations tie; the first enumerated must win
        s = make_scenario(
            [[1.0, 0.5], [0.5, 1.0]], [0.2, 0.2],
            backhaul=(1.0, 1.0), file_sizes=(1e6, 1e6),
        )
        demands = DemandMatrix([[1, 0], [0, 1]])
        sol = brute_force(s, demands, CachePlacement([[0, 0], [0, 0]]), 0.0)
        assert sol.assoc.assigned_sbs.tolist() == [0, 0]


class TestSweep:
    def test_matches_per_alpha_brute_force(self):
        inst = scn.generate(scn.desk_scale(), 1)
        pop = local_popularity(inst.scenario, inst.preferences)
        placement, _ = lpf_greedy(inst.scenario, pop)
        alphas = [0.0, 0.5, 1.0]
        swept = brute_force_sweep(inst.scenario, inst.demands, placement, alphas)
        for alpha, sol in swept:
            single = brute_force(inst.scenario, inst.demands, placement, alpha)
            assert sol.objective == pytest.approx(single.objective)
            assert np.array_equal(
                sol.assoc.assigned_sbs, single.assoc.assigned_sbs
            )

    def test_pareto_consistent(self):
        inst = scn.generate(scn.desk_scale(), 2)
        pop = local_popularity(inst.scenario, inst.preferences)
        placement, _ = lpf_greedy(inst.scenario, pop)
        alphas = [0.0, 0.25, 0.5, 0.75, 1.0]
        swept = brute_force_sweep(inst.scenario, inst.demands, placement, alphas)
        energies = [sol.energy for _, sol in swept]
        delays = [sol.delay for _, sol in swept]
        # more weight on energy: energy never increases, delay never decreases
        for a, b in zip(energies, energies[1:]):
            assert b <= a + 1e-9
        for a, b in zip(delays, delays[1:]):
            assert b >= a - 1e-9
