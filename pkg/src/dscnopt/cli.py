"""Command-line experiment runner producing plot-ready CSV tables.

Subcommands cover single-instance solves, alpha tradeoff sweeps, caching
policy comparisons, association algorithm comparisons, and instance
generation. All outputs are deterministic given (instance, seed, flags);
floats are written with 9 significant digits.

Exit codes: 0 success, 1 solver non-convergence, 2 usage error,
3 infeasible instance.
"""

from __future__ import annotations

import csv
import dataclasses
import sys
from typing import List, Optional, Sequence

import click
import numpy as np

from . import baselines, benders, oracle, placement as plc, scenario as scn
from .model import ModelError, total_delay
from .popularity import local_popularity

EXIT_NONCONVERGENCE = 1
EXIT_INFEASIBLE = 3

_PAPER_SCALE_WARNING = (
    "warning: paper-scale instances (B=25, U=150, F=600) make the exact "
    "master solve exponential in the worst case; expect long runtimes"
)


def _f(v: float) -> str:
    return format(float(v), ".9g")


def _write_csv(path: str, header: Sequence[str], rows: List[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _load_instance(
    instance: Optional[str], seed: int, paper_scale: bool
) -> scn.Instance:
    if instance is not None:
        try:
            return scn.load(instance)
        except (OSError, scn.ParseError) as exc:
            raise click.UsageError(f"cannot load instance: {exc}")
    if paper_scale:
        click.echo(_PAPER_SCALE_WARNING, err=True)
        config = scn.paper_scale()
    else:
        config = scn.desk_scale()
    return scn.generate(config, seed)


def _pipeline(inst: scn.Instance):
    """Popularity and cache placement shared by every solve-style command."""
    pop = local_popularity(inst.scenario, inst.preferences)
    cache, _ = plc.lpf_greedy(inst.scenario, pop)
    return pop, cache


def sampled_backhaul_delay(
    inst: scn.Instance,
    cache,
    assoc,
    rng: np.random.Generator,
    samples: int,
) -> float:
    """Monte Carlo mean total delay with exponential backhaul draws.

    The wireless part is deterministic; each cache miss redraws its
    backhaul delay from an exponential with the SBS's configured mean.
    """
    s = inst.scenario
    files = inst.demands.requested_file
    assigned = assoc.assigned_sbs
    base = total_delay(s, inst.demands, cache, assoc) - float(
        sum(
            (1 - cache.y[int(assigned[i]), int(files[i])])
            * s.backhaul_mean[int(assigned[i])]
            for i in range(s.user_count)
        )
    )
    total = 0.0
    for _ in range(samples):
        draw = base
        for i in range(s.user_count):
            j = int(assigned[i])
            if not cache.y[j, int(files[i])]:
                draw += float(rng.exponential(s.backhaul_mean[j]))
        total += draw
    return total / samples


def _parse_grid(raw: str, name: str) -> List[float]:
    try:
        values = [float(v) for v in raw.split(",") if v.strip() != ""]
    except ValueError:
        raise click.UsageError(f"{name} must be a comma-separated list of numbers")
    if not values:
        raise click.UsageError(f"{name} must be non-empty")
    return values


def _check_alpha(alpha: float) -> float:
    if not 0.0 <= alpha <= 1.0:
        raise click.UsageError("alpha must lie in [0, 1]")
    return alpha


@click.group()
def main() -> None:
    """Energy-delay optimization experiments for cached small cell networks."""


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--paper-scale", is_flag=True, help="Use the full-size preset.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def generate(seed: int, paper_scale: bool, out: str) -> None:
    """Generate a random instance and write it to a file."""
    if paper_scale:
        click.echo(_PAPER_SCALE_WARNING, err=True)
    config = scn.paper_scale() if paper_scale else scn.desk_scale()
    scn.save(scn.generate(config, seed), out)
    click.echo(f"wrote {out}")


def _solve_rows(inst, cache, algorithm, alpha, epsilon):
    """Run one algorithm; returns (long-format rows, exit code, trace|None)."""
    s = inst.scenario
    trace = None
    converged = True
    iterations = 0
    if algorithm == "ucwt":
        result = benders.ucwt(s, inst.demands, cache, alpha, epsilon)
        assoc, power, trace = result.assoc, result.power, result.trace
        converged, iterations = trace.converged, len(trace.iterations)
    elif algorithm == "oracle":
        sol = oracle.brute_force(s, inst.demands, cache, alpha)
        assoc, power = sol.assoc, sol.power
    elif algorithm == "doa":
        res = baselines.doa(s, inst.demands, cache)
        assoc, power = res.assoc, res.power
    elif algorithm == "ema":
        res = baselines.ema(s, inst.demands, cache)
        assoc, power = res.assoc, res.power
    else:  # pragma: no cover - guarded by click.Choice
        raise click.UsageError(f"unknown algorithm {algorithm!r}")

    dcoef = benders.delay_coefficients(s, inst.demands, cache)
    T = benders.serving_time(s, inst.demands, None, "relaxed")
    energy = float(power.p @ T)
    delay = float((dcoef * assoc.x).sum())
    rows: List[Sequence] = [
        ("algorithm", "", algorithm),
        ("alpha", "", _f(alpha)),
        ("energy_joules", "", _f(energy)),
        ("delay_seconds", "", _f(delay)),
        ("weighted", "", _f(alpha * energy + (1 - alpha) * delay)),
        ("converged", "", int(converged)),
        ("iterations", "", iterations),
    ]
    for i, j in enumerate(assoc.assigned_sbs):
        rows.append(("assigned_sbs", i, int(j)))
    for j, p in enumerate(power.p):
        rows.append(("power_w", j, _f(p)))
    code = 0 if converged else EXIT_NONCONVERGENCE
    return rows, code, trace


@main.command()
@click.option("--instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--paper-scale", is_flag=True)
@click.option(
    "--algorithm",
    type=click.Choice(["ucwt", "doa", "ema", "oracle"]),
    default="ucwt",
    show_default=True,
)
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--epsilon", type=float, default=None)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option(
    "--trace-out",
    type=click.Path(dir_okay=False),
    help="Per-iteration bounds CSV (ucwt only); defaults to OUT + '.trace.csv'.",
)
def solve(instance, seed, paper_scale, algorithm, alpha, epsilon, out, trace_out):
    """Solve one instance and write the objective, association and powers."""
    _check_alpha(alpha)
    if epsilon is not None and epsilon <= 0:
        raise click.UsageError("epsilon must be positive")
    inst = _load_instance(instance, seed, paper_scale)
    _, cache = _pipeline(inst)
    try:
        rows, code, trace = _solve_rows(inst, cache, algorithm, alpha, epsilon)
    except (
        benders.NoFeasibleAssociationError,
        oracle.InstanceInfeasibleError,
        baselines.NoReachableSbsError,
    ) as exc:
        click.echo(f"infeasible: {exc}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    except ModelError as exc:
        click.echo(f"infeasible: {exc}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    _write_csv(out, ("field", "index", "value"), rows)
    if trace is not None:
        trace_path = trace_out or out + ".trace.csv"
        with open(trace_path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(trace.csv_rows()) + "\n")
    sys.exit(code)


@main.command("sweep-alpha")
@click.option("--instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--paper-scale", is_flag=True)
@click.option(
    "--algorithm",
    type=click.Choice(["ucwt", "oracle"]),
    default="oracle",
    show_default=True,
)
@click.option(
    "--grid",
    default="0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1",
    show_default=True,
    help="Comma-separated alpha values in [0, 1].",
)
@click.option("--replications", type=int, default=1, show_default=True)
@click.option("--epsilon", type=float, default=None)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def sweep_alpha(instance, seed, paper_scale, algorithm, grid, replications, epsilon, out):
    """Trace the energy-delay tradeoff over an alpha grid."""
    alphas = _parse_grid(grid, "--grid")
    for a in alphas:
        _check_alpha(a)
    if replications < 1:
        raise click.UsageError("replications must be positive")
    rows = []
    infeasible = nonconverged = 0
    for rep in range(replications):
        inst = (
            _load_instance(instance, seed, paper_scale)
            if instance is not None
            else _load_instance(None, seed + rep, paper_scale)
        )
        _, cache = _pipeline(inst)
        s = inst.scenario
        try:
            if algorithm == "oracle":
                for a, sol in oracle.brute_force_sweep(
                    s, inst.demands, cache, alphas
                ):
                    rows.append((_f(a), rep, _f(sol.energy), _f(sol.delay),
                                 _f(sol.objective)))
            else:
                for a in alphas:
                    res = benders.ucwt(s, inst.demands, cache, a, epsilon)
                    if not res.trace.converged:
                        nonconverged += 1
                    dcoef = benders.delay_coefficients(s, inst.demands, cache)
                    T = benders.serving_time(s, inst.demands, None, "relaxed")
                    e = float(res.power.p @ T)
                    d = float((dcoef * res.assoc.x).sum())
                    rows.append((_f(a), rep, _f(e), _f(d), _f(a * e + (1 - a) * d)))
        except (benders.NoFeasibleAssociationError, oracle.InstanceInfeasibleError):
            infeasible += 1
    _write_csv(
        out,
        ("alpha", "replication", "energy_joules", "delay_seconds", "weighted"),
        rows,
    )
    if infeasible == replications:
        sys.exit(EXIT_INFEASIBLE)
    if nonconverged:
        sys.exit(EXIT_NONCONVERGENCE)


@main.command("compare-caching")
@click.option("--seeds", type=int, default=10, show_default=True,
              help="Number of seeded instances per grid point.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Base seed; instance r uses seed + r.")
@click.option("--paper-scale", is_flag=True)
@click.option("--capacity-grid", default="0.1,0.25,0.5,1.0", show_default=True,
              help="Cache capacity as a fraction of total catalog bytes.")
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def compare_caching(seeds, seed, paper_scale, capacity_grid, alpha, out):
    """Compare caching policies (lpf, gpc, rc) over a capacity grid."""
    _check_alpha(alpha)
    fractions = _parse_grid(capacity_grid, "--capacity-grid")
    for f in fractions:
        if not 0.0 <= f <= 1.0:
            raise click.UsageError("capacity fractions must lie in [0, 1]")
    if seeds < 1:
        raise click.UsageError("seeds must be positive")
    if paper_scale:
        click.echo(_PAPER_SCALE_WARNING, err=True)
    rows = []
    for frac in fractions:
        if paper_scale:
            config = dataclasses.replace(scn.paper_scale(), cache_fraction=frac)
        else:
            config = scn.desk_scale(cache_fraction=frac)
        for r in range(seeds):
            inst = scn.generate(config, seed + r)
            s = inst.scenario
            pop = local_popularity(s, inst.preferences)
            policies = {
                "lpf": plc.lpf_greedy(s, pop)[0],
                "gpc": plc.gpc_placement(s),
                "rc": plc.rc_placement(s, seed + r),
            }
            for name, cache in policies.items():
                _, mean_hit = plc.hit_ratio(cache, pop)
                try:
                    res = benders.ucwt(s, inst.demands, cache, alpha)
                    dcoef = benders.delay_coefficients(s, inst.demands, cache)
                    T = benders.serving_time(s, inst.demands, None, "relaxed")
                    e = float(res.power.p @ T)
                    d = float((dcoef * res.assoc.x).sum())
                    energy, delay = _f(e), _f(d)
                except benders.NoFeasibleAssociationError:
                    energy = delay = ""
                rows.append((name, _f(frac), seed + r, _f(mean_hit), energy, delay))
    rows.sort(key=lambda row: (row[0], float(row[1]), int(row[2])))
    _write_csv(
        out,
        ("policy", "capacity_fraction", "seed", "hit_ratio",
         "energy_joules", "delay_seconds"),
        rows,
    )


@main.command("compare-algorithms")
@click.option("--seeds", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sweep", type=click.Choice(["users", "capacity"]),
              default="users", show_default=True)
@click.option("--grid", default=None,
              help="Sweep values; defaults to 4,5,6 users or 0.1,0.25,0.5 capacity.")
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--sample-backhaul", is_flag=True,
              help="Report Monte Carlo mean delay with exponential backhaul draws.")
@click.option("--samples", type=int, default=200, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def compare_algorithms(seeds, seed, sweep, grid, alpha, sample_backhaul, samples, out):
    """Compare ucwt/doa/ema energy and delay across a swept parameter."""
    _check_alpha(alpha)
    if seeds < 1 or samples < 1:
        raise click.UsageError("seeds and samples must be positive")
    if grid is None:
        values = [4.0, 5.0, 6.0] if sweep == "users" else [0.1, 0.25, 0.5]
    else:
        values = _parse_grid(grid, "--grid")
    rows = []
    header = ["sweep", "value", "seed", "algorithm", "energy_joules",
              "delay_seconds"]
    if sample_backhaul:
        header.append("sampled_delay_seconds")
    for value in values:
        if sweep == "users":
            if value < 1 or value != int(value):
                raise click.UsageError("user counts must be positive integers")
            config = scn.desk_scale(user_count=int(value))
        else:
            if not 0.0 <= value <= 1.0:
                raise click.UsageError("capacity fractions must lie in [0, 1]")
            config = scn.desk_scale(cache_fraction=value)
        for r in range(seeds):
            inst = scn.generate(config, seed + r)
            s = inst.scenario
            _, cache = _pipeline(inst)
            dcoef = benders.delay_coefficients(s, inst.demands, cache)
            T = benders.serving_time(s, inst.demands, None, "relaxed")
            solvers = {
                "ucwt": lambda: benders.ucwt(s, inst.demands, cache, alpha),
                "doa": lambda: baselines.doa(s, inst.demands, cache),
                "ema": lambda: baselines.ema(s, inst.demands, cache),
            }
            for name, run in solvers.items():
                try:
                    res = run()
                except (benders.NoFeasibleAssociationError,
                        baselines.NoReachableSbsError, ModelError):
                    continue
                assoc, power = res.assoc, res.power
                e = float(power.p @ T)
                d = float((dcoef * assoc.x).sum())
                row = [sweep, _f(value), seed + r, name, _f(e), _f(d)]
                if sample_backhaul:
                    alg_tag = {"ucwt": 0, "doa": 1, "ema": 2}[name]
                    rng = np.random.default_rng((seed + r, alg_tag))
                    row.append(_f(sampled_backhaul_delay(
                        inst, cache, assoc, rng, samples)))
                rows.append(row)
    rows.sort(key=lambda row: (float(row[1]), int(row[2]), row[3]))
    _write_csv(out, header, rows)


if __name__ == "__main__":  # pragma: no cover
    main()
