"""End-to-end command-line tests via click's test runner."""

import csv

import numpy as np
import pytest
from click.testing import CliRunner

from dscnopt import scenario as scn
from dscnopt.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def long_fields(rows):
    out = {}
    for field, index, value in rows[1:]:
        out.setdefault(field, []).append((index, value))
    return out


class TestGenerate:
    def test_writes_loadable_instance(self, runner, tmp_path):
        out = tmp_path / "inst.txt"
        result = runner.invoke(main, ["generate", "--seed", "3", "--out", str(out)])
        assert result.exit_code == 0
        inst = scn.load(str(out))
        assert inst.scenario.user_count == 6

    def test_matches_library_generation(self, runner, tmp_path):
        out = tmp_path / "inst.txt"
        runner.invoke(main, ["generate", "--seed", "3", "--out", str(out)])
        direct = scn.generate(scn.desk_scale(), 3)
        loaded = scn.load(str(out))
        assert np.array_equal(
            loaded.scenario.channel_gains, direct.scenario.channel_gains
        )


class TestSolve:
    def test_ucwt_solve_and_trace(self, runner, tmp_path):
        out = tmp_path / "res.csv"
        result = runner.invoke(
            main, ["solve", "--seed", "0", "--alpha", "0.5", "--out", str(out)]
        )
        assert result.exit_code == 0
        rows = read_csv(str(out))
        assert rows[0] == ["field", "index", "value"]
        fields = long_fields(rows)
        assert fields["algorithm"][0][1] == "ucwt"
        assert fields["converged"][0][1] == "1"
        assert len(fields["assigned_sbs"]) == 6
        assert len(fields["power_w"]) == 3
        trace = (tmp_path / "res.csv.trace.csv").read_text().splitlines()
        assert trace[0] == "t,psi_lower,psi_upper,subproblem_status,M,N,omega"
        assert len(trace) >= 2

    def test_oracle_agrees_with_ucwt(self, runner, tmp_path):
        values = {}
        for alg in ("ucwt", "oracle"):
            out = tmp_path / f"{alg}.csv"
            result = runner.invoke(
                main,
                ["solve", "--seed", "1", "--algorithm", alg,
                 "--alpha", "0.3", "--out", str(out)],
            )
            assert result.exit_code == 0
            values[alg] = float(long_fields(read_csv(str(out)))["weighted"][0][1])
        assert values["ucwt"] == pytest.approx(values["oracle"], rel=1e-6)

    def test_solve_from_instance_file(self, runner, tmp_path):
        inst_path = tmp_path / "inst.txt"
        runner.invoke(main, ["generate", "--seed", "2", "--out", str(inst_path)])
        out = tmp_path / "res.csv"
        result = runner.invoke(
            main, ["solve", "--instance", str(inst_path), "--out", str(out)]
        )
        assert result.exit_code == 0
        out2 = tmp_path / "res2.csv"
        runner.invoke(main, ["solve", "--seed", "2", "--out", str(out2)])
        assert read_csv(str(out)) == read_csv(str(out2))

    def test_baseline_algorithms_run(self, runner, tmp_path):
        # seed 3 admits a feasible association for both heuristics
        for alg in ("doa", "ema"):
            out = tmp_path / f"{alg}.csv"
            result = runner.invoke(
                main, ["solve", "--seed", "3", "--algorithm", alg, "--out", str(out)]
            )
            assert result.exit_code == 0
            fields = long_fields(read_csv(str(out)))
            assert fields["algorithm"][0][1] == alg
            assert fields["iterations"][0][1] == "0"

    def test_usage_errors_exit_2(self, runner, tmp_path):
        out = tmp_path / "res.csv"
        bad_alpha = runner.invoke(main, ["solve", "--alpha", "1.5", "--out", str(out)])
        assert bad_alpha.exit_code == 2
        bad_eps = runner.invoke(
            main, ["solve", "--epsilon", "-1", "--out", str(out)]
        )
        assert bad_eps.exit_code == 2
        bad_alg = runner.invoke(
            main, ["solve", "--algorithm", "nope", "--out", str(out)]
        )
        assert bad_alg.exit_code == 2

    def test_corrupt_instance_exits_2(self, runner, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("not an instance\n")
        result = runner.invoke(
            main, ["solve", "--instance", str(path), "--out", str(tmp_path / "o.csv")]
        )
        assert result.exit_code == 2

    def test_infeasible_instance_exits_3(self, runner, tmp_path):
        # shrink every SBS's power budget until no association is feasible
        inst = scn.generate(scn.desk_scale(), 0)
        text = scn.dumps(inst)
        lines = text.splitlines()
        k = lines.index("[matrix max_power_w 3 1]")
        for t in range(k + 1, k + 4):
            lines[t] = "1e-12"
        path = tmp_path / "inst.txt"
        path.write_text("\n".join(lines) + "\n")
        result = runner.invoke(
            main,
            ["solve", "--instance", str(path), "--out", str(tmp_path / "o.csv")],
        )
        assert result.exit_code == 3


class TestSweepAlpha:
    def test_oracle_sweep_schema_and_pareto(self, runner, tmp_path):
        out = tmp_path / "sweep.csv"
        result = runner.invoke(
            main,
            ["sweep-alpha", "--seed", "0", "--grid", "0,0.5,1", "--out", str(out)],
        )
        assert result.exit_code == 0
        rows = read_csv(str(out))
        assert rows[0] == [
            "alpha", "replication", "energy_joules", "delay_seconds", "weighted"
        ]
        assert len(rows) == 4
        energies = [float(r[2]) for r in rows[1:]]
        delays = [float(r[3]) for r in rows[1:]]
        assert energies == sorted(energies, reverse=True)
        assert delays == sorted(delays)

    def test_ucwt_matches_oracle_sweep(self, runner, tmp_path):
        outs = {}
        for alg in ("oracle", "ucwt"):
            out = tmp_path / f"{alg}.csv"
            result = runner.invoke(
                main,
                ["sweep-alpha", "--seed", "1", "--algorithm", alg,
                 "--grid", "0,1", "--out", str(out)],
            )
            assert result.exit_code == 0
            outs[alg] = read_csv(str(out))
        for a, b in zip(outs["oracle"][1:], outs["ucwt"][1:]):
            assert float(a[4]) == pytest.approx(float(b[4]), rel=1e-6)

    def test_replications_use_distinct_seeds(self, runner, tmp_path):
        out = tmp_path / "sweep.csv"
        result = runner.invoke(
            main,
            ["sweep-alpha", "--grid", "0.5", "--replications", "2",
             "--out", str(out)],
        )
        assert result.exit_code == 0
        rows = read_csv(str(out))
        assert [r[1] for r in rows[1:]] == ["0", "1"]
        assert rows[1][2] != rows[2][2]

    def test_bad_grid_exits_2(self, runner, tmp_path):
        result = runner.invoke(
            main, ["sweep-alpha", "--grid", "0.5,nope", "--out", str(tmp_path / "o")]
        )
        assert result.exit_code == 2


class TestCompareCaching:
    def test_schema_and_hit_ratio_ordering(self, runner, tmp_path):
        out = tmp_path / "caching.csv"
        result = runner.invoke(
            main,
            ["compare-caching", "--seeds", "3", "--capacity-grid", "0.25,1.0",
             "--out", str(out)],
        )
        assert result.exit_code == 0
        rows = read_csv(str(out))
        assert rows[0] == [
            "policy", "capacity_fraction", "seed", "hit_ratio",
            "energy_joules", "delay_seconds",
        ]
        table = {(r[0], r[1], r[2]): float(r[3]) for r in rows[1:]}
        for frac in ("0.25", "1"):
            for s in ("0", "1", "2"):
                assert table[("lpf", frac, s)] >= table[("gpc", frac, s)] - 1e-12
                assert table[("lpf", frac, s)] >= table[("rc", frac, s)] - 1e-12
        # full capacity: every policy caches everything
        for policy in ("lpf", "gpc", "rc"):
            for s in ("0", "1", "2"):
                assert table[(policy, "1", s)] == pytest.approx(1.0)


class TestCompareAlgorithms:
    def test_users_sweep_schema(self, runner, tmp_path):
        out = tmp_path / "algos.csv"
        result = runner.invoke(
            main,
            ["compare-algorithms", "--seeds", "2", "--grid", "4,5",
             "--out", str(out)],
        )
        assert result.exit_code == 0
        rows = read_csv(str(out))
        assert rows[0] == [
            "sweep", "value", "seed", "algorithm", "energy_joules",
            "delay_seconds",
        ]
        assert {r[0] for r in rows[1:]} == {"users"}
        assert {r[3] for r in rows[1:]} <= {"ucwt", "doa", "ema"}
        # ucwt rows must exist for every (value, seed) cell
        cells = {(r[1], r[2]) for r in rows[1:] if r[3] == "ucwt"}
        assert len(cells) == 4

    def test_sampled_backhaul_is_deterministic(self, runner, tmp_path):
        args = [
            "compare-algorithms", "--seeds", "1", "--grid", "4",
            "--sample-backhaul", "--samples", "50",
        ]
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            result = runner.invoke(main, args + ["--out", str(out)])
            assert result.exit_code == 0
            outs.append(read_csv(str(out)))
        assert outs[0] == outs[1]
        assert outs[0][0][-1] == "sampled_delay_seconds"
