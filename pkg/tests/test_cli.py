import subprocess
import sys

import numpy as np
import pytest
from click.testing import CliRunner

from permix import reporting
from permix.cli import main
from permix.concentration import save_matrix_csv


@pytest.fixture()
def runner():
    return CliRunner()


def run_ok(runner, args):
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    return result.output


def test_mixing_random_triple_json(runner):
    out = run_ok(runner, ["mixing", "--n", "5", "--parity", "even",
                          "--random-triple", "--density", "0.3", "--seed", "7"])
    for key in ('"total"', '"main"', '"gowers_bound"', '"threshold_margin"'):
        assert key in out


def test_construct_kedlaya_example(runner):
    out = run_ok(runner, ["construct", "kedlaya", "--n", "6", "--t", "2",
                          "--check-product-free"])
    assert '"sn_density": "1/5"' in out
    assert '"product_free": true' in out


def test_inequality_cll_example(runner):
    out = run_ok(runner, ["inequality", "cll", "--n", "5", "--trials", "100", "--seed", "1"])
    assert '"violations": 0' in out


def test_threshold_command(runner):
    out = run_ok(runner, ["threshold", "--alpha", "1", "--beta", "1", "--gamma", "1", "--n", "100"])
    assert '"summary_margin"' in out


def test_concentration_matrix_roundtrip(runner, tmp_path):
    path = tmp_path / "m.csv"
    save_matrix_csv(path, np.array([[1.0, -1.0], [-1.0, 1.0]]))
    out = run_ok(runner, ["concentration", "tail", "--matrix", str(path),
                          "--t", "1.0", "--rational", "--no-center"])
    assert '"rational_mass_is_one": true' in out
    out = run_ok(runner, ["concentration", "moments", "--matrix", str(path), "--lam", "0.1"])
    assert '"exact": 1.02006675562' in out


def test_concentration_dyadic_and_deficit(runner):
    out = run_ok(runner, ["concentration", "dyadic", "--n", "500", "--seed", "3"])
    assert '"reconstruction_l1_error"' in out
    out = run_ok(runner, ["concentration", "deficit", "--n", "4", "--seed", "2",
                          "--trials", "2", "--format", "csv"])
    assert out.splitlines()[0] == "n,alpha,beta,gamma,deficit,term1,term2,ratio"


def test_inequality_extremal(runner):
    out = run_ok(runner, ["inequality", "extremal", "--regime", "low",
                          "--beta", "0.5", "--t", "0.005", "--delta", "0.25"])
    assert '"construction_diff": 0' in out or '"construction_diff"' in out


def test_surplus_exact_and_mc(runner):
    out = run_ok(runner, ["construct", "surplus", "--n", "6", "--t", "2"])
    assert '"excess"' in out
    out = run_ok(runner, ["mixing", "--n", "30", "--family", "surplus", "--t", "4",
                          "--monte-carlo", "--samples", "5000", "--seed", "2",
                          "--parity", "all"])
    assert '"excess_ci95"' in out


def test_mixing_family_exact_path(runner):
    out = run_ok(runner, ["mixing", "--n", "5", "--parity", "even",
                          "--family", "kedlaya", "--t", "1"])
    assert '"total": 0' in out  # product-free: no solutions at all
    out = run_ok(runner, ["mixing", "--n", "5", "--parity", "even",
                          "--family", "surplus", "--t", "2"])
    assert '"method": "exact"' in out


def test_remaining_inequality_paths(runner):
    out = run_ok(runner, ["inequality", "hadamard", "--n", "4", "--trials", "50", "--seed", "1"])
    assert '"violations": 0' in out
    out = run_ok(runner, ["inequality", "subadditivity", "--n", "4", "--trials", "50", "--seed", "1"])
    assert '"violations": 0' in out
    out = run_ok(runner, ["inequality", "extremal", "--regime", "high",
                          "--beta", "0.3", "--t", "0.3", "--delta", "0.1"])
    assert '"weak_bound"' in out


def test_concentration_tail_random_matrix(runner):
    out = run_ok(runner, ["concentration", "tail", "--random-n", "4", "--seed", "9",
                          "--t", "0.5", "--t", "2.0"])
    assert '"fitted_c"' in out and '"centered": true' in out


def test_usage_errors_exit_2(runner):
    assert runner.invoke(main, ["mixing", "--n", "5"]).exit_code == 2
    assert runner.invoke(main, ["mixing"]).exit_code == 2
    assert runner.invoke(main, ["construct", "kedlaya", "--n", "6", "--t", "3"]).exit_code == 2
    assert (
        runner.invoke(
            main, ["mixing", "--n", "5", "--parity", "all", "--random-triple", "--seed", "1"]
        ).exit_code
        == 2
    )  # missing --m outside A_n


def test_budget_exit_3(runner, tmp_path):
    result = runner.invoke(
        main,
        ["construct", "surplus", "--n", "9", "--t", "3", "--parity", "even"],
    )
    assert result.exit_code == 3


def test_byte_determinism_across_runs_and_threads(runner, tmp_path):
    cases = [
        ["mixing", "--n", "5", "--parity", "even", "--random-triple",
         "--density", "0.4", "--seed", "11"],
        ["construct", "surplus", "--n", "6", "--t", "2"],
        ["fourier", "--n", "4", "--parity", "all", "--seed", "3", "--triples", "5"],
    ]
    for case in cases:
        outs = []
        for threads in ("1", "8", "1"):
            path = tmp_path / f"out_{threads}_{len(outs)}.json"
            args = case + ["--threads", threads, "--output", str(path)]
            res = runner.invoke(main, args)
            assert res.exit_code == 0, res.output
            outs.append(path.read_bytes())
        assert outs[0] == outs[1] == outs[2]


def test_timing_flag_embeds_runtime(runner):
    out = run_ok(runner, ["threshold", "--alpha", "0.5", "--beta", "0.5",
                          "--gamma", "0.5", "--n", "10", "--timing"])
    assert '"runtime_seconds"' in out


def test_csv_format_stable_columns(runner, tmp_path):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (p1, p2):
        res = runner.invoke(main, ["mixing", "--n", "4", "--parity", "even",
                                   "--random-triple", "--seed", "5",
                                   "--format", "csv", "--output", str(path)])
        assert res.exit_code == 0
    assert p1.read_bytes() == p2.read_bytes()
    header = p1.read_text().splitlines()[0]
    assert header.startswith("n,parity,method,alpha,beta,gamma,total")


def test_render_csv_header_only():
    assert reporting.render_csv([], ["a", "b"]) == "a,b\n"


def test_render_json_formats():
    from fractions import Fraction

    text = reporting.render_json({"x": 1.0 / 3.0, "q": Fraction(1, 5), "nanv": float("nan")})
    assert '"x": 0.333333333333' in text
    assert '"q": "1/5"' in text
    assert '"nanv": null' in text


def test_cli_entrypoint_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "permix.cli", "--version"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "0.1.0" in proc.stdout
