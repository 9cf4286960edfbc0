import math
from fractions import Fraction

import pytest

from skalab.cli import main
from skalab.profiles import format_profile
from skalab.protocols import SessionConfig
from skalab.runner import ExperimentPlan, run_plan, summarize, sweep_configs
from skalab.sources import analytic_profile, ceil_log2, parse_model_spec


def make_plan(tmp_path, spec="identical:n=12", protocol="light", trials=5, seed=9):
    config = SessionConfig(parse_model_spec(spec), protocol, Fraction(1, 16), seed)
    return ExperimentPlan(
        (config,),
        trials,
        seed,
        csv_path=str(tmp_path / "trials.csv"),
        summary_path=str(tmp_path / "summary.txt"),
    )


def test_run_plan_csv_columns(tmp_path):
    plan = make_plan(tmp_path)
    out = run_plan(plan)
    lines = out["csv"].strip().splitlines()
    assert lines[0] == "trial,agreed,key_len,comm_bits,target_key_len,target_comm,decode_status"
    assert len(lines) == 6
    assert (tmp_path / "trials.csv").read_text() == out["csv"]
    assert "agreement_rate=1.0" in (tmp_path / "summary.txt").read_text()


def test_run_plan_replay_byte_identical(tmp_path):
    a = run_plan(make_plan(tmp_path))["csv"]
    b = run_plan(make_plan(tmp_path))["csv"]
    assert a == b


def test_empty_plan(tmp_path):
    plan = ExperimentPlan((), 10, 0, csv_path=str(tmp_path / "e.csv"))
    out = run_plan(plan)
    assert out["summaries"] == []
    assert (tmp_path / "e.csv").read_text().strip().splitlines()[0].startswith("trial,")


def test_sweep_hamming_message_length_tracks_entropy_bound():
    """Sweeping t at n=31: reconciliation payload follows ceil(h(t/31)*31)
    within the log-binomial-vs-entropy slack (<= 2.5 bits here)."""
    configs = sweep_configs(
        "hamming:n=31,t=1", None, [1, 2, 3], [Fraction(1, 16)], "light", seed=3
    )
    assert len(configs) == 3
    plan = ExperimentPlan(tuple(configs), 20, 3)
    out = run_plan(plan)
    for t, summary in zip([1, 2, 3], out["summaries"]):
        d = t / 31
        h_bits = 31 * (d * math.log2(1 / d) + (1 - d) * math.log2(1 / (1 - d)))
        k = ceil_log2(math.comb(31, t))
        payload = float(summary["mean_payload_bits"]) - 4  # minus check bits
        assert payload == k
        assert abs(k - math.ceil(h_bits)) <= 2.5
        assert float(summary["agreement_rate"]) >= 0.9


def test_sweep_csv_has_config_columns():
    configs = sweep_configs("identical:n=8", [8, 10], None, [Fraction(1, 4)], "light", 1)
    out = run_plan(ExperimentPlan(tuple(configs), 2, 1))
    header = out["csv"].splitlines()[0]
    assert header.startswith("model,protocol,eps,trial,")
    assert "identical:n=10" in out["csv"]


def test_summarize_fields():
    config = SessionConfig(parse_model_spec("identical:n=8"), "light", Fraction(1, 4), 2)
    from skalab.runner import run_trials

    s = summarize(config, run_trials(config, 4))
    assert s["model"] == "identical:n=8" and s["trials"] == 4
    assert s["eps"] == "1/4"


# ---------------------------------------------------------
# CLI
# ---------------------------------------------------------

def test_cli_simulate(tmp_path, capsys):
    out = tmp_path / "sim.csv"
    rc = main(
        [
            "simulate",
            "--model", "line-point:n=12",
            "--protocol", "light",
            "--eps", "1/64",
            "--trials", "50",
            "--seed", "5",
            "--out", str(out),
        ]
    )
    assert rc == 0
    text = out.read_text()
    assert text.splitlines()[0].startswith("trial,")
    assert len(text.strip().splitlines()) == 51
    assert "agreement=" in capsys.readouterr().err


def test_cli_rates(tmp_path, capsys):
    profile_file = tmp_path / "triple.profile"
    profile_file.write_text(format_profile(analytic_profile(parse_model_spec("triple:n=16"))))
    rc = main(["rates", "--profile", str(profile_file)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "CO = 72" in out
    assert "rates = (24, 24, 24)" in out
    assert "key_capacity = 8" in out
    assert "CO_closed_form = 72" in out


def test_cli_audit(tmp_path):
    report = tmp_path / "audit.txt"
    rc = main(
        [
            "audit",
            "--model", "identical:n=8",
            "--protocol", "light",
            "--eps", "1/4",
            "--trials", "3000",
            "--seed", "12",
            "--report", str(report),
        ]
    )
    text = report.read_text()
    assert "est_tv=" in text and "leakage_bits=" in text
    assert rc in (0, 1)  # pass depends on the fixed seed's hash rank


def test_cli_sweep(tmp_path):
    out = tmp_path / "sweep.csv"
    summary = tmp_path / "sweep.txt"
    rc = main(
        [
            "sweep",
            "--model", "hamming:n=15,t=1",
            "--protocol", "light",
            "--t", "1", "2",
            "--eps-list", "1/16",
            "--trials", "10",
            "--seed", "4",
            "--out", str(out),
            "--summary", str(summary),
            "--quiet",
        ]
    )
    assert rc == 0
    assert len(out.read_text().strip().splitlines()) == 21
    assert len(summary.read_text().strip().splitlines()) == 2


def test_cli_config_file(tmp_path, capsys):
    conf = tmp_path / "flags.conf"
    conf.write_text(
        "simulate\n--model\nidentical:n=8\n--protocol\nlight\n--eps\n1/4\n--trials\n5\n--quiet\n"
    )
    rc = main([f"@{conf}"])
    assert rc == 0
    assert capsys.readouterr().out.startswith("trial,")


def test_cli_rejects_bad_eps():
    with pytest.raises(SystemExit):
        main(["simulate", "--model", "identical:n=8", "--protocol", "light", "--eps", "x"])
