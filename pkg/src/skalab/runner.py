"""Experiment plans: sweeps of sessions with CSV and summary outputs.

Outputs are bit-for-bit reproducible from (plan, master seed): all session
randomness derives from named sub-streams of the master seed, and rows are
written in deterministic order.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .protocols import Margins, SessionConfig, run_session
from .sources import CorrelationModel, parse_model_spec

TRIAL_COLUMNS = (
    "trial",
    "agreed",
    "key_len",
    "comm_bits",
    "target_key_len",
    "target_comm",
    "decode_status",
)


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, bool):
        return "1" if value else "0"
    return str(value)


@dataclass(frozen=True)
class ExperimentPlan:
    configs: tuple
    trials: int
    seed: int
    csv_path: str | None = None
    summary_path: str | None = None

    def __post_init__(self) -> None:
        if self.trials < 0:
            raise ValueError("negative trial count")
        for c in self.configs:
            if not isinstance(c, SessionConfig):
                raise ValueError("plan entries must be SessionConfig")


def sweep_configs(
    kind_spec: str,
    ns,
    ts,
    eps_list,
    protocol: str,
    seed: int,
    margins: Margins | None = None,
) -> list:
    """Cross product of the sweep axes as session configs."""
    base = parse_model_spec(kind_spec)
    configs = []
    for n in ns or [base.n]:
        for t in ts or [base.t]:
            model = CorrelationModel(base.kind, n, t if base.kind == "hamming_pair" else 0)
            for eps in eps_list:
                configs.append(SessionConfig(model, protocol, Fraction(eps), seed, margins))
    return configs


def run_trials(config: SessionConfig, trials: int):
    return [run_session(config, t) for t in range(trials)]


def summarize(config: SessionConfig, outcomes) -> dict:
    n = len(outcomes)
    agreed = sum(1 for o in outcomes if o.agreed)
    return {
        "model": config.model.spec_string(),
        "protocol": config.protocol,
        "eps": _fmt(config.eps),
        "trials": n,
        "agreement_rate": agreed / n if n else 0.0,
        "key_len": outcomes[0].key_len if outcomes else 0,
        "target_key_len": _fmt(outcomes[0].target_key_len) if outcomes else 0,
        "mean_comm_bits": sum(o.comm_bits for o in outcomes) / n if n else 0.0,
        "mean_payload_bits": sum(o.payload_bits for o in outcomes) / n if n else 0.0,
        "target_comm": _fmt(outcomes[0].target_comm) if outcomes else 0,
    }


def trial_rows(outcomes, with_config: SessionConfig | None = None):
    for t, o in enumerate(outcomes):
        row = {
            "trial": t,
            "agreed": _fmt(o.agreed),
            "key_len": o.key_len,
            "comm_bits": o.comm_bits,
            "target_key_len": _fmt(o.target_key_len),
            "target_comm": _fmt(o.target_comm),
            "decode_status": o.decode_status,
        }
        if with_config is not None:
            row = {
                "model": with_config.model.spec_string(),
                "protocol": with_config.protocol,
                "eps": _fmt(with_config.eps),
                **row,
            }
        yield row


def run_plan(plan: ExperimentPlan) -> dict:
    """Execute the plan; returns {"csv": str, "summaries": [dict]} and
    writes the files when paths are configured."""
    multi = len(plan.configs) > 1
    columns = (("model", "protocol", "eps") if multi else ()) + TRIAL_COLUMNS
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    summaries = []
    for config in plan.configs:
        outcomes = [run_session(config, t) for t in range(plan.trials)]
        for row in trial_rows(outcomes, config if multi else None):
            writer.writerow(row)
        summaries.append(summarize(config, outcomes))
    csv_text = buf.getvalue()
    if plan.csv_path:
        _write_file(plan.csv_path, csv_text)
    if plan.summary_path:
        lines = []
        for s in summaries:
            lines.append(" ".join(f"{k}={v}" for k, v in s.items()))
        _write_file(plan.summary_path, "\n".join(lines) + "\n" if lines else "")
    return {"csv": csv_text, "summaries": summaries}


def _write_file(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc
