# app/services/campaigns.py

"""
campaigns.py: Running Configuration Documents and Writing Their Artifacts

run_document dispatches a ConfigDocument to the Monte-Carlo service according to
``experiment.kind``. write_artifacts then emits the two campaign artifacts:

    <name>.csv   one row per trial: experiment, n, p, trial_index, statistic,
                 value, conditioned, wall_ms
    <name>.json  package version, the resolved document, per-point summaries and
                 one section per analysis (smin_tail_curve, zero_row, ...)

Floats in the CSV use repr (shortest round-trip), so a rerun of the same document
with timings off produces identical bytes.
"""

import csv
import io
import json
import logging
from dataclasses import (
    dataclass,
    field
)
from pathlib import Path
from typing import (
    Optional,
    Union
)

from pydantic import BaseModel

from app import __version__
from app.core.exceptions import LabIOError
from app.schemas.config import ConfigDocument
from app.schemas.experiment import (
    ExperimentResult,
    TrialRecord
)
from app.services import montecarlo

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("experiment", "n", "p", "trial_index", "statistic", "value", "conditioned", "wall_ms")


@dataclass
class CampaignOutcome:
    document: ConfigDocument
    result: Optional[ExperimentResult] = None
    sections: dict[str, BaseModel] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.document.experiment.name

    @property
    def records(self) -> list[TrialRecord]:
        return self.result.records if self.result is not None else []


def run_document(document: ConfigDocument, threads: Optional[int] = None) -> CampaignOutcome:
    """Run the experiment a document describes.

    Args:
        document: A validated ConfigDocument.
        threads: Overrides ``experiment.threads`` when given.

    Returns:
        CampaignOutcome: The raw campaign (None for distance_lemma) and its analysis sections.

    Raises:
        LabError: On invalid parameters; per-trial failures are recorded instead.
    """
    e = document.experiment
    threads = threads if threads is not None else e.threads
    outcome = CampaignOutcome(document=document)
    logger.info("Running %s (%s)", e.name, e.kind)

    if e.kind == "campaign":
        outcome.result = montecarlo.run_experiment(document.experiment_spec(), threads)
    elif e.kind == "tail_curve":
        spec = document.experiment_spec().model_copy(update={"statistic": "s_min"})
        outcome.result = montecarlo.run_experiment(spec, threads)
        outcome.sections["smin_tail_curve"] = montecarlo.smin_tail_curve(spec, e.eps_grid, outcome.result)
    elif e.kind == "zero_row":
        spec = document.experiment_spec().model_copy(update={"statistic": "zero_row"})
        outcome.result = montecarlo.run_experiment(spec, threads)
        outcome.sections["zero_row"] = montecarlo.zero_row_report(outcome.result)
    elif e.kind in ("norm_scan", "condition_scan"):
        ensemble = document.ensemble_spec()
        norm = e.kind == "norm_scan"
        report, outcome.result = montecarlo.run_scan(
            "s_max" if norm else "cond",
            ensemble.dist,
            e.alpha,
            e.n_grid,
            e.trials,
            e.master_seed,
            threads,
            transform=montecarlo.normalized_norm if norm else montecarlo.normalized_condition,
            diagonal=ensemble.diagonal,
            shift_value=ensemble.shift[0] if ensemble.shift else None,
            name=e.name,
        )
        if not report.moment_ok:
            logger.warning("%s: E|xi|^q is infinite for q=%g", e.name, report.q)
        outcome.sections[e.kind] = report
    else:
        outcome.sections["distance_lemma"] = montecarlo.distance_lemma_check(
            document.ensemble_spec(),
            e.trials,
            e.master_seed,
            eps_grid=e.eps_grid,
            rho=e.rho,
            M=e.M,
            threads=threads,
        )
    return outcome


def records_to_csv(records: list[TrialRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow({
            "experiment": record.experiment,
            "n": record.n,
            "p": repr(record.p),
            "trial_index": record.trial_index,
            "statistic": record.statistic,
            "value": repr(record.value),
            "conditioned": "true" if record.conditioned else "false",
            "wall_ms": repr(record.wall_ms),
        })
    return buffer.getvalue()


def outcome_document(outcome: CampaignOutcome) -> dict:
    """The JSON artifact as a plain dict; infinities appear as "inf"."""
    payload = {
        "version": __version__,
        "config": outcome.document.model_dump(mode="json"),
    }
    if outcome.result is not None:
        payload["spec"] = outcome.result.spec.model_dump(mode="json")
        payload["summaries"] = [point.model_dump(mode="json") for point in outcome.result.points]
        payload["failures"] = sum(1 for record in outcome.records if record.error is not None)
    for name, section in outcome.sections.items():
        payload[name] = section.model_dump(mode="json")
    return payload


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise LabIOError(f"cannot write {path}: {e}") from e


def write_artifacts(outcome: CampaignOutcome, out_dir: Union[str, Path]) -> list[Path]:
    """Write <name>.csv and <name>.json into ``out_dir``.

    Raises:
        LabIOError: If the directory or a file cannot be written.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise LabIOError(f"cannot create {out}: {e}") from e
    csv_path = out / f"{outcome.name}.csv"
    json_path = out / f"{outcome.name}.json"
    _write(csv_path, records_to_csv(outcome.records))
    _write(json_path, json.dumps(outcome_document(outcome), ensure_ascii=False, indent=2) + "\n")
    logger.info("Wrote %s and %s", csv_path, json_path)
    return [csv_path, json_path]


def write_failure_marker(out_dir: Union[str, Path], name: str, error: BaseException) -> Optional[Path]:
    """Best-effort <name>.FAILED marker; returns None when even that cannot be written."""
    path = Path(out_dir) / f"{name}.FAILED"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(f"{type(error).__name__}: {error}\n", encoding="utf-8")
    except OSError as e:
        logger.error("Could not write failure marker %s: %s", path, e)
        return None
    return path
