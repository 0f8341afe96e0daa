# app/cli.py

"""
cli.py: Command Line Front End

Subcommands:
    gen         sample one matrix of the configured ensemble into a coordinate file
    spectral    print the SpectralSummary of a matrix file as JSON
    experiment  run a configured (or preset) experiment and write <name>.csv / <name>.json
    lcd         print the grid-certified LCD of a vector file and its lower bounds as JSON
    serve       start the HTTP service

Logs go to stderr; stdout carries only JSON. The exit status is 0 on success and
the ``exit_code`` of the LabError otherwise (2 validation, 3 I/O, 4 non-convergence).
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import (
    Optional,
    Sequence
)

from pydantic import (
    BaseModel,
    ValidationError
)
from sqlalchemy.exc import SQLAlchemyError

from app import __version__
from app.core.config import settings
from app.core.exceptions import (
    ConfigError,
    LabError,
    LabIOError
)
from app.schemas.config import (
    ConfigDocument,
    describe_defaults
)
from app.schemas.ensemble import SeedSpec
from app.services.campaigns import (
    CampaignOutcome,
    run_document,
    write_artifacts,
    write_failure_marker
)
from app.services.ensemble import sample_matrix
from app.services.geometry import (
    coerce_unit_vector,
    lcd_report
)
from app.services.presets import (
    PRESETS,
    load_preset
)
from app.services.spectral import spectral_summary
from app.utils.matrix_io import (
    read_matrix,
    read_vector,
    write_matrix
)

logger = logging.getLogger(__name__)


def _emit(model: BaseModel, config: dict) -> None:
    """Print ``model`` as JSON next to the package version and the resolved configuration."""
    payload = {"version": __version__, "config": config}
    payload.update(model.model_dump(mode="json"))
    sys.stdout.write(json.dumps(payload, ensure_ascii=False, indent=2) + "\n")


def _load_document(args: argparse.Namespace) -> ConfigDocument:
    if args.config and args.preset:
        raise ConfigError("--config and --preset are mutually exclusive")
    if args.preset:
        document = load_preset(args.preset)
    elif args.config:
        document = ConfigDocument.load(args.config)
    else:
        document = ConfigDocument()
    return document.with_overrides(
        seed=args.seed,
        threads=getattr(args, "threads", None),
        trials=getattr(args, "trials", None),
    )


def cmd_gen(args: argparse.Namespace) -> int:
    document = _load_document(args)
    seed = SeedSpec(master_seed=document.experiment.master_seed, trial_index=args.trial)
    m = sample_matrix(document.ensemble_spec(), seed)
    write_matrix(m, args.out)
    logger.info("Wrote %dx%d matrix with %d nonzeros to %s", m.rows, m.cols, m.nnz, args.out)
    return 0


def cmd_spectral(args: argparse.Namespace) -> int:
    m = read_matrix(args.matrix)
    m.require_finite()
    config = {"matrix": str(args.matrix), "method": args.method, "tol": args.tol}
    _emit(spectral_summary(m, args.method, args.tol), config)
    return 0


def cmd_lcd(args: argparse.Namespace) -> int:
    document = _load_document(args)
    params = document.lcd_params(args.p)
    update = {
        key: value
        for key, value in (("delta0", args.delta0), ("theta_max", args.theta_max), ("grid_step", args.grid_step))
        if value is not None
    }
    params = params.model_copy(update=update)
    x = coerce_unit_vector(read_vector(args.vector))
    config = document.model_dump(mode="json")
    config["lcd"] = params.model_dump(mode="json")
    _emit(lcd_report(x, params), config)
    return 0


def _archive(outcome: CampaignOutcome) -> None:
    from app.crud.campaign import CampaignRepository
    from app.db import (
        SessionLocal,
        init_db
    )

    try:
        init_db()
        with SessionLocal() as session:
            campaign = CampaignRepository(session).create_campaign(outcome.result)
    except SQLAlchemyError as e:
        raise LabIOError(f"archiving {outcome.name} failed: {e}") from e
    logger.info("Archived %s as campaign %d", outcome.name, campaign.id)


def cmd_experiment(args: argparse.Namespace) -> int:
    document = _load_document(args)
    name = document.experiment.name
    outcome: Optional[CampaignOutcome] = None
    try:
        outcome = run_document(document)
        write_artifacts(outcome, args.out)
        if document.output.archive and outcome.result is not None:
            _archive(outcome)
    except LabError as e:
        if outcome is not None:
            try:
                write_artifacts(outcome, args.out)
            except LabError:
                logger.error("Partial results of %s could not be written", name)
        write_failure_marker(args.out, name, e)
        raise
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("app.main:app", host=args.host, port=args.port, log_level=args.log_level.lower())
    return 0


def _add_document_flags(parser: argparse.ArgumentParser, campaign: bool = False) -> None:
    parser.add_argument("--config", type=Path, help="TOML configuration document")
    parser.add_argument("--preset", choices=sorted(PRESETS), help="Built-in configuration document")
    parser.add_argument("--seed", type=int, help="Master seed, overrides experiment.master_seed")
    if campaign:
        parser.add_argument("--threads", type=int, help="Worker threads, 0 = one per CPU")
        parser.add_argument("--trials", type=int, help="Trials per point, overrides experiment.trials")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m app",
        description="Sparse random-matrix laboratory.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="Logging level (default: %(default)s)")
    commands = parser.add_subparsers(dest="command", required=True)

    defaults = "configuration keys and defaults:\n" + describe_defaults()

    gen = commands.add_parser(
        "gen",
        help="Sample one matrix into a coordinate file",
        epilog=defaults,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    _add_document_flags(gen)
    gen.add_argument("--trial", type=int, default=0, help="Trial index of the sample (default: %(default)s)")
    gen.add_argument("--out", type=Path, required=True, help="Output matrix file")
    gen.set_defaults(handler=cmd_gen)

    spectral = commands.add_parser("spectral", help="Print the spectral summary of a matrix file")
    spectral.add_argument("matrix", type=Path, help="Coordinate-format matrix file")
    spectral.add_argument("--method", choices=("iterative", "full_svd"), default="iterative")
    spectral.add_argument("--tol", type=float, default=1e-10, help="Iterative tolerance (default: %(default)s)")
    spectral.set_defaults(handler=cmd_spectral)

    experiment = commands.add_parser(
        "experiment",
        help="Run an experiment and write CSV and JSON artifacts",
        epilog=defaults,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    _add_document_flags(experiment, campaign=True)
    experiment.add_argument("--out", type=Path, default=Path("."), help="Artifact directory (default: %(default)s)")
    experiment.set_defaults(handler=cmd_experiment)

    lcd = commands.add_parser(
        "lcd",
        help="Print the LCD of a unit vector file",
        epilog=defaults,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    _add_document_flags(lcd)
    lcd.add_argument("vector", type=Path, help="One value per line")
    lcd.add_argument("--p", type=float, help="Sparsity, overrides lcd.p and ensemble.p")
    lcd.add_argument("--delta0", type=float, help="LCD level delta_0")
    lcd.add_argument("--theta-max", type=float, help="Search cap")
    lcd.add_argument("--grid-step", type=float, help="Coarse grid step")
    lcd.set_defaults(handler=cmd_lcd)

    serve = commands.add_parser("serve", help="Start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=args.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except LabError as e:
        logger.error("%s", e)
        return e.exit_code
    except ValidationError as e:
        logger.error("invalid parameters: %s", json.dumps(e.errors(include_url=False), default=str))
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
