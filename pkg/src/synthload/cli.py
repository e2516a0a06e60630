"""``synthload`` command line: generation, fitting, calibration and validation.

Exit status is 0 on success, 1 on a usage error and 2 on a data error.
"""

from __future__ import annotations

import argparse
import csv
import enum
import json
import logging
import sys
from pathlib import Path

import numpy as np

from synthload import activities, metrics, pipeline
from synthload.config import ConfigError, load_config
from synthload.core import HOURS, PUBLISHED_USES
from synthload.ingest import IngestError, MissingInputs

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class Command(enum.Enum):
    Generate = "generate"
    FitRefrigerator = "fit-refrigerator"
    CalibrateGamma = "calibrate-gamma"
    DistanceMatrix = "distance-matrix"
    ShapeValidate = "shape-validate"
    Summarize = "summarize"


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _k_list(text: str) -> list[int]:
    try:
        ks = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not ks or min(ks) < 1:
        raise argparse.ArgumentTypeError("k values must be positive")
    return ks


def _named_path(text: str) -> tuple[str, Path]:
    name, sep, path = text.partition("=")
    if not sep or not name or not path:
        raise argparse.ArgumentTypeError(f"expected name=path, got {text!r}")
    return name, Path(path)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="synthload", description="Synthetic residential end-use load profiles.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser(Command.Generate.value, help="simulate every household-day and write record files")
    g.add_argument("--config", required=True, type=Path)
    g.add_argument("--seed", required=True, type=int)
    g.add_argument("--workers", type=int)

    f = sub.add_parser(Command.FitRefrigerator.value, help="fit refrigerator coefficients from daily metered data")
    f.add_argument("--data", required=True, type=Path, help="CSV with columns daily_kwh,t_avg_f,zone")
    f.add_argument("--out", required=True, type=Path)
    f.add_argument("--baseline", help="zone whose offset is fixed at zero (default: first zone present)")

    c = sub.add_parser(Command.CalibrateGamma.value, help="bisect the lighting switch-on constant to annual targets")
    c.add_argument("--config", required=True, type=Path)
    c.add_argument("--targets", required=True, type=Path, help='JSON {"<household size>": annual kWh, ...}')
    c.add_argument("--seed", type=int)
    c.add_argument("--dhw-share", type=float, help="also calibrate the bathing probability to this hot-water share")
    c.add_argument("--out", type=Path, help="write a copy of the config with the calibrated values")

    d = sub.add_parser(Command.DistanceMatrix.value, help="pairwise distribution distances between datasets")
    d.add_argument("--metric", required=True, choices=sorted(metrics.METRICS))
    d.add_argument("--enduse", required=True, help="published end-use name or 'total'")
    d.add_argument("--inputs", required=True, nargs="+", type=_named_path, metavar="NAME=PATH")
    d.add_argument("--out", required=True, type=Path)
    d.add_argument("--bins", type=int, default=50)

    s = sub.add_parser(Command.ShapeValidate.value, help="load-shape coverage and closeness of two datasets")
    s.add_argument("--ref", required=True, type=Path)
    s.add_argument("--other", required=True, type=Path)
    s.add_argument("--k", required=True, type=_k_list)
    s.add_argument("--seed", required=True, type=int)
    s.add_argument("--out", required=True, type=Path)
    s.add_argument("--enduse", default="total")
    s.add_argument("--bins", type=int, default=30)

    m = sub.add_parser(Command.Summarize.value, help="per-end-use share table of a record tree")
    m.add_argument("--records", required=True, type=Path)
    return ap


# --- file adapters ------------------------------------------------------------


def _check_enduse(enduse: str) -> None:
    if enduse != "total" and enduse not in PUBLISHED_USES:
        raise UsageError(f"unknown end use {enduse!r}; choose 'total' or one of {', '.join(PUBLISHED_USES)}")


def _record_profiles(root: Path, enduse: str) -> np.ndarray:
    rows = [rec.total if enduse == "total" else rec.profiles[enduse] for rec in pipeline.read_records(root)]
    if not rows:
        raise DataError(f"{root}: no record files found")
    return np.array(rows)


def load_daily_values(path: Path, enduse: str) -> np.ndarray:
    """Daily kWh per household-day from a record tree or a CSV with a column named after the end use."""
    if path.is_dir():
        return _record_profiles(path, enduse).sum(axis=1)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if enduse not in (reader.fieldnames or []):
            raise DataError(f"{path}: no column named {enduse!r}")
        try:
            return np.array([float(r[enduse]) for r in reader])
        except ValueError as exc:
            raise DataError(f"{path}: {exc}") from None


def load_profiles(path: Path, enduse: str) -> np.ndarray:
    """24-hour profiles from a record tree, or a CSV with ``<enduse>_h1..h24`` or ``h1..h24`` columns."""
    if path.is_dir():
        return _record_profiles(path, enduse)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        names = reader.fieldnames or []
        for prefix in (f"{enduse}_", ""):
            cols = [f"{prefix}h{t}" for t in range(1, HOURS + 1)]
            if all(c in names for c in cols):
                break
        else:
            raise DataError(f"{path}: expected columns {enduse}_h1..h24 or h1..h24")
        try:
            return np.array([[float(r[c]) for c in cols] for r in reader])
        except ValueError as exc:
            raise DataError(f"{path}: {exc}") from None


def _share_lines(summary: dict) -> list[str]:
    lines = [f"{'end use':<14}{'kWh':>16}{'share':>10}"]
    for use in PUBLISHED_USES:
        lines.append(f"{use:<14}{summary['totals_kwh'][use]:>16.6f}{summary['by_use'][use]:>10.6f}")
    lines.append("")
    lines.append(f"{'group':<14}{'share':>10}")
    for group, share in summary["composition"].items():
        lines.append(f"{group:<14}{share:>10.6f}")
    return lines


# --- commands -----------------------------------------------------------------


def cmd_generate(args) -> int:
    cfg = load_config(args.config, seed=args.seed, workers=args.workers)
    summary = pipeline.run(cfg)
    print(f"wrote {len(summary['manifest'])} files, {summary['n_records']} records to {cfg.output_root}")
    print(f"dropped events: {summary['dropped_events']}")
    print("\n".join(_share_lines(summary)))
    return EXIT_OK


def cmd_fit_refrigerator(args) -> int:
    samples = []
    with open(args.data, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in ("daily_kwh", "t_avg_f", "zone") if c not in (reader.fieldnames or [])]
        if missing:
            raise DataError(f"{args.data}: missing column(s) {missing}")
        for i, r in enumerate(reader, start=1):
            try:
                samples.append((float(r["daily_kwh"]), float(r["t_avg_f"]), r["zone"].strip()))
            except ValueError as exc:
                raise DataError(f"{args.data}: row {i}: {exc}") from None
    coeffs = activities.fit_refrigerator(samples, baseline=args.baseline)
    args.out.write_text(json.dumps(coeffs.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(json.dumps(coeffs.to_dict(), sort_keys=True))
    return EXIT_OK


def cmd_calibrate_gamma(args) -> int:
    cfg = load_config(args.config, seed=args.seed)
    try:
        targets = json.loads(args.targets.read_text(encoding="utf-8"))
        targets = {int(k): float(v) for k, v in targets.items()}
    except (json.JSONDecodeError, ValueError, AttributeError) as exc:
        raise DataError(f"{args.targets}: expected a JSON object of size -> annual kWh ({exc})") from None
    inputs = pipeline.load_inputs(cfg)
    gam = pipeline.calibrate_gamma(cfg, targets, inputs)
    cfg.sections["lighting"]["gamma"] = gam.gamma
    report = {"gamma": gam.gamma, "lighting_ratio": gam.ratio, "gamma_iterations": gam.iterations}
    if args.dhw_share is not None:
        bath = pipeline.calibrate_bathing(cfg, args.dhw_share, inputs)
        cfg.sections["thermal"]["p_bathe"] = bath.p_bathe
        report.update(p_bathe=bath.p_bathe, dhw_share=bath.dhw_share, bathing_iterations=bath.iterations)
    print(json.dumps(report, sort_keys=True))
    if args.out is not None:
        args.out.write_text(json.dumps(cfg.to_dict(), indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_distance_matrix(args) -> int:
    _check_enduse(args.enduse)
    datasets = {}
    for name, path in args.inputs:
        if name in datasets:
            raise UsageError(f"dataset name {name!r} given twice")
        datasets[name] = load_daily_values(path, args.enduse)
    names, mat = metrics.distance_matrix(datasets, args.metric, args.bins)
    metrics.write_matrix_csv(args.out, names, mat)
    print(f"wrote {len(names)}x{len(names)} {args.metric} matrix to {args.out}")
    return EXIT_OK


def cmd_shape_validate(args) -> int:
    _check_enduse(args.enduse)
    ref = metrics.normalize_shapes(load_profiles(args.ref, args.enduse))
    other = metrics.normalize_shapes(load_profiles(args.other, args.enduse))
    reports = metrics.shape_validate(ref, other, args.k, args.seed, args.bins)
    metrics.write_shape_report(args.out, reports)
    for r in reports:
        print(
            f"k={r.k:<3} coverage {r.coverage_other_on_ref:.3f}/{r.coverage_ref_on_other:.3f}"
            f"  closeness {r.closeness_other_on_ref:.4f}/{r.closeness_ref_on_other:.4f}"
        )
    return EXIT_OK


def cmd_summarize(args) -> int:
    if not args.records.is_dir():
        raise DataError(f"{args.records}: not a directory")
    summary = pipeline.summarize_records(args.records)
    if summary["n_records"] == 0:
        raise DataError(f"{args.records}: no record files found")
    print(f"{summary['n_records']} records")
    print("\n".join(_share_lines(summary)))
    return EXIT_OK


HANDLERS = {
    Command.Generate: cmd_generate,
    Command.FitRefrigerator: cmd_fit_refrigerator,
    Command.CalibrateGamma: cmd_calibrate_gamma,
    Command.DistanceMatrix: cmd_distance_matrix,
    Command.ShapeValidate: cmd_shape_validate,
    Command.Summarize: cmd_summarize,
}

DATA_ERRORS = (
    DataError,
    ConfigError,
    IngestError,
    MissingInputs,
    pipeline.SimulationError,
    activities.SingularDesign,
    metrics.EmptySamples,
    metrics.KTooLarge,
    metrics.ZeroTotal,
    OSError,
    ValueError,
)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return HANDLERS[Command(args.command)](args)
    except UsageError as exc:
        print(f"synthload {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DATA_ERRORS as exc:
        print(f"synthload {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
