"""``bounded-effects`` command line.

Exit codes: 0 success, 1 I/O failure, 2 invalid data or configuration,
3 estimation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import warnings
from typing import Optional, Sequence

from . import __version__
from .bounds import naive_cic, naive_did, selection_did
from .dataset import load_csv, load_schema, parse_directions, validate
from .errors import BoundedEffectsError, DataError, EstimationError, InvalidConfig
from .inference import Estimator, bootstrap, confidence_interval, pointwise_intervals
from .simulate import coverage_study, load_config

EXIT_OK, EXIT_IO, EXIT_DATA, EXIT_ESTIMATION = 0, 1, 2, 3


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _num(x):
    """JSON-safe float (non-finite values become null)."""
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        _atomic_write(out, text)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot write {out}: {exc}") from None


def _dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _load(args, strict=True):
    try:
        schema = load_schema(args.schema)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read schema: {exc}") from None
    except json.JSONDecodeError as exc:
        raise _Fail(EXIT_DATA, f"bad schema file: {exc}") from None
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            ds = load_csv(args.input, schema=schema, strict=strict)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return ds
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read {args.input}: {exc}") from None


# ------------------------------------------------------------------ estimate


def _bounds_block(ds, estimator, args) -> dict:
    res = estimator.estimate(ds)
    p = res.proportions
    block = {**{k: _num(v) if not isinstance(v, bool) else v for k, v in p.as_dict().items()}}
    block.update(
        bounds={"lb": _num(res.lb), "ub": _num(res.ub)},
        method=res.method,
        estimand=res.estimand,
        n_used=res.n_used,
        clamp_events=res.clamp_events,
    )
    draws = None
    if args.bootstrap > 0:
        draws = bootstrap(ds, estimator, args.bootstrap, args.seed)
        ci = confidence_interval(res, draws.sigmas(), alpha=args.alpha, n_boot=args.bootstrap, seed=args.seed)
        block["ci"] = {"lo": _num(ci.lo), "hi": _num(ci.hi), "z_alpha": _num(ci.z_alpha), "alpha": ci.alpha}
        block["sigmas"] = {
            "se_lb": _num(ci.se_lb), "se_ub": _num(ci.se_ub),
            "sigma_lb": _num(ci.sigma_lb), "sigma_ub": _num(ci.sigma_ub),
            "n": ci.n, "n_boot": args.bootstrap, "dropped": draws.dropped,
        }
    else:
        block["ci"] = None
        block["sigmas"] = None
    if res.qtt_table is not None:
        if draws is not None:
            rows = pointwise_intervals(res, draws, args.alpha)
        else:
            rows = [{"q": r.q, "lb": r.lb, "ub": r.ub, "ci_lo": None, "ci_hi": None, "z_alpha": None}
                    for r in res.qtt_table]
        block["qtt_table"] = [{k: _num(v) for k, v in row.items()} for row in rows]
    return block, res


def _config_echo(args, directions, schema) -> dict:
    return {
        "input": os.path.basename(args.input),
        "schema": schema,
        "method": args.method,
        "monotonicity": [d.value for d in directions],
        "grid": args.grid,
        "bootstrap": args.bootstrap,
        "seed": args.seed,
        "alpha": args.alpha,
        "format": args.format,
    }


def _qtt_csv(doc) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["q", "lb", "ub", "ci_lo", "ci_hi"])
    for row in doc["qtt_table"]:
        w.writerow(["" if row[k] is None else repr(row[k]) for k in ("q", "lb", "ub", "ci_lo", "ci_hi")])
    return buf.getvalue()


def cmd_estimate(args) -> int:
    if not 0.5 < args.alpha < 1.0:
        raise _Fail(EXIT_DATA, f"--alpha must lie in (0.5, 1), got {args.alpha}")
    if args.bootstrap < 0 or args.bootstrap == 1:
        raise _Fail(EXIT_DATA, "--bootstrap must be 0 (no interval) or at least 2")
    if args.seed < 0:
        raise _Fail(EXIT_DATA, "--seed must be non-negative")
    if args.format == "csv" and args.method not in ("cic", "both"):
        raise _Fail(EXIT_DATA, "--format csv needs quantile bounds (--method cic or both)")
    if args.grid is not None and args.method not in ("cic", "both", "naive"):
        raise _Fail(EXIT_DATA, "--grid applies to the changes-in-changes methods only")
    grid = args.grid if args.grid is not None else 99
    if grid < 3:
        raise _Fail(EXIT_DATA, "--grid must be at least 3")

    directions = parse_directions(args.monotonicity)
    ds = _load(args)
    schema = load_schema(args.schema)
    ds = ds.with_directions(directions)
    needs_directions = args.method in ("did", "cic", "both")
    if needs_directions:
        if not directions:
            raise _Fail(EXIT_DATA, "--monotonicity is required for bound estimation")
        if len(directions) != ds.n_sources:
            raise _Fail(EXIT_DATA, f"--monotonicity needs {ds.n_sources} direction(s), got {len(directions)}")

    doc = {"config": _config_echo(args, directions, schema), "n_rows": len(ds)}
    if args.method in ("did", "cic"):
        block, _ = _bounds_block(ds, Estimator(args.method, directions, grid), args)
        doc.update(block)
    elif args.method == "both":
        for m in ("did", "cic"):
            block, _ = _bounds_block(ds, Estimator(m, directions, grid), args)
            doc[m] = block
    elif args.method == "naive":
        doc["naive"] = {"did": _num(naive_did(ds)), "cic": _num(naive_cic(ds, grid))}
        doc["n_used"] = ds.n_observed
    else:  # selection-did
        entry = {"overall": _num(selection_did(ds))}
        if ds.explicit_sources:
            entry["sources"] = [_num(selection_did(ds, j)) for j in range(1, ds.n_sources + 1)]
        doc["selection_did"] = entry
        doc["n_used"] = len(ds)

    if args.format == "csv":
        source = doc if args.method == "cic" else doc["cic"]
        _emit(_qtt_csv(source), args.out)
    else:
        _emit(_dumps(doc), args.out)
    return EXIT_OK


# ------------------------------------------------------------------ validate


def cmd_validate(args) -> int:
    ds = _load(args, strict=False)
    problems = validate(ds)
    for v in problems:
        print(str(v))
    return EXIT_OK if not problems else EXIT_DATA


# ------------------------------------------------------------------ simulate


def cmd_simulate(args) -> int:
    try:
        cfg, study = load_config(args.config)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read {args.config}: {exc}") from None
    reps = args.reps if args.reps is not None else study.get("reps", 100)
    seed = args.seed if args.seed is not None else study.get("seed", cfg.seed)
    if reps < 1:
        raise _Fail(EXIT_DATA, f"reps must be positive, got {reps}")
    known = {"reps", "seed", "method", "grid", "n_boot", "alpha", "oracle_n"}
    if set(study) - known:
        raise _Fail(EXIT_DATA, f"unknown [study] keys: {sorted(set(study) - known)}")
    method = study.get("method", "did")
    estimator = Estimator(method, cfg.directions, int(study.get("grid", 99)))
    report = coverage_study(
        cfg, int(reps), estimator,
        alpha=float(study.get("alpha", 0.95)),
        n_boot=int(study.get("n_boot", 199)),
        seed=int(seed),
        oracle_n=int(study.get("oracle_n", 1_000_000)),
    )
    report["study"] = {"reps": int(reps), "seed": int(seed), "method": method,
                       "grid": estimator.grid_size, "n_boot": int(study.get("n_boot", 199)),
                       "alpha": float(study.get("alpha", 0.95)),
                       "oracle_n": int(study.get("oracle_n", 1_000_000))}
    _emit(_dumps(_jsonable(report)), args.out)
    return EXIT_OK


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float):
        return _num(obj)
    if hasattr(obj, "tolist"):
        return _jsonable(obj.tolist())
    return obj


# ------------------------------------------------------------------ entry


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bounded-effects",
        description="Bounds on treatment effects for always-observed units in two-period panels.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate bounds from a panel CSV")
    est.add_argument("--input", required=True, help="panel CSV")
    est.add_argument("--schema", help="column mapping: JSON file or key=column list")
    est.add_argument("--method", default="did", choices=["did", "cic", "both", "naive", "selection-did"])
    est.add_argument("--monotonicity", help="direction per source, e.g. positive or negative,positive")
    est.add_argument("--grid", type=int, help="interior quantile grid size (default 99)")
    est.add_argument("--bootstrap", type=int, default=999, help="replicates; 0 skips the interval")
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--alpha", type=float, default=0.95, help="coverage level")
    est.add_argument("--out", help="output path (default stdout)")
    est.add_argument("--format", default="json", choices=["json", "csv"])
    est.set_defaults(func=cmd_estimate)

    val = sub.add_parser("validate", help="check a panel CSV for broken invariants")
    val.add_argument("--input", required=True)
    val.add_argument("--schema")
    val.set_defaults(func=cmd_validate)

    sim = sub.add_parser("simulate", help="run a coverage study from a TOML config")
    sim.add_argument("--config", required=True)
    sim.add_argument("--reps", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--out")
    sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_DATA if exc.code else EXIT_OK
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (DataError, InvalidConfig) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except EstimationError as exc:
        print(f"estimation failed: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except BoundedEffectsError as exc:  # pragma: no cover - no other subclasses today
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
