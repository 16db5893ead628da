"""Command-line entry point.

Exit codes: 0 success, 2 validation or usage failure, 1 internal error.
Failures print one machine-readable line `ERR<TAB>code<TAB>detail` to stderr.
Identical (argv, seed, inputs) produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import glob
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import growth, numeffects, numline, oddoneout, oracle, reportio, stimgen
from .core import DEFAULT_EPOCH_AGE_MAP
from .errors import DevAlignError, FormatError
from .store import read_store


def _thread_count() -> int:
    raw = os.environ.get("DEVALIGN_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise FormatError(f"DEVALIGN_THREADS must be an integer, got {raw!r}")


def _map_fn(threads: int):
    if threads <= 1:
        return map
    pool = ThreadPoolExecutor(max_workers=threads)
    return pool.map  # order-preserving


def _load_stores(pattern: str) -> list:
    paths = sorted(p for p in glob.glob(pattern) if os.path.isdir(p))
    if not paths:
        raise FormatError(f"no store directories match {pattern!r}")
    stores = [read_store(p) for p in paths]
    stores.sort(key=lambda s: s.manifest.epoch)
    return stores


def _sibling_csv(json_path: str) -> str:
    stem, ext = os.path.splitext(json_path)
    return (stem if ext else json_path) + ".csv"


def _cmd_gen_stimuli(args) -> int:
    params = stimgen.SetParams(
        set=args.set, replicates_per_cell=args.replicates, rng_seed=args.seed
    )
    entries = stimgen.generate_corpus(params, args.out)
    meta = {
        "header": reportio.report_header(
            args.seed,
            {"command": "gen-stimuli", "set": args.set, "replicates": args.replicates},
        ),
        "set": args.set,
        "replicates_per_cell": args.replicates,
        "area_levels_px": list(params.area_levels_px),
        "perimeter_levels_px": list(params.perimeter_levels_px),
        "count": len(entries),
    }
    reportio.write_json_report(os.path.join(args.out, "gen_meta.json"), meta)
    print(f"OK\tgen-stimuli\t{len(entries)} rasters in {args.out}")
    return 0


def _cmd_validate_embeddings(args) -> int:
    store = read_store(args.directory)
    m = store.manifest
    print(f"OK\t{m.model_id}\tepoch={m.epoch}\tcount={m.count}\tdim={m.dim}")
    return 0


def _cmd_eval_odd(args) -> int:
    store = read_store(args.embeddings)
    key = oddoneout.read_answer_key(args.key)
    trials = oddoneout.trials_from_store(store, key)
    report = oddoneout.score_concepts(trials)
    per_concept = []
    from .core import CONCEPT_TABLE

    for concept_index, correct in report.per_concept:
        per_concept.append(
            {
                "index": concept_index,
                "label": CONCEPT_TABLE.label_of(concept_index),
                "class": CONCEPT_TABLE.class_of(concept_index).value,
                "correct": bool(correct),
            }
        )
    payload = {
        # Config hashes cover analysis parameters only, never filesystem
        # paths, so equal inputs give equal bytes from any directory.
        "header": reportio.report_header(0, {"command": "eval-odd"}),
        "model_id": store.manifest.model_id,
        "epoch": store.manifest.epoch,
        "overall": report.overall,
        "chance": report.chance,
        "complete": report.complete,
        "per_class": {
            cls.value: report.per_class[cls]
            for cls in sorted(report.per_class, key=lambda c: c.value)
        },
        "per_concept": per_concept,
    }
    reportio.write_json_report(args.out, payload)
    print(f"OK\teval-odd\toverall={reportio.fmt_float(report.overall)}")
    return 0


def _cmd_eval_number(args) -> int:
    stores = _load_stores(args.embeddings_glob)
    trajectory = numeffects.effects_over_epochs(
        stores,
        args.set,
        samples_per_pair=args.samples,
        seed=args.seed,
        map_fn=_map_fn(_thread_count()),
    )
    per_epoch = []
    csv_rows = []
    for epoch, stats in trajectory.per_epoch:
        a, b, c = stats.negexp_params
        per_epoch.append(
            {
                "epoch": epoch,
                "distance_r": stats.distance_r,
                "size_r": stats.size_r,
                "ratio_r2": stats.ratio_r2,
                "negexp": {"a": a, "b": b, "c": c},
            }
        )
        csv_rows.append((epoch, stats.distance_r, stats.size_r, stats.ratio_r2))
    payload = {
        "header": reportio.report_header(
            args.seed,
            {"command": "eval-number", "set": args.set, "samples": args.samples},
        ),
        "model_id": stores[0].manifest.model_id,
        "set": args.set,
        "samples_per_pair": args.samples,
        "per_epoch": per_epoch,
    }
    reportio.write_json_report(args.out, payload)
    reportio.write_csv(
        _sibling_csv(args.out),
        ("epoch", "distance_r", "size_r", "ratio_r2"),
        csv_rows,
    )
    print(f"OK\teval-number\t{len(per_epoch)} epochs")
    return 0


def _cmd_mds(args) -> int:
    stores = _load_stores(args.embeddings_glob)
    if args.epochs:
        wanted = _parse_epoch_list(args.epochs)
        by_epoch = {s.manifest.epoch: s for s in stores}
        missing = [e for e in wanted if e not in by_epoch]
        if missing:
            raise FormatError(f"no store for epochs {missing}")
        stores = [by_epoch[e] for e in wanted]
    lines = numline.line_over_epochs(
        stores,
        set_index=args.set,
        samples_per_pair=args.samples,
        seed=args.seed,
        map_fn=_map_fn(_thread_count()),
    )
    per_epoch = []
    csv_rows = []
    for epoch, line in lines:
        per_epoch.append(
            {
                "epoch": epoch,
                "eigenvalue_1": line.eigenvalue_1,
                "coords": list(line.coords),
            }
        )
        for n, coord in enumerate(line.coords, start=1):
            csv_rows.append((epoch, n, coord))
    payload = {
        "header": reportio.report_header(
            args.seed,
            {
                "command": "mds",
                "set": args.set,
                "samples": args.samples,
                "epochs": args.epochs or "all",
            },
        ),
        "model_id": stores[0].manifest.model_id,
        "set": args.set,
        "per_epoch": per_epoch,
    }
    reportio.write_json_report(args.out, payload)
    reportio.write_csv(_sibling_csv(args.out), ("epoch", "n", "coord"), csv_rows)
    print(f"OK\tmds\t{len(per_epoch)} epochs")
    return 0


def _parse_epoch_list(text: str) -> list:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError as exc:
        raise FormatError(f"bad epoch list {text!r}") from exc


_EFFECT_COLUMNS = {
    "distance": ("distance_r", growth.Effect.DISTANCE),
    "size": ("size_r", growth.Effect.SIZE),
    "ratio": ("ratio_r2", growth.Effect.RATIO),
}


def _read_csv_columns(path: str) -> tuple:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if len(rows) < 2:
        raise FormatError(f"{path}: need a header row and data rows")
    return tuple(cell.strip() for cell in rows[0]), rows[1:]


def _cmd_fit_growth(args) -> int:
    header, rows = _read_csv_columns(args.traj)
    x_col = args.x_column or header[0]
    if args.effect != "none":
        y_name, effect = _EFFECT_COLUMNS[args.effect]
        y_col = args.y_column or y_name
    else:
        effect = None
        y_col = args.y_column or header[1]
    for name in (x_col, y_col):
        if name not in header:
            raise FormatError(f"{args.traj}: no column {name!r} in {header}")
    xi, yi = header.index(x_col), header.index(y_col)
    points = []
    for row in rows:
        try:
            x, y = float(row[xi]), float(row[yi])
        except (ValueError, IndexError) as exc:
            raise FormatError(f"{args.traj}: bad row {row!r}") from exc
        if effect is growth.Effect.DISTANCE:
            y = max(0.0, -y)
        elif effect is growth.Effect.SIZE:
            y = max(0.0, y)
        points.append((x, y))
    traj = growth.Trajectory(label=f"{y_col}({args.effect})", points=tuple(points))
    fit = growth.fit_power(traj)
    payload = {
        "header": reportio.report_header(
            0,
            {
                "command": "fit-growth",
                "x_column": x_col,
                "y_column": y_col,
                "effect": args.effect,
            },
        ),
        "label": traj.label,
        "n_points": len(traj.points),
        "a": fit.a,
        "b": fit.b,
        "r2": fit.r2,
    }
    reportio.write_json_report(args.out, payload)
    print(f"OK\tfit-growth\tr2={reportio.fmt_float(fit.r2)}")
    return 0


def _cmd_align(args) -> int:
    human = growth.read_human_csv(args.human)
    if args.human_column not in human:
        raise FormatError(
            f"{args.human}: no data for column {args.human_column!r}"
        )
    header, rows = _read_csv_columns(args.model)
    y_col = args.model_column or header[1]
    if y_col not in header:
        raise FormatError(f"{args.model}: no column {y_col!r} in {header}")
    xi, yi = header.index(header[0]), header.index(y_col)
    points = []
    for row in rows:
        try:
            points.append((float(row[xi]), float(row[yi])))
        except (ValueError, IndexError) as exc:
            raise FormatError(f"{args.model}: bad row {row!r}") from exc
    model_traj = growth.Trajectory(label=f"model:{y_col}", points=tuple(points))
    result = growth.align_trajectories(
        human[args.human_column], model_traj, DEFAULT_EPOCH_AGE_MAP
    )
    payload = {
        "header": reportio.report_header(
            0,
            {
                "command": "align",
                "human_column": args.human_column,
                "model_column": y_col,
            },
        ),
        "pearson_r": result.pearson_r,
        "p_value": result.p_value,
        "n_pairs": result.n_pairs,
        "dropped_human": result.dropped_human,
        "dropped_model": result.dropped_model,
        "mapping": {
            "epochs_per_year": result.mapping.epochs_per_year,
            "base_age_years": result.mapping.base_age_years,
        },
    }
    reportio.write_json_report(args.out, payload)
    print(f"OK\talign\tr={reportio.fmt_float(result.pearson_r)}")
    return 0


def _cmd_oracle(args) -> int:
    params = oracle.OracleParams(
        sigma=args.sigma,
        dim=args.dim,
        replicates=args.replicates,
        epochs=oracle.parse_schedule(args.epochs),
        seed=args.seed,
    )
    os.makedirs(args.out, exist_ok=True)
    from .store import write_store

    for epoch, _ in params.epochs:
        store = oracle.gen_oracle_store(params, epoch)
        write_store(store, os.path.join(args.out, f"epoch_{epoch:03d}"))
    meta = {
        "header": reportio.report_header(
            args.seed,
            {
                "command": "oracle",
                "sigma": args.sigma,
                "dim": args.dim,
                "replicates": args.replicates,
                "epochs": args.epochs,
            },
        ),
        "sigma": float(args.sigma),
        "dim": args.dim,
        "replicates": args.replicates,
        "schedule": [[e, lvl] for e, lvl in params.epochs],
    }
    reportio.write_json_report(os.path.join(args.out, "oracle_meta.json"), meta)
    print(f"OK\toracle\t{len(params.epochs)} stores in {args.out}")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"ERR\tusage\t{message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="devalign",
        description="Developmental alignment analyses for vision-model embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-stimuli", help="generate a numerosity stimulus set")
    p.add_argument("--set", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replicates", type=int, default=1)
    p.set_defaults(func=_cmd_gen_stimuli)

    p = sub.add_parser("validate-embeddings", help="validate an embedding store")
    p.add_argument("directory")
    p.set_defaults(func=_cmd_validate_embeddings)

    p = sub.add_parser("eval-odd", help="score odd-one-out concept trials")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_eval_odd)

    p = sub.add_parser("eval-number", help="distance/size/ratio effect trajectory")
    p.add_argument("--embeddings-glob", required=True)
    p.add_argument("--set", type=int, default=1)
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_eval_number)

    p = sub.add_parser("mds", help="1D number-line reconstruction per epoch")
    p.add_argument("--embeddings-glob", required=True)
    p.add_argument("--epochs", default="")
    p.add_argument("--set", type=int, default=1)
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mds)

    p = sub.add_parser("fit-growth", help="power-function fit to a trajectory CSV")
    p.add_argument("--traj", required=True)
    p.add_argument("--x-column", default=None)
    p.add_argument("--y-column", default=None)
    p.add_argument(
        "--effect", choices=("none", "distance", "size", "ratio"), default="none"
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fit_growth)

    p = sub.add_parser("align", help="correlate human ages with model epochs")
    p.add_argument("--human", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--human-column", default="overall")
    p.add_argument("--model-column", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("oracle", help="generate synthetic number-line stores")
    p.add_argument("--sigma", type=float, default=oracle.DEFAULT_SIGMA)
    p.add_argument("--dim", type=int, default=oracle.DEFAULT_DIM)
    p.add_argument("--replicates", type=int, default=oracle.DEFAULT_REPLICATES)
    p.add_argument("--epochs", default="1:1.0,2:0.5,10:0.1,90:0.0")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except DevAlignError as exc:
        print(f"ERR\t{exc.code}\t{exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive internal-error path
        print(f"ERR\tinternal\t{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
