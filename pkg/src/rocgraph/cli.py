"""Command-line interface: ``rocgraph <subcommand> ...`` (also ``python -m rocgraph``).

Exit codes: 0 success, 1 usage/validation/I-O error, 2 infeasible fit.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis as an
from . import generators as gen
from .graph import read_edge_list, write_edge_list
from .motifs import motif_stats
from .rng import MASK64, replication_seed

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2

SWEEP_COLUMNS = [
    "kind", "generator", "n", "d", "s", "q", "seed",
    "m", "c3", "c4", "r3", "r4", "avg_cc",
    "pred_r3", "pred_r4", "pred_cc",
    "m_std", "c3_std", "c4_std", "r3_std", "r4_std", "avg_cc_std",
]
_AGG_FIELDS = ["m", "c3", "c4", "r3", "r4", "avg_cc"]


class CliError(Exception):
    pass


# -- formatting --------------------------------------------------------------

def fmt_float(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def dump_json(obj, indent: int = 0) -> str:
    """JSON with floats at 17 significant digits and NaN/inf written as null."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dump_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dump_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dump_json(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(text: str | bytes, output: str | None) -> None:
    data = text.encode() if isinstance(text, str) else text
    if output in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    try:
        Path(output).write_bytes(data)
    except OSError as exc:
        raise CliError(f"cannot write {output}: {exc.strerror or exc}") from exc


def _indexed_path(path: str, i: int, total: int) -> str:
    if total == 1:
        return path
    p = Path(path)
    return str(p.with_name(f"{p.stem}.{i}{p.suffix}"))


# -- generate ----------------------------------------------------------------

def _build(args, seed: int):
    """Return (graph, community_log_or_None) for the chosen model."""
    model = args.model
    th = args.threads
    if model == "er":
        return gen.gen_er(args.n, args.p, seed), None
    if model == "roc":
        return gen.gen_roc(gen.RocParams(args.n, args.d, args.s, args.q), seed, threads=th)
    if model == "roc-fixed":
        return gen.gen_roc_fixed(gen.RocParams(args.n, args.d, args.s, args.q), seed, threads=th)
    if model == "droc":
        return gen.gen_droc(_droc_spec(args), seed, threads=th)
    if model == "triangles":
        return gen.gen_just_add_triangles(args.n, args.t, seed), None
    if model == "block":
        return gen.gen_block_model(gen.BlockModelSpec(_load_matrix(args.matrix)), seed), None
    if model == "hypercube":
        return gen.gen_hypercube(args.dim), None
    raise CliError(f"unknown model {model}")


def _droc_spec(args) -> gen.DrocSpec:
    if args.targets:
        try:
            t = np.loadtxt(args.targets, dtype=np.float64, ndmin=1)
        except (OSError, ValueError) as exc:
            raise CliError(f"cannot read targets from {args.targets}: {exc}") from exc
        n = t.size if args.n is None else args.n
    else:
        if args.n is None:
            raise CliError("droc needs --n with --gamma")
        n = args.n
        t = gen.sample_power_law(n, args.gamma, args.target_seed)
    if args.cap:
        t = gen.cap_targets(t, args.s, args.q)
    return gen.DrocSpec(n, t, args.s, args.q)


def _load_matrix(path: str) -> np.ndarray:
    try:
        if path.endswith(".npy"):
            return np.load(path)
        return np.loadtxt(path, dtype=np.float64, ndmin=2)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read matrix from {path}: {exc}") from exc


def cmd_generate(args) -> int:
    reps = args.replications
    if reps > 1 and args.output in (None, "-"):
        raise CliError("--replications > 1 needs --output (files get an index suffix)")
    for i in range(reps):
        seed = replication_seed(args.seed, i)
        g, log = _build(args, seed)
        _emit(write_edge_list(g), _indexed_path(args.output, i, reps) if args.output else None)
        if args.communities:
            if log is None:
                raise CliError(f"model {args.model} has no communities to log")
            _emit(log.to_bytes(), _indexed_path(args.communities, i, reps))
    return EXIT_OK


# -- stats / fit / predict / connectivity ----------------------------------------

def cmd_stats(args) -> int:
    try:
        data = Path(args.path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {args.path}: {exc.strerror or exc}") from exc
    g = read_edge_list(data)
    st = motif_stats(g, threads=args.threads).to_json_dict()
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        keys = ["n", "m", "c3", "c4", "r3", "r4", "avg_clustering"]
        w.writerow(keys)
        w.writerow([fmt_float(st[k]) for k in keys])
        _emit(buf.getvalue(), args.output)
    else:
        _emit(dump_json(st) + "\n", args.output)
    return EXIT_OK


def cmd_fit(args) -> int:
    if args.r3 is not None or args.r4 is not None:
        if args.r3 is None or args.r4 is None:
            raise CliError("--r3 and --r4 go together")
        res = an.fit_roc(args.r3, args.r4)
        _emit(dump_json(res.to_json_dict()) + "\n", args.output)
        return EXIT_INFEASIBLE if res.regime == "infeasible" else EXIT_OK
    if args.cc is None or args.d is None:
        raise CliError("give either --r3/--r4 or --cc/--d with --pin-s or --pin-q")
    res = an.fit_roc_clustering(args.d, args.cc, s=args.pin_s, q=args.pin_q)
    _emit(dump_json(res.to_json_dict()) + "\n", args.output)
    return EXIT_OK


def cmd_predict(args) -> int:
    p = gen.RocParams(args.n, args.d, args.s, args.q)
    out = an.predict_roc_stats(p, exact_series=args.exact_series).to_json_dict()
    out["rounds"] = p.rounds
    _emit(dump_json(out) + "\n", args.output)
    return EXIT_OK


def cmd_connectivity(args) -> int:
    p = gen.RocParams(args.n, args.d, args.s, args.q)
    rep = an.connectivity_report(p, c=args.c, eps=args.eps)
    _emit(dump_json(rep.to_json_dict()) + "\n", args.output)
    return EXIT_OK


# -- sweep ---------------------------------------------------------------------

def _sweep_points(args) -> tuple[str, list[dict]]:
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise CliError(f"cannot read sweep config {args.config}: {exc}") from exc
        generator = cfg.get("generator", args.generator or "roc")
        points = cfg.get("points")
        if not points:
            grid = cfg.get("grid", {})
            keys = list(grid)
            points = [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]
        return generator, [dict(p) for p in points]
    generator = args.generator or "roc"
    if generator == "er":
        keys = {"n": args.n, "p": args.p}
    else:
        keys = {"n": args.n, "d": args.d, "s": args.s, "q": args.q}
    missing = [k for k, v in keys.items() if not v]
    if missing:
        raise CliError(f"sweep {generator} needs " + ", ".join("--" + k for k in missing))
    names = list(keys)
    return generator, [dict(zip(names, c)) for c in itertools.product(*keys.values())]


def _sweep_make(generator: str, point: dict):
    """Validate one grid point; returns (row_params, callable seed -> graph, prediction)."""
    try:
        if generator == "er":
            n, p = int(point["n"]), float(point["p"])
            if not 0 <= p <= 1:
                raise ValueError(f"p must lie in [0, 1], got {p}")
            row = {"n": n, "d": p * (n - 1), "s": n, "q": p}
            return row, (lambda seed: gen.gen_er(n, p, seed)), None
        params = gen.RocParams(int(point["n"]), float(point["d"]), float(point["s"]), float(point["q"]))
    except KeyError as exc:
        raise CliError(f"sweep point {point} is missing {exc}") from None
    row = {"n": params.n, "d": params.d, "s": params.s, "q": params.q}
    if generator == "roc":
        make = lambda seed: gen.gen_roc(params, seed)[0]
    elif generator == "roc-fixed":
        make = lambda seed: gen.gen_roc_fixed(params, seed)[0]
    else:
        raise CliError(f"sweep supports er, roc, roc-fixed; got {generator}")
    return row, make, an.predict_roc_stats(params)


def run_sweep(generator: str, points: list[dict], seed: int, replications: int,
              threads: int | None = None) -> list[dict]:
    # validate every point before generating anything
    prepared = [_sweep_make(generator, p) for p in points]
    rows: list[dict] = []
    for row, make, pred in prepared:
        base = {"generator": generator, **row}
        if pred is not None:
            base.update(pred_r3=pred.r3_pred, pred_r4=pred.r4_pred, pred_cc=pred.cc_pred)
        data = []
        for r in range(replications):
            s = replication_seed(seed, r)
            st = motif_stats(make(s), threads=threads)
            data.append({**base, "kind": "run", "seed": s, "m": st.m, "c3": st.c3, "c4": st.c4,
                         "r3": st.r3, "r4": st.r4, "avg_cc": st.avg_clustering})
        agg = {**base, "kind": "aggregate"}
        for f in _AGG_FIELDS:
            vals = np.array([np.nan if d[f] is None else d[f] for d in data], dtype=np.float64)
            agg[f] = float(np.mean(vals))
            agg[f + "_std"] = float(np.std(vals, ddof=1)) if vals.size > 1 else None
        rows.extend(data)
        rows.append(agg)
    return rows


def sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([r.get(c) if isinstance(r.get(c), str) else fmt_float(r.get(c)) for c in SWEEP_COLUMNS])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    generator, points = _sweep_points(args)
    if not points:
        raise CliError("sweep grid is empty")
    rows = run_sweep(generator, points, args.seed, args.replications, args.threads)
    _emit(sweep_csv(rows), args.output)
    return EXIT_OK


# -- verify --------------------------------------------------------------------

def cmd_verify(args) -> int:
    from . import acceptance

    if args.list:
        print("\n".join(acceptance.CRITERIA))
        return EXIT_OK
    names = args.only or list(acceptance.CRITERIA)
    unknown = [n for n in names if n not in acceptance.CRITERIA]
    if unknown:
        raise CliError("unknown criteria: " + ", ".join(unknown))
    ok = True
    for name in names:
        kwargs = {"perturb": True} if (args.perturb_seed and name == "determinism") else {}
        res = acceptance.run_criterion(name, **kwargs)
        print(res.line(), flush=True)
        ok &= res.passed
    print(f"{sum(1 for _ in names)} criteria run: {'all passed' if ok else 'FAILURES'}")
    return EXIT_OK if ok else EXIT_ERROR


# -- parser --------------------------------------------------------------------

def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v <= MASK64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--replications", type=_positive_int, default=1)
    common.add_argument("--threads", type=_positive_int, default=gen.default_threads(),
                        help="worker threads (default: $ROC_THREADS or 1)")
    common.add_argument("-o", "--output", default=None)
    common.add_argument("--format", choices=["json", "csv", "edgelist"], default=None)

    parser = argparse.ArgumentParser(prog="rocgraph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="sample a graph and write its edge list")
    models = p_gen.add_subparsers(dest="model", required=True)

    def model(name, help_):
        p = models.add_parser(name, parents=[common], help=help_)
        p.add_argument("--communities", default=None, help="also write the community log here")
        return p

    p = model("er", "Erdos-Renyi G(n, p)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    for name, help_ in (("roc", "ROC(n, d, s, q)"), ("roc-fixed", "fixed-membership ROC")):
        p = model(name, help_)
        for k, t in (("n", int), ("d", float), ("s", float), ("q", float)):
            p.add_argument(f"--{k}", type=t, required=True)
    p = model("droc", "DROC with power-law or file targets")
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--gamma", type=float, help="zeta-distributed targets with this exponent")
    src.add_argument("--targets", help="file with one target degree per line")
    p.add_argument("--target-seed", type=_seed, default=0)
    p.add_argument("--cap", action="store_true", help="clip targets so max t^2 <= s d / q")
    p = model("triangles", "union of t random triangles")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p = model("block", "independent edges with probabilities from a matrix file")
    p.add_argument("--matrix", required=True)
    p = model("hypercube", "dim-dimensional hypercube")
    p.add_argument("--dim", type=int, required=True)
    p_gen.set_defaults(func=cmd_generate)
    for mp in models.choices.values():
        mp.set_defaults(func=cmd_generate)

    p = sub.add_parser("stats", parents=[common], help="motif statistics of an edge-list file")
    p.add_argument("path")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("fit", parents=[common], help="fit (s, q) to target ratios or clustering")
    p.add_argument("--r3", type=float)
    p.add_argument("--r4", type=float)
    p.add_argument("--cc", type=float)
    p.add_argument("--d", type=float)
    pin = p.add_mutually_exclusive_group()
    pin.add_argument("--pin-s", type=float)
    pin.add_argument("--pin-q", type=float)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", parents=[common], help="closed-form ratio and clustering predictions")
    for k, t in (("n", int), ("d", float), ("s", float), ("q", float)):
        p.add_argument(f"--{k}", type=t, required=True)
    p.add_argument("--exact-series", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("report-connectivity", parents=[common], help="isolation thresholds")
    for k, t in (("n", int), ("d", float), ("s", float), ("q", float)):
        p.add_argument(f"--{k}", type=t, required=True)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--eps", type=float, default=0.5)
    p.set_defaults(func=cmd_connectivity)

    p = sub.add_parser("sweep", parents=[common], help="replicated statistics over a parameter grid (CSV)")
    p.add_argument("generator", nargs="?", choices=["er", "roc", "roc-fixed"])
    p.add_argument("--config", help="JSON file with 'generator' and 'points' or 'grid'")
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--d", type=float, nargs="+")
    p.add_argument("--s", type=float, nargs="+")
    p.add_argument("--q", type=float, nargs="+")
    p.add_argument("--p", type=float, nargs="+")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance criteria")
    p.add_argument("--only", nargs="+", metavar="NAME")
    p.add_argument("--list", action="store_true")
    p.add_argument("--perturb-seed", action="store_true",
                   help="negative control: perturb one seed in the determinism criterion")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; 2 is reserved for infeasible fits
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    try:
        return args.func(args)
    except (CliError, ValueError, IndexError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
