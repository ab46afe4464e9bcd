"""Command-line front end.

Subcommands: ``measure`` (uncertainty reports for one or more distributions),
``compare`` (measure families side by side), ``axioms`` (run the full axiom
suite per family), and ``figure`` (simplex density grids plus normalized
measure values for a panel of Dirichlet parameters).

All randomness flows from the single ``--seed`` through a counter-based
split per work item, so identical configurations produce byte-identical
output files. Exit codes: 0 success (expected baseline violations included),
1 configuration or I/O errors, 2 a distance-family failure of axioms A0-A7.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .axioms import run_suite, triple_for
from .baselines import cross_entropy_report, entropy_report
from .measures import EuSolverConfig, measure
from .secondorder import DirichletParams, SecondOrderRep, parse_distribution

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_AXIOM_FAILURE = 2

FAMILIES = ("distance", "entropy", "cross_entropy")

MEASURE_COLUMNS = [
    "id", "family", "k", "tu", "au", "eu", "normalized",
    "estimator", "mc_stderr", "lambda_star", "q_star",
]
COMPARE_COLUMNS = ["id", "family", "k", "tu", "au", "eu", "decomposition_residual"]
AXIOM_COLUMNS = ["family", "axiom", "status", "trials", "notes", "counterexample"]
SUMMARY_COLUMNS = ["panel", "alpha", "k", "tu", "au", "eu", "mc_stderr", "density_grid"]

# Default figure panels (K = 3): uniform, center-concentrated, its
# mean-preserving spread, an asymmetric case, vertex-concentrated, and a
# near-vertex mixture. SPREAD_PAIR names the designated spread pair.
DEFAULT_PANELS: list[tuple[str, list[float]]] = [
    ("a", [1.0, 1.0, 1.0]),
    ("b", [8.0, 8.0, 8.0]),
    ("c", [3.0, 3.0, 3.0]),
    ("d", [4.0, 2.0, 1.0]),
    ("e", [46.0, 2.0, 2.0]),
    ("f", [0.2, 0.2, 0.2]),
]
SPREAD_PAIR = ("b", "c")

GRID_EDGE = 200  # 201 lattice points per simplex edge


class CliError(Exception):
    """Configuration or input errors; mapped to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise CliError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="souq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_input=True):
        if with_input:
            p.add_argument("--input", help="path to a JSON distribution spec")
            p.add_argument("--inline", help="inline JSON distribution spec")
        p.add_argument("--measures", default=None,
                       help="comma-separated families: distance,entropy,cross_entropy")
        p.add_argument("--samples", type=int, default=100_000, help="Monte Carlo sample count")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (required for MC paths)")
        p.add_argument("--tol", type=float, default=1e-10, help="solver constraint tolerance")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="output path (stdout when omitted)")

    p = sub.add_parser("measure", help="compute uncertainty reports")
    add_common(p)
    p.add_argument("--normalize", action="store_true", help="rescale distance values by K/(K-1)")

    p = sub.add_parser("compare", help="compare measure families side by side")
    add_common(p)

    p = sub.add_parser("axioms", help="run the axiom suite")
    add_common(p, with_input=False)
    p.add_argument("--trials", type=int, default=1000, help="trials per axiom")

    p = sub.add_parser("figure", help="emit density grids and normalized measures")
    add_common(p, with_input=False)
    p.add_argument("--panels", default=None,
                   help='inline JSON list of concentration vectors, e.g. "[[1,1,1],[3,3,3]]"')
    return parser


def _parse_families(spec: str | None, default=("distance",)) -> list[str]:
    if spec is None:
        return list(default)
    fams = [f.strip() for f in spec.split(",") if f.strip()]
    for f in fams:
        if f not in FAMILIES:
            raise CliError(f"unknown measure family {f!r}; choose from {', '.join(FAMILIES)}")
    if not fams:
        raise CliError("no measure families selected")
    return fams


def _load_distributions(args) -> list[tuple[str, SecondOrderRep]]:
    if bool(args.input) == bool(args.inline):
        raise CliError("provide exactly one of --input or --inline")
    if args.input:
        try:
            text = Path(args.input).read_text()
        except OSError as exc:
            raise CliError(f"cannot read {args.input}: {exc}") from exc
    else:
        text = args.inline
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if isinstance(data, dict) and "distributions" in data:
        specs = data["distributions"]
        if not isinstance(specs, list) or not specs:
            raise CliError("'distributions' must be a nonempty list")
    elif isinstance(data, list):
        specs = data
    else:
        specs = [data]
    out = []
    for i, obj in enumerate(specs):
        if not isinstance(obj, dict):
            raise CliError(f"distribution {i} must be a JSON object")
        ident = str(obj.get("id", f"d{i}"))
        try:
            out.append((ident, parse_distribution(obj)))
        except ValueError as exc:
            raise CliError(f"distribution {i} ({ident}): {exc}") from exc
    return out


def _task_seed(seed: int | None, index: int) -> int | None:
    if seed is None:
        return None
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _require_seed(args, why: str) -> None:
    if args.seed is None:
        raise CliError(f"--seed is required: {why}")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def _emit(rows: list[dict], columns: list[str], fmt: str, out: str | None) -> None:
    if fmt == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(_csv_cell(row.get(c))) for c in columns])
        text = buf.getvalue()
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv_cell(v):
    if isinstance(v, list):
        return ";".join(_fmt(x) for x in v)
    if isinstance(v, dict):
        return json.dumps(v)
    return v


def _measure_row(ident: str, family: str, q: SecondOrderRep, cfg, seed, normalized: bool) -> dict:
    if family == "distance":
        rep = measure(q, cfg, seed, normalized=normalized)
        return {
            "id": ident, "family": family, "k": rep.k,
            "tu": rep.tu, "au": rep.au, "eu": rep.eu,
            "normalized": rep.normalized, "estimator": rep.estimator,
            "mc_stderr": rep.mc_stderr, "lambda_star": rep.lambda_star,
            "q_star": None if rep.minimizer_q is None else [float(x) for x in rep.minimizer_q],
        }
    rep = entropy_report(q, cfg, seed) if family == "entropy" else cross_entropy_report(q, cfg, seed)
    return {
        "id": ident, "family": family, "k": q.k,
        "tu": rep.tu, "au": rep.au, "eu": rep.eu,
        "normalized": False, "estimator": rep.estimator,
        "mc_stderr": rep.mc_stderr, "lambda_star": None, "q_star": None,
    }


def cmd_measure(args) -> int:
    families = _parse_families(args.measures)
    dists = _load_distributions(args)
    if any(isinstance(q, DirichletParams) for _, q in dists):
        _require_seed(args, "Dirichlet inputs take Monte Carlo paths")
    cfg = EuSolverConfig(lambda_tol=args.tol, mc_samples=args.samples)
    rows = []
    task = 0
    for ident, q in dists:
        seed = _task_seed(args.seed, task)
        task += 1
        for family in families:
            rows.append(_measure_row(ident, family, q, cfg, seed,
                                     getattr(args, "normalize", False)))
    _emit(rows, MEASURE_COLUMNS, args.format, args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    families = _parse_families(args.measures, default=FAMILIES)
    dists = _load_distributions(args)
    if any(isinstance(q, DirichletParams) for _, q in dists):
        _require_seed(args, "Dirichlet inputs take Monte Carlo paths")
    cfg = EuSolverConfig(lambda_tol=args.tol, mc_samples=args.samples)
    rows = []
    for task, (ident, q) in enumerate(dists):
        seed = _task_seed(args.seed, task)  # one seed shared by all families
        for family in families:
            row = _measure_row(ident, family, q, cfg, seed, normalized=False)
            residual = None
            if family in ("entropy", "cross_entropy") and math.isfinite(row["tu"]):
                residual = row["tu"] - row["au"] - row["eu"]
            rows.append({
                "id": ident, "family": family, "k": row["k"],
                "tu": row["tu"], "au": row["au"], "eu": row["eu"],
                "decomposition_residual": residual,
            })
    _emit(rows, COMPARE_COLUMNS, args.format, args.out)
    return EXIT_OK


def cmd_axioms(args) -> int:
    families = _parse_families(args.measures)
    if args.trials < 1:
        raise CliError(f"--trials must be >= 1, got {args.trials}")
    _require_seed(args, "the axiom suite draws random inputs")
    cfg = EuSolverConfig(lambda_tol=args.tol, mc_samples=args.samples)
    rows = []
    distance_failed = False
    for family in families:
        results = run_suite(triple_for(family, cfg), args.trials, args.seed)
        for res in results:
            rows.append({
                "family": family, "axiom": res.axiom, "status": res.status,
                "trials": res.trials, "notes": res.notes,
                "counterexample": res.counterexample,
            })
            if family == "distance" and res.axiom != "A8" and res.status == "fail":
                distance_failed = True
    _emit(rows, AXIOM_COLUMNS, args.format, args.out)
    return EXIT_AXIOM_FAILURE if distance_failed else EXIT_OK


def _simplex_grid(edge: int) -> np.ndarray:
    pts = []
    for i in range(edge + 1):
        for j in range(edge + 1 - i):
            pts.append((i, j, edge - i - j))
    return np.asarray(pts, dtype=np.float64) / edge


def _dirichlet_density(alpha: np.ndarray, pts: np.ndarray) -> np.ndarray:
    log_norm = sum(math.lgamma(a) for a in alpha) - math.lgamma(float(alpha.sum()))
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.log(pts)
        terms = np.where(alpha - 1.0 == 0.0, 0.0, (alpha - 1.0) * logs)
    return np.exp(terms.sum(axis=1) - log_norm)


def _parse_panels(spec: str | None) -> list[tuple[str, list[float]]]:
    if spec is None:
        return list(DEFAULT_PANELS)
    try:
        raw = json.loads(spec)
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed --panels JSON: {exc.msg}") from exc
    if not isinstance(raw, list) or not raw:
        raise CliError("--panels must be a nonempty JSON list of concentration vectors")
    return [(f"p{i}", [float(x) for x in a]) for i, a in enumerate(raw)]


def cmd_figure(args) -> int:
    panels = _parse_panels(args.panels)
    _require_seed(args, "figure measures take Monte Carlo paths")
    cfg = EuSolverConfig(lambda_tol=args.tol, mc_samples=args.samples)
    out_dir = Path(args.out) if args.out else Path("figure_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = _simplex_grid(GRID_EDGE)
    summary = []
    for task, (name, alpha) in enumerate(panels):
        try:
            q = DirichletParams(alpha)
        except ValueError as exc:
            raise CliError(f"panel {name}: {exc}") from exc
        seed = _task_seed(args.seed, task)
        rep = measure(q, cfg, seed, normalized=True)
        if q.k == 3:
            dens = _dirichlet_density(q.alpha, grid)
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["p1", "p2", "p3", "density"])
            for row, d in zip(grid, dens):
                writer.writerow([_fmt(float(row[0])), _fmt(float(row[1])),
                                 _fmt(float(row[2])), _fmt(float(d))])
            (out_dir / f"panel_{name}_grid.csv").write_text(buf.getvalue())
            grid_note = "yes"
        else:
            grid_note = f"skipped: density grid needs K=3, panel has K={q.k}"
        summary.append({
            "panel": name, "alpha": [float(a) for a in alpha], "k": q.k,
            "tu": rep.tu, "au": rep.au, "eu": rep.eu,
            "mc_stderr": rep.mc_stderr, "density_grid": grid_note,
        })
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for row in summary:
        writer.writerow([_fmt(_csv_cell(row.get(c))) for c in SUMMARY_COLUMNS])
    (out_dir / "panels_summary.csv").write_text(buf.getvalue())
    (out_dir / "panels_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.samples < 2:
            raise CliError(f"--samples must be >= 2, got {args.samples}")
        handler = {
            "measure": cmd_measure,
            "compare": cmd_compare,
            "axioms": cmd_axioms,
            "figure": cmd_figure,
        }[args.command]
        return handler(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
