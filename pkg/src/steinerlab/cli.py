"""Command-line front end: ``steinerlab run | experiment-rates | verify``.

Schedule strings::

    periodic:0,60,120            cycle through the angles (degrees)
    random:0,60,120;0.5,0.3,0.2;7
                                 i.i.d. choice; weights and seed may be empty
    explicit:@seq.json           JSON array of angles in degrees, played once,
                                 then the last angle repeats forever; or an
                                 object {"angles": [...], "cycle_from": k}

Body generators are documented in :mod:`steinerlab.generators`.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from pathlib import Path

from . import __version__
from .generators import generate
from .geom2d import (
    ConvexBody2,
    Direction,
    InvalidInputError,
    body_from_json,
    normalize,
    origin_circumradius,
)
from .process import (
    RECORD_KEYS,
    InsufficientDataError,
    RunConfig,
    Schedule,
    _replay,
    estimate_rate,
    growing_blocks_sequence,
    interleaved_sequence,
    periodic_triple_sequence,
    run,
    trace_to_jsonl,
)
from .symmetrize import steiner

log = logging.getLogger("steinerlab")

EXIT_OK, EXIT_INPUT, EXIT_MAX_ITERS = 0, 1, 2


# -- parsing ----------------------------------------------------------------


def _angles(text: str) -> list[float]:
    try:
        out = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InvalidInputError(f"bad angle list {text!r}") from None
    if not out:
        raise InvalidInputError("empty angle list")
    return out


def _dedupe(angles):
    """Distinct directions (mod 180 degrees) in order of first use, plus the index of each angle."""
    dirs: list[Direction] = []
    keys: list[float] = []
    idx = []
    for a in angles:
        key = round(a % 180.0, 9) % 180.0
        if key not in keys:
            keys.append(key)
            dirs.append(Direction.from_degrees(a))
        idx.append(keys.index(key))
    return dirs, idx


def parse_schedule(spec: str, seed: int | None = None) -> Schedule:
    kind, sep, rest = spec.partition(":")
    if not sep:
        raise InvalidInputError(f"schedule {spec!r} needs the form kind:args")
    if kind == "periodic":
        return Schedule.periodic([Direction.from_degrees(a) for a in _angles(rest)])
    if kind == "random":
        parts = rest.split(";")
        if len(parts) > 3:
            raise InvalidInputError(f"random schedule takes angles;weights;seed, got {rest!r}")
        dirs = [Direction.from_degrees(a) for a in _angles(parts[0])]
        weights = _angles(parts[1]) if len(parts) > 1 and parts[1].strip() else None
        s = seed
        if len(parts) > 2 and parts[2].strip():
            try:
                s = int(parts[2])
            except ValueError:
                raise InvalidInputError(f"bad seed {parts[2]!r}") from None
        return Schedule.random(dirs, weights, s)
    if kind == "explicit":
        if not rest.startswith("@"):
            raise InvalidInputError("explicit schedules are read from a file: explicit:@path.json")
        data = _read_json(rest[1:])
        cycle_from = None
        if isinstance(data, dict):
            cycle_from = data.get("cycle_from")
            data = data.get("angles")
        if not isinstance(data, list) or not data or not all(isinstance(a, (int, float)) for a in data):
            raise InvalidInputError("explicit schedule file must hold a non-empty array of angles")
        dirs, idx = _dedupe(float(a) for a in data)
        return Schedule.explicit(idx, dirs, cycle_from)
    raise InvalidInputError(f"unknown schedule kind {kind!r}")


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"malformed JSON in {path}: {exc}") from None


def load_body(path: str) -> ConvexBody2:
    """A body JSON object, or a bare list of [x, y] points (their hull)."""
    data = _read_json(path)
    if isinstance(data, list):
        return normalize(data)
    return body_from_json(data)


def _body(args) -> ConvexBody2:
    if args.input and args.generate:
        raise InvalidInputError("give either --input or --generate, not both")
    if args.input:
        return load_body(args.input)
    if args.generate:
        return generate(args.generate)
    raise InvalidInputError("one of --input or --generate is required")


# -- output -----------------------------------------------------------------


def _writable(path) -> Path:
    p = Path(path)
    if p.parent and not p.parent.exists():
        raise InvalidInputError(f"output directory {p.parent} does not exist")
    return p


def _write_text(path, text: str) -> None:
    try:
        _writable(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InvalidInputError(f"cannot write {path}: {exc.strerror}") from None


def records_csv(trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_KEYS)
    for r in trace.records:
        w.writerow(["" if r.get(k) is None else r.get(k) for k in RECORD_KEYS])
    return buf.getvalue()


def svg_snapshot(K: ConvexBody2, box: tuple[float, float, float], label: str = "") -> str:
    """One body as an SVG document; ``box`` is (cx, cy, half-side) in body units."""
    cx, cy, s = box
    stroke = s / 200.0
    pts = K.vertices

    def xy(p):
        # y flips so +y points up on screen
        return f"{p[0] - cx + s:.9g},{s - (p[1] - cy):.9g}"

    if K.is_polygon:
        shape = f'<polygon points="{" ".join(xy(p) for p in pts)}" fill="#9ab" stroke="#123" stroke-width="{stroke:.3g}"/>'
    elif K.is_segment:
        shape = f'<polyline points="{xy(pts[0])} {xy(pts[1])}" fill="none" stroke="#123" stroke-width="{2 * stroke:.3g}"/>'
    else:
        x, y = xy(pts[0]).split(",")
        shape = f'<circle cx="{x}" cy="{y}" r="{2 * stroke:.3g}" fill="#123"/>'
    title = f"<title>{label}</title>" if label else ""
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {2 * s:.9g} {2 * s:.9g}" width="400" height="400">'
        f"{title}{shape}</svg>\n"
    )


def _svg_box(K: ConvexBody2):
    # iterates never leave the origin disk through the start body
    R = origin_circumradius(K)
    return 0.0, 0.0, 1.1 * R if R > 0 else 1.0


def _oracle_steps(trace, resolution: int = 256) -> float:
    """Largest grid-vs-exact disagreement over all steps, in cells."""
    from .raster import grid_hausdorff, grid_steiner, rasterize

    # every iterate stays in the origin disk that holds the start body
    ext = max(1.05 * origin_circumradius(trace.initial_body), 1e-6)
    stream = trace.schedule.indices(trace.config.seed)
    worst = 0.0
    K = trace.initial_body
    for i in range(1, trace.iterations + 1):
        u = trace.schedule.dirs[next(stream)]
        Kn = steiner(K, u, trace.config.tol)
        G = grid_steiner(rasterize(K, resolution, ext), u)
        E = rasterize(Kn, resolution, ext)
        if G.count and E.count:
            cells = grid_hausdorff(G, E) / G.cell_size
            log.debug("oracle step %d: %.3f cells", i, cells)
            worst = max(worst, cells)
        K = Kn
    return worst


# -- commands ---------------------------------------------------------------


def cmd_run(args) -> int:
    K = _body(args)
    S = parse_schedule(args.schedule, args.seed)
    config = RunConfig(eps=args.eps, max_iters=args.max_iters, window=args.window, seed=args.seed)
    if args.svg_every is not None and args.svg_every < 1:
        raise InvalidInputError("--svg-every must be >= 1")
    for p in (args.trace, args.csv):
        if p:
            _writable(p)
    svg_dir = None
    if args.svg_every:
        svg_dir = Path(args.svg_dir or ".")
        try:
            svg_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise InvalidInputError(f"cannot create {svg_dir}: {exc.strerror}") from None

    log.info("running %s on %s body with %d vertices", S.kind, K.kind, K.n_vertices)
    trace = run(K, S, config)
    if args.trace:
        _write_text(args.trace, trace_to_jsonl(trace))
    if args.csv:
        _write_text(args.csv, records_csv(trace))
    if svg_dir is not None:
        box = _svg_box(K)
        for i, B in enumerate(_replay(trace)):
            if i % args.svg_every == 0 or i == trace.iterations:
                (svg_dir / f"iter_{i:06d}.svg").write_text(svg_snapshot(B, box, f"iteration {i}"), encoding="utf-8")
    summary = {"verdict": trace.verdict, "iterations": trace.iterations,
               "final_vertices": trace.final_body.n_vertices}
    if trace.records and trace.records[-1].get("fixpoint_residual") is not None:
        summary["final_residual"] = trace.records[-1]["fixpoint_residual"]
    if args.oracle_check:
        summary["oracle_max_cells"] = _oracle_steps(trace)
        if summary["oracle_max_cells"] > 2.0:
            log.warning("grid oracle disagreed by %.2f cells", summary["oracle_max_cells"])
    print(json.dumps(summary))
    return EXIT_OK if trace.converged else EXIT_MAX_ITERS


# Direction triple for the rate experiments: outward normals of an
# equilateral triangle, called u, v, w in the family names.
PRESETS = {"s6-triangle": (90.0, 210.0, 330.0)}

FAMILIES = {
    "periodic-uvw": periodic_triple_sequence,
    "interleaved-v": interleaved_sequence,
    "blocks-uv-w": growing_blocks_sequence,
}

RATE_COLUMNS = ["schedule_id", "family", "trial", "seed", "body", "weights", "verdict", "iterations",
                "rate", "r2", "n_points", "flag"]


def experiment_rows(preset: str, trials: int = 10, seed: int = 0, eps: float = 1e-9, max_iters: int = 20_000,
                    weights=None, body: ConvexBody2 | None = None, body_label: str | None = None):
    if preset not in PRESETS:
        raise InvalidInputError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    dirs = [Direction.from_degrees(a) for a in PRESETS[preset]]
    config = RunConfig(eps=eps, max_iters=max_iters, metrics="minimal")
    families = dict(FAMILIES)
    if weights is not None:
        families["random"] = None
    rows = []
    for name, seq in families.items():
        for t in range(trials):
            s = seed + t
            if body is None:
                label = f"random:8,{s}"
                K = generate(label)
            else:
                K, label = body, body_label or "input"
            if seq is None:
                S = Schedule.random(dirs, weights, s)
            else:
                S = Schedule.explicit(seq(max_iters + 1), dirs, cycle_from=0)
            trace = run(K, S, config)
            row = {"schedule_id": f"{preset}/{name}", "family": name, "trial": t, "seed": s, "body": label,
                   "weights": "" if seq is not None else ",".join(f"{w:g}" for w in S.weights),
                   "verdict": trace.verdict, "iterations": trace.iterations,
                   "rate": "", "r2": "", "n_points": "", "flag": ""}
            try:
                est = estimate_rate(trace)
                row.update(rate=est.rate, r2=est.r2, n_points=est.n_points)
            except InsufficientDataError:
                row["flag"] = "insufficient-data"
            except RuntimeError:
                row["flag"] = "not-converged"
            rows.append(row)
    return rows


def cmd_experiment_rates(args) -> int:
    weights = _angles(args.weights) if args.weights else None
    body = label = None
    if args.input or args.generate:
        body = _body(args)
        label = args.generate or args.input
    rows = experiment_rows(args.preset, args.trials, args.seed, args.eps, args.max_iters, weights, body, label)
    buf = io.StringIO()
    w = csv.DictWriter(buf, RATE_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if args.csv:
        _write_text(args.csv, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_verify(args) -> int:
    from .checks import CHECKS, run_checks

    only = None
    if args.only:
        only = [k for part in args.only for k in part.split(",") if k]
        unknown = [k for k in only if k not in CHECKS]
        if unknown:
            raise InvalidInputError(f"unknown checks {unknown}; choose from {list(CHECKS)}")
    results = []
    for r in run_checks(only, args.seed, args.trials):
        print(r.line(), file=sys.stderr, flush=True)
        results.append(r)
    ok = all(r.passed for r in results)
    report = {"version": __version__, "passed": ok, "checks": [r.to_dict() for r in results]}
    text = json.dumps(report, indent=2, default=str) + "\n"
    if args.json:
        _write_text(args.json, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else 1


# -- entry point ------------------------------------------------------------


def _positive_float(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be a positive number")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="steinerlab", description="Steiner symmetrization processes in the plane.")
    p.add_argument("--version", action="version", version=f"steinerlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one symmetrization process")
    src = r.add_argument_group("body")
    src.add_argument("--input", metavar="PATH", help="body JSON, or a JSON list of points")
    src.add_argument("--generate", metavar="SPEC", help="generator string, e.g. regular:5 or random:8,3")
    r.add_argument("--schedule", required=True, metavar="SPEC")
    r.add_argument("--eps", type=_positive_float, default=1e-9)
    r.add_argument("--max-iters", type=int, default=100_000)
    r.add_argument("--window", type=int, default=None)
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--trace", metavar="PATH", help="JSONL trace output")
    r.add_argument("--csv", metavar="PATH", help="per-iteration metric table")
    r.add_argument("--svg-every", type=int, default=None, metavar="N")
    r.add_argument("--svg-dir", metavar="PATH")
    r.add_argument("--oracle-check", action="store_true", help="compare every step with the grid engine (slow)")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("experiment-rates", help="convergence-rate sweep over schedule families")
    e.add_argument("--preset", default="s6-triangle")
    e.add_argument("--trials", type=int, default=10)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--eps", type=_positive_float, default=1e-9)
    e.add_argument("--max-iters", type=int, default=20_000)
    e.add_argument("--weights", metavar="W1,W2,W3", help="add an i.i.d. random family with these weights")
    e.add_argument("--input", metavar="PATH")
    e.add_argument("--generate", metavar="SPEC", help="fixed start body (default: random:8,<seed>)")
    e.add_argument("--csv", metavar="PATH")
    e.set_defaults(func=cmd_experiment_rates)

    v = sub.add_parser("verify", help="run the randomized check suites")
    v.add_argument("--only", action="append", metavar="KEYS", help="comma-separated suite keys")
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--trials", type=int, default=None)
    v.add_argument("--json", metavar="PATH", help="write the report here instead of stdout")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    level = os.environ.get("STEINER_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidInputError as exc:
        print(f"steinerlab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
