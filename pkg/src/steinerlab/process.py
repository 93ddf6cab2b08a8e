"""Steiner processes over a finite set of permitted directions.

A process applies s_{u_1}, s_{u_2}, ... to a starting body, with every u_i
drawn from a fixed list of directions by a schedule. The runner records
the monotone functionals after each step and stops once the body is
(numerically) fixed by every direction the schedule keeps returning to.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import __version__
from .functionals import omega
from .geom2d import (
    DEFAULT_TOLERANCES,
    ConvexBody2,
    Direction,
    InvalidInputError,
    Tolerances,
    area,
    body_to_json,
    circumradius,
    diameter,
    hausdorff,
    inradius,
    origin_circumradius,
    perimeter,
)
from .symmetrize import is_symmetric, steiner, steiner_step

__all__ = [
    "CONVERGED",
    "MAX_ITERS_REACHED",
    "RECORD_KEYS",
    "InsufficientDataError",
    "PreconditionError",
    "ProcessTrace",
    "RateEstimate",
    "RunConfig",
    "Schedule",
    "boundedness_check",
    "check_trace_invariants",
    "counterexample_nonidempotent",
    "distances_to_final",
    "estimate_rate",
    "growing_blocks_sequence",
    "interleaved_sequence",
    "occurrence_counts",
    "periodic_triple_sequence",
    "run",
    "trace_to_jsonl",
    "verify_idempotence",
    "verify_limit_symmetry",
    "write_jsonl",
]

CONVERGED = "Converged"
MAX_ITERS_REACHED = "MaxItersReached"
PRNG_ID = "numpy.random.PCG64"
RANDOM_BLOCK = 4096
DISTINCT_TOL = 1e-12

RECORD_KEYS = (
    "iter",
    "direction_index",
    "direction_deg",
    "area",
    "perimeter",
    "mean_width",
    "omega",
    "inradius",
    "circumradius",
    "diameter",
    "hausdorff_step",
    "fixpoint_residual",
    "pruned_area",
    "pruned_height",
    "n_vertices",
)

METRIC_LEVELS = ("full", "basic", "minimal")


class PreconditionError(RuntimeError):
    """An operation was called on a trace or body that does not meet its precondition."""


class InsufficientDataError(ValueError):
    """Too few usable data points for a fit."""


# -- schedules --------------------------------------------------------------


def _canonical_dirs(dirs) -> tuple[Direction, ...]:
    out = []
    for d in dirs:
        if not isinstance(d, Direction):
            d = Direction.from_angle(float(d))
        out.append(d.canonical())
    if not out:
        raise InvalidInputError("a schedule needs at least one direction")
    for i in range(len(out)):
        for j in range(i):
            gap = abs(out[i].theta - out[j].theta)
            if min(gap, math.pi - gap) <= DISTINCT_TOL:
                raise InvalidInputError(
                    f"directions {j} and {i} coincide up to sign ({out[j].degrees:.12g} and {out[i].degrees:.12g} deg)"
                )
    return tuple(out)


@dataclass(frozen=True)
class Schedule:
    """A rule for picking the next direction index from ``dirs``.

    ``kind`` is ``"periodic"`` (cycle through dirs), ``"random"`` (i.i.d.
    draws with ``weights`` from a seeded PCG64 stream) or ``"explicit"``
    (the index list ``sequence``, after which ``sequence[cycle_from:]``
    repeats forever; by default only the last entry repeats).
    """

    kind: str
    dirs: tuple[Direction, ...]
    weights: tuple[float, ...] | None = None
    seed: int | None = None
    sequence: tuple[int, ...] | None = None
    cycle_from: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "dirs", _canonical_dirs(self.dirs))
        m = len(self.dirs)
        if self.kind == "periodic":
            return
        if self.kind == "random":
            w = np.full(m, 1.0 / m) if self.weights is None else np.asarray(self.weights, dtype=float)
            if w.shape != (m,) or not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise InvalidInputError(f"random schedule needs {m} strictly positive weights")
            if abs(float(w.sum()) - 1.0) > 1e-12:
                raise InvalidInputError(f"weights must sum to 1, got {float(w.sum())!r}")
            object.__setattr__(self, "weights", tuple(float(x) for x in w))
            return
        if self.kind == "explicit":
            if not self.sequence:
                raise InvalidInputError("explicit schedule needs a non-empty index sequence")
            seq = tuple(int(i) for i in self.sequence)
            if any(i < 0 or i >= m for i in seq):
                raise InvalidInputError(f"explicit schedule indices must lie in [0, {m})")
            start = len(seq) - 1 if self.cycle_from is None else int(self.cycle_from)
            if not 0 <= start < len(seq):
                raise InvalidInputError(f"cycle_from must lie in [0, {len(seq)})")
            object.__setattr__(self, "sequence", seq)
            object.__setattr__(self, "cycle_from", start)
            return
        raise InvalidInputError(f"unknown schedule kind {self.kind!r}")

    @classmethod
    def periodic(cls, dirs) -> Schedule:
        return cls("periodic", tuple(dirs))

    @classmethod
    def random(cls, dirs, weights=None, seed: int | None = None) -> Schedule:
        return cls("random", tuple(dirs), weights=None if weights is None else tuple(weights), seed=seed)

    @classmethod
    def explicit(cls, sequence, dirs, cycle_from: int | None = None) -> Schedule:
        return cls("explicit", tuple(dirs), sequence=tuple(sequence), cycle_from=cycle_from)

    @property
    def m(self) -> int:
        return len(self.dirs)

    def indices(self, seed: int | None = None) -> Iterator[int]:
        """Endless stream of direction indices."""
        m = self.m
        if self.kind == "periodic":
            i = 0
            while True:
                yield i
                i = (i + 1) % m
        elif self.kind == "random":
            rng = np.random.Generator(np.random.PCG64(self.effective_seed(seed)))
            p = np.asarray(self.weights)
            while True:
                yield from rng.choice(m, size=RANDOM_BLOCK, p=p).tolist()
        else:
            yield from self.sequence
            tail = self.sequence[self.cycle_from:]
            while True:
                yield from tail

    def recurring(self) -> tuple[int, ...]:
        """Indices of the directions emitted infinitely often."""
        if self.kind == "explicit":
            return tuple(sorted(set(self.sequence[self.cycle_from:])))
        return tuple(range(self.m))

    def effective_seed(self, seed: int | None) -> int | None:
        if self.kind != "random":
            return None
        return self.seed if self.seed is not None else (0 if seed is None else seed)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "dirs_deg": [u.degrees for u in self.dirs]}
        if self.kind == "random":
            d["weights"] = list(self.weights)
            d["seed"] = self.seed
        if self.kind == "explicit":
            d["sequence"] = list(self.sequence)
            d["cycle_from"] = self.cycle_from
        return d


def periodic_triple_sequence(n: int) -> list[int]:
    """u, v, w, u, v, w, ... (first n entries, indices 0, 1, 2)."""
    return [i % 3 for i in range(n)]


def interleaved_sequence(n: int) -> list[int]:
    """(u v w) once then v, (u v w) twice then v, three times then v, ..."""
    out: list[int] = []
    k = 1
    while len(out) < n:
        out += [0, 1, 2] * k + [1]
        k += 1
    return out[:n]


def growing_blocks_sequence(n: int) -> list[int]:
    """(u v) once then w, (u v) twice then w, three times then w, ..."""
    out: list[int] = []
    k = 1
    while len(out) < n:
        out += [0, 1] * k + [2]
        k += 1
    return out[:n]


# -- runner -----------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Stopping rule and bookkeeping for :func:`run`.

    ``window`` defaults to the number of permitted directions. ``metrics``
    selects how much is recorded per step: ``"full"`` records everything,
    ``"basic"`` skips the layering function and the inradius (the two
    costly columns), ``"minimal"`` keeps only area and vertex counts (the
    step distance appears only where the convergence check computed it).
    """

    eps: float = 1e-9
    max_iters: int = 100_000
    window: int | None = None
    seed: int | None = None
    tol: Tolerances = DEFAULT_TOLERANCES
    metrics: str = "full"
    record_every: int = 1

    def __post_init__(self):
        if not (self.eps > 0 and math.isfinite(self.eps)):
            raise InvalidInputError(f"eps must be positive, got {self.eps!r}")
        if int(self.max_iters) < 1:
            raise InvalidInputError(f"max_iters must be >= 1, got {self.max_iters!r}")
        if self.window is not None and int(self.window) < 1:
            raise InvalidInputError(f"window must be >= 1, got {self.window!r}")
        if self.metrics not in METRIC_LEVELS:
            raise InvalidInputError(f"metrics must be one of {METRIC_LEVELS}, got {self.metrics!r}")
        if int(self.record_every) < 1:
            raise InvalidInputError(f"record_every must be >= 1, got {self.record_every!r}")

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "max_iters": self.max_iters,
            "window": self.window,
            "seed": self.seed,
            "tolerances": self.tol.to_dict(),
            "metrics": self.metrics,
            "record_every": self.record_every,
        }


@dataclass
class ProcessTrace:
    records: list[dict]
    final_body: ConvexBody2
    verdict: str
    iterations: int
    schedule: Schedule
    config: RunConfig
    initial_body: ConvexBody2
    metadata: dict = field(default_factory=dict)

    def column(self, key: str) -> np.ndarray:
        """One record field as a float array (missing values become NaN)."""
        return np.array([np.nan if r[key] is None else r[key] for r in self.records], dtype=float)

    @property
    def converged(self) -> bool:
        return self.verdict == CONVERGED


def _inradius_value(K: ConvexBody2) -> float:
    return inradius(K).radius if K.is_polygon else 0.0


def _record(i, j, u, K, step_dist, residual, pruned, height, metrics, tol) -> dict:
    full = metrics == "full"
    some = metrics != "minimal"
    p = perimeter(K) if some else None
    return {
        "iter": i,
        "direction_index": j,
        "direction_deg": None if u is None else u.degrees,
        "area": area(K),
        "perimeter": p,
        "mean_width": p / math.pi if some else None,
        "omega": omega(K, tol).value if full else None,
        "inradius": _inradius_value(K) if full else None,
        "circumradius": circumradius(K).radius if some else None,
        "diameter": diameter(K) if some else None,
        "hausdorff_step": step_dist,
        "fixpoint_residual": residual,
        "pruned_area": pruned,
        "pruned_height": height,
        "n_vertices": K.n_vertices,
    }


def _residual_below(K, dirs, order, known, eps, tol):
    """fixpoint_residual(K, dirs[order]) if it is below eps, else None.

    Distances in ``known`` are reused (values >= eps may be lower bounds),
    and evaluation stops at the first direction that moves K by eps or more.
    """
    worst = 0.0
    for k in sorted(order, key=lambda k: k not in known):
        d = known[k] if k in known else hausdorff(steiner(K, dirs[k], tol), K, cap=eps)
        if d >= eps:
            return None
        worst = max(worst, d)
    return worst


def run(K: ConvexBody2, schedule: Schedule, config: RunConfig | None = None) -> ProcessTrace:
    """Iterate K_i = s_{u_i} K_{i-1} along the schedule.

    Every ``window`` steps the fixpoint residual over the recurring
    directions is evaluated; the run stops as Converged once it drops
    below ``eps``, or as MaxItersReached after ``max_iters`` steps.

    The residual at a check is a max over one-step distances, so it is
    evaluated direction by direction and abandoned at the first one that
    moves the body by ``eps`` or more; the record then carries ``None`` in
    its ``fixpoint_residual`` field. The next step of the process is
    computed first and reused, and the direction just applied goes last.
    """
    if config is None:
        config = RunConfig()
    if not isinstance(schedule, Schedule):
        raise InvalidInputError("run needs a Schedule")
    if not isinstance(K, ConvexBody2):
        raise InvalidInputError("run needs a ConvexBody2 starting body")
    tol = config.tol
    K0 = K
    window = config.window or schedule.m
    recurring_idx = sorted(schedule.recurring())

    def recurring_order(last):
        # the direction just applied moves the body least, so it goes last
        return [k for k in recurring_idx if k != last] + ([last] if last in recurring_idx else [])

    stride = config.record_every
    max_iters = config.max_iters
    records = [_record(0, None, None, K, None, None, 0.0, 0.0, config.metrics, tol)]
    stream = schedule.indices(config.seed)
    verdict = MAX_ITERS_REACHED
    pruned = 0.0
    height = 0.0
    i = 0
    last = K
    ahead = None
    for i in range(1, max_iters + 1):
        if ahead is None:
            j = next(stream)
            step = steiner_step(K, schedule.dirs[j], tol)
            dist = None
        else:
            j, step, dist = ahead
            ahead = None
        u = schedule.dirs[j]
        Kn = step.body
        pruned += step.pruned_area
        height = max(height, step.pruned_height)
        recorded = i % stride == 0 or i == max_iters
        residual = None
        done = False
        if i % window == 0:
            known = {}
            if i < max_iters:
                j2 = next(stream)
                step2 = steiner_step(Kn, schedule.dirs[j2], tol)
                d2 = hausdorff(step2.body, Kn, cap=config.eps)
                ahead = (j2, step2, d2 if d2 < config.eps else None)
                known[j2] = d2
            residual = _residual_below(Kn, schedule.dirs, recurring_order(j), known, config.eps, tol)
            done = residual is not None
        if recorded or done:
            if config.metrics == "minimal":
                dist = dist if stride == 1 else None
            elif dist is None or stride != 1:
                dist = hausdorff(Kn, K if stride == 1 else last)
            records.append(_record(i, j, u, Kn, dist, residual, pruned, height, config.metrics, tol))
            pruned = 0.0
            height = 0.0
            last = Kn
        K = Kn
        if done:
            verdict = CONVERGED
            break
    metadata = {
        "version": __version__,
        "schedule": schedule.to_dict(),
        "seed": schedule.effective_seed(config.seed),
        "prng": PRNG_ID if schedule.kind == "random" else None,
        "eps": config.eps,
        "max_iters": config.max_iters,
        "window": window,
        "tolerances": tol.to_dict(),
        "metrics": config.metrics,
    }
    return ProcessTrace(records, K, verdict, i, schedule, config, K0, metadata)


# -- trace checks -----------------------------------------------------------


def check_trace_invariants(trace: ProcessTrace, slack: float = 1e-9) -> dict[str, tuple[bool, float]]:
    """Column-wise monotonicity of a trace, as ``{column: (ok, worst violation)}``.

    Area must stay constant and perimeter, mean width, circumradius and
    diameter must not grow; inradius and the layering function must not
    shrink. Vertex pruning deletes small corner triangles, which can only
    lower the first group but may cost area, inradius and layering value;
    those three checks therefore also admit the recorded pruning loss
    (cumulative pruned area, pruned triangle height, and sqrt(pi)/2 times
    the pruned area, respectively).
    """
    qtol = trace.config.tol.quadrature_tol
    out: dict[str, tuple[bool, float]] = {}

    A = trace.column("area")
    lost = np.cumsum(trace.column("pruned_area"))
    a0 = A[0]
    dev = np.abs(A - a0) - (slack * max(a0, 1.0) + lost)
    out["area"] = (bool(np.all(dev <= 0)), float(max(dev.max(), 0.0)))

    for key in ("perimeter", "mean_width", "circumradius", "diameter"):
        x = trace.column(key)
        if np.all(np.isnan(x)):
            continue
        rise = np.diff(x) - slack * np.maximum(1.0, np.abs(x[:-1]))
        worst = float(np.nanmax(rise, initial=-np.inf))
        out[key] = (bool(worst <= 0), max(worst, 0.0))

    pruned = trace.column("pruned_area")[1:]
    heights = trace.column("pruned_height")[1:]
    r = trace.column("inradius")
    if not np.all(np.isnan(r)):
        drop = -np.diff(r) - slack - heights
        worst = float(np.nanmax(drop, initial=-np.inf))
        out["inradius"] = (bool(worst <= 0), max(worst, 0.0))
    w = trace.column("omega")
    if not np.all(np.isnan(w)):
        drop = -np.diff(w) - 2.0 * qtol - 0.5 * math.sqrt(math.pi) * pruned
        worst = float(np.nanmax(drop, initial=-np.inf))
        out["omega"] = (bool(worst <= 0), max(worst, 0.0))
    return out


def _symmetry_targets(trace: ProcessTrace, dirs) -> list[Direction]:
    recurring = {trace.schedule.dirs[i].theta for i in trace.schedule.recurring()}
    targets = []
    for d in dirs:
        c = (d if isinstance(d, Direction) else Direction.from_angle(float(d))).canonical()
        if any(min(abs(c.theta - t), math.pi - abs(c.theta - t)) <= DISTINCT_TOL for t in recurring):
            targets.append(c)
    return targets


def verify_limit_symmetry(trace: ProcessTrace, dirs=None, tol: float = 1e-7) -> bool:
    """The limit is mirror-symmetric across u-perp for each recurring u in dirs.

    Directions of ``dirs`` that the schedule emits only finitely often are
    skipped; ``dirs`` defaults to the schedule's permitted set.
    """
    if not trace.converged:
        raise PreconditionError(f"limit symmetry needs a converged trace, got {trace.verdict}")
    if dirs is None:
        dirs = trace.schedule.dirs
    return all(is_symmetric(trace.final_body, u, tol) for u in _symmetry_targets(trace, dirs))


def occurrence_counts(trace: ProcessTrace) -> dict[int, int]:
    """How often each direction index was applied in the recorded steps."""
    counts = {i: 0 for i in range(trace.schedule.m)}
    if trace.config.record_every != 1:
        raise PreconditionError("occurrence counts need a trace recorded at every step")
    for r in trace.records[1:]:
        counts[r["direction_index"]] += 1
    return counts


def verify_idempotence(final: ConvexBody2, schedule: Schedule, config: RunConfig | None = None) -> float:
    """Hausdorff distance between ``final`` and the limit of a second run from it."""
    again = run(final, schedule, config)
    return hausdorff(final, again.final_body)


def counterexample_nonidempotent(u: Direction, v: Direction, K: ConvexBody2, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Gap between s_v s_u K and (s_v s_u)^2 K.

    With u applied once and v forever after, the process limit is s_v s_u K
    but running the same schedule on that limit moves it again.
    """
    dot = u.ux * v.ux + u.uy * v.uy
    gap = abs(u.canonical().theta - v.canonical().theta)
    if abs(dot) <= 1e-6:
        raise InvalidInputError("u and v must not be orthogonal")
    if min(gap, math.pi - gap) <= 1e-6:
        raise InvalidInputError("u and v must be distinct directions")
    once = steiner(steiner(K, u, tol), v, tol)
    twice = steiner(steiner(once, u, tol), v, tol)
    return hausdorff(once, twice)


def _replay(trace: ProcessTrace) -> Iterator[ConvexBody2]:
    # runs are deterministic, so iterates can be regenerated instead of stored
    K = trace.initial_body
    stream = trace.schedule.indices(trace.config.seed)
    yield K
    for _ in range(trace.iterations):
        K = steiner(K, trace.schedule.dirs[next(stream)], trace.config.tol)
        yield K


def distances_to_final(trace: ProcessTrace) -> np.ndarray:
    """hausdorff(K_i, final body) for i = 0..iterations, by deterministic replay."""
    return np.array([hausdorff(K, trace.final_body) for K in _replay(trace)])


@dataclass(frozen=True)
class RateEstimate:
    rate: float
    r2: float
    n_points: int


def estimate_rate(trace: ProcessTrace, distances: np.ndarray | None = None) -> RateEstimate:
    """Least-squares slope of log hausdorff(K_i, limit) against i.

    Only iterates farther than 10·eps from the final body enter the fit.
    """
    if not trace.converged:
        raise PreconditionError(f"rate estimation needs a converged trace, got {trace.verdict}")
    d = distances_to_final(trace) if distances is None else np.asarray(distances, dtype=float)
    i = np.arange(len(d))
    keep = d > 10.0 * trace.config.eps
    if keep.sum() < 10 or trace.iterations < 10:
        raise InsufficientDataError(f"only {int(keep.sum())} iterates lie above 10*eps; need at least 10")
    x = i[keep].astype(float)
    y = np.log(d[keep])
    slope, intercept = np.polyfit(x, y, 1)
    fit = slope * x + intercept
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return RateEstimate(float(slope), r2, int(keep.sum()))


def boundedness_check(trace: ProcessTrace, rho: float) -> bool:
    """Every iterate stays inside the origin-centered disk of radius rho."""
    r0 = origin_circumradius(trace.initial_body)
    if rho < r0:
        raise PreconditionError(f"rho = {rho!r} is below the initial body's origin radius {r0!r}")
    return all(origin_circumradius(K) <= rho + 1e-9 for K in _replay(trace))


# -- export -----------------------------------------------------------------


def _header(trace: ProcessTrace) -> dict:
    return {"record": "header", **trace.metadata, "initial_body": body_to_json(trace.initial_body)}


def _footer(trace: ProcessTrace) -> dict:
    return {
        "record": "final",
        "verdict": trace.verdict,
        "iterations": trace.iterations,
        "final_body": body_to_json(trace.final_body),
    }


def trace_to_jsonl(trace: ProcessTrace) -> str:
    """Header record, one record per step (keys in RECORD_KEYS order), final record."""
    buf = io.StringIO()
    buf.write(json.dumps(_header(trace)) + "\n")
    for r in trace.records:
        buf.write(json.dumps({k: r[k] for k in RECORD_KEYS}) + "\n")
    buf.write(json.dumps(_footer(trace)) + "\n")
    return buf.getvalue()


def write_jsonl(trace: ProcessTrace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(trace_to_jsonl(trace))
