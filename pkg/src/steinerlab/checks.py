"""Randomized checks of the monotonicity and convergence statements.

Each ``check_*`` function runs one suite and returns a :class:`CheckResult`.
The acceptance tests and ``steinerlab verify`` call the same functions, so
both report identical numbers for identical seeds.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .functionals import mixed_area, omega
from .generators import random_direction_set, random_polygon
from .geom2d import (
    DEFAULT_TOLERANCES,
    Direction,
    Tolerances,
    area,
    circumradius,
    diameter,
    disk_polygon,
    hausdorff,
    inradius,
    mean_width,
    minkowski_sum,
    origin_circumradius,
    origin_inradius,
    perimeter,
    point,
    segment,
    support_difference_range,
)
from .process import (
    RunConfig,
    Schedule,
    counterexample_nonidempotent,
    run,
    trace_to_jsonl,
    verify_idempotence,
    verify_limit_symmetry,
)
from .raster import grid_area, grid_hausdorff, grid_steiner, rasterize
from .symmetrize import steiner

__all__ = ["CHECKS", "CheckResult", "run_checks"]

# Convergence runs use a finer pruning threshold. Pruning noise puts a floor
# under the fixpoint residual, roughly 1.1e-8 at area_tol 1e-13 and 2.4e-9
# at 1e-14, so eps = 1e-8 needs the latter.
PROCESS_TOLERANCES = Tolerances(area_tol=1e-14)


@dataclass
class CheckResult:
    key: str
    title: str
    passed: bool
    trials: int
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        extra = ", ".join(f"{k}={_fmt(v)}" for k, v in self.details.items())
        return f"[{mark}] {self.key}: {self.title} ({self.trials} trials, {self.seconds:.1f}s) {extra}"

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "title": self.title,
            "passed": self.passed,
            "trials": self.trials,
            "seconds": round(self.seconds, 3),
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _random_dir(rng) -> Direction:
    return Direction.from_angle(float(rng.uniform(0.0, math.pi)))


# -- single-step suites -----------------------------------------------------


def check_volume(seed: int = 0, trials: int = 1000) -> CheckResult:
    """Area is unchanged by one symmetrization."""
    rng = np.random.default_rng(seed)
    cases = [(random_polygon(rng, 3, 20), _random_dir(rng)) for _ in range(trials)]
    steiner(*cases[0])  # compile outside the timed loop
    t0 = time.perf_counter()
    worst = 0.0
    for K, u in cases:
        A = area(K)
        worst = max(worst, abs(area(steiner(K, u)) - A) / A)
    dt = time.perf_counter() - t0
    passed = worst <= 1e-9 and dt < 5.0
    return CheckResult("volume", "area preserved, |dA|/A <= 1e-9, under 5 s", passed, trials, dt,
                       {"max_rel_area_change": worst, "seconds_limit": 5.0})


def check_monotone(seed: int = 1, trials: int = 1000, slack: float = 1e-9) -> CheckResult:
    """Perimeter, mean width, circumradius and diameter do not grow; inradius does not shrink."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    worst = {k: -math.inf for k in ("perimeter", "mean_width", "circumradius", "diameter", "inradius",
                                    "origin_R", "origin_r")}
    for _ in range(trials):
        K = random_polygon(rng, 3, 20)
        u = _random_dir(rng)
        S = steiner(K, u)
        worst["perimeter"] = max(worst["perimeter"], perimeter(S) - perimeter(K))
        worst["mean_width"] = max(worst["mean_width"], mean_width(S) - mean_width(K))
        worst["circumradius"] = max(worst["circumradius"], circumradius(S).radius - circumradius(K).radius)
        worst["diameter"] = max(worst["diameter"], diameter(S) - diameter(K))
        worst["inradius"] = max(worst["inradius"], inradius(K).radius - inradius(S).radius)
        # origin-centered form: rB in K in RB carries over to the symmetral
        worst["origin_R"] = max(worst["origin_R"], origin_circumradius(S) - origin_circumradius(K))
        worst["origin_r"] = max(worst["origin_r"], origin_inradius(K) - origin_inradius(S))
    dt = time.perf_counter() - t0
    passed = all(v <= slack for v in worst.values())
    return CheckResult("rRsu", "perimeter/width/radii/diameter monotone under one step", passed, trials, dt,
                       {f"worst_{k}": v for k, v in worst.items()})


def check_steinsum(seed: int = 2, trials: int = 500, slack: float = 1e-9) -> CheckResult:
    """s_u(K + L) contains s_u K + s_u L."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    worst = -math.inf
    for _ in range(trials):
        K = random_polygon(rng, 3, 12)
        L = random_polygon(rng, 3, 12)
        u = _random_dir(rng)
        big = steiner(minkowski_sum(K, L), u)
        small = minkowski_sum(steiner(K, u), steiner(L, u))
        _, hi = support_difference_range(small, big)
        worst = max(worst, hi)
    dt = time.perf_counter() - t0
    return CheckResult("steinsum", "h of s(K+L) >= h of sK + sL", worst <= slack, trials, dt,
                       {"max_support_excess": worst})


def check_reduce(seed: int = 3, trials: int = 500, slack: float = 1e-9) -> CheckResult:
    """The mixed area does not grow when both bodies are symmetrized."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    worst = -math.inf
    for _ in range(trials):
        K = random_polygon(rng, 3, 12)
        L = random_polygon(rng, 3, 12)
        u = _random_dir(rng)
        worst = max(worst, mixed_area(steiner(K, u), steiner(L, u)) - mixed_area(K, L))
    dt = time.perf_counter() - t0
    return CheckResult("reduce", "V(sK, sL) <= V(K, L)", worst <= slack, trials, dt, {"max_increase": worst})


def check_dend(seed: int = 4, trials: int = 500, tol: Tolerances = DEFAULT_TOLERANCES) -> CheckResult:
    """The layering function does not decrease, and grows strictly unless the body is fixed.

    Every fifth trial symmetrizes an already symmetric body, so the equality
    branch is exercised alongside the strict one.
    """
    rng = np.random.default_rng(seed)
    q2 = 2.0 * tol.quadrature_tol
    t0 = time.perf_counter()
    worst_drop = -math.inf
    min_strict = math.inf
    max_equal = 0.0
    n_strict = n_equal = 0
    fails = 0
    for t in range(trials):
        K = random_polygon(rng, 3, 12)
        u = _random_dir(rng)
        if t % 5 == 4:
            K = steiner(K, u, tol)
        S = steiner(K, u, tol)
        gain = omega(S, tol).value - omega(K, tol).value
        worst_drop = max(worst_drop, -gain)
        if gain < -q2:
            fails += 1
        d = hausdorff(S, K)
        if d >= 1e-3 and area(K) >= 0.1:
            n_strict += 1
            min_strict = min(min_strict, gain)
            if not gain > q2:
                fails += 1
        if d <= 1e-9:
            n_equal += 1
            max_equal = max(max_equal, abs(gain))
            if abs(gain) > q2:
                fails += 1
    dt = time.perf_counter() - t0
    passed = fails == 0 and dt < 60.0 and n_strict > 0 and n_equal > 0
    return CheckResult("dend", "layering function monotone, strict unless fixed, under 60 s", passed, trials, dt,
                       {"worst_drop": worst_drop, "strict_cases": n_strict, "min_strict_gain": min_strict,
                        "equal_cases": n_equal, "max_equal_gap": max_equal, "seconds_limit": 60.0})


# -- process suites ---------------------------------------------------------


@dataclass
class ProcessCase:
    index: int
    body_kind: str
    m: int
    schedule: Schedule
    trace: object
    seconds: float = 0.0


def findir_cases(seed: int = 2024, trials: int = 100, eps: float = 1e-8, max_iters: int = 200_000,
                 tol: Tolerances = PROCESS_TOLERANCES):
    """Random bodies, 2..6 uniform random directions, uniform random schedules.

    Every tenth start is a segment (a body without interior) cut from the
    drawn polygon. Trial t uses schedule seed t.
    """
    rng = np.random.default_rng(seed)
    out = []
    for t in range(trials):
        K = random_polygon(rng, 3, 12)
        if t % 10 == 9:
            K = segment(K.vertices[0], K.vertices[-1])
        m = int(rng.integers(2, 7))
        dirs = [Direction.from_angle(x) for x in rng.uniform(0.0, math.pi, m)]
        S = Schedule.random(dirs, seed=t)
        t0 = time.perf_counter()
        trace = run(K, S, RunConfig(eps=eps, max_iters=max_iters, tol=tol, metrics="minimal"))
        out.append(ProcessCase(t, K.kind, m, S, trace, time.perf_counter() - t0))
    return out


def check_findir(cases=None, seed: int = 2024, trials: int = 100, sym_tol: float = 1e-7) -> CheckResult:
    """Random finite-direction processes converge to bodies symmetric in every direction."""
    t0 = time.perf_counter()
    if cases is None:
        cases = findir_cases(seed, trials)
    not_conv = [c.index for c in cases if not c.trace.converged]
    asym = [c.index for c in cases if c.trace.converged and not verify_limit_symmetry(c.trace, tol=sym_tol)]
    iters = [c.trace.iterations for c in cases]
    dt = time.perf_counter() - t0 + sum(c.seconds for c in cases)
    return CheckResult("findir", "random processes reach residual < 1e-8 with symmetric limits",
                       not not_conv and not asym, len(cases), dt,
                       {"not_converged": not_conv, "asymmetric": asym, "max_iters_used": max(iters),
                        "segment_starts": sum(c.body_kind != "polygon" for c in cases)})


def check_idem(cases=None, seed: int = 2024, trials: int = 50, bound: float = 2e-8) -> CheckResult:
    """Re-running the schedule from a limit leaves it (nearly) unchanged."""
    t0 = time.perf_counter()
    if cases is None:
        cases = findir_cases(seed, trials)
    cases = [c for c in cases if c.trace.converged][:trials]
    worst = 0.0
    for c in cases:
        worst = max(worst, verify_idempotence(c.trace.final_body, c.schedule, c.trace.config))
    dt = time.perf_counter() - t0
    return CheckResult("idem", "second run from a limit moves it <= 2e-8", len(cases) == trials and worst <= bound,
                       len(cases), dt, {"max_move": worst})


def check_per(seed: int = 7, trials: int = 20, eps: float = 1e-8) -> CheckResult:
    """Periodic processes converge, and each limit is fixed by every direction."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    bad = []
    worst = 0.0
    for t in range(trials):
        K = random_polygon(rng, 3, 12)
        m = int(rng.integers(2, 5))
        dirs = [Direction.from_angle(x) for x in random_direction_set(rng, m)]
        # rational angle sets keep these runs short; irrational pairs are the irrat suite
        dirs = [Direction.from_degrees(round(d.degrees / 15.0) * 15.0) for d in dirs]
        if len({round(d.degrees) % 180 for d in dirs}) < len(dirs):
            dirs = [Direction.from_degrees(15.0 * (k + 1)) for k in range(m)]
        S = Schedule.periodic(dirs)
        trace = run(K, S, RunConfig(eps=eps, max_iters=200_000, tol=PROCESS_TOLERANCES, metrics="minimal"))
        if not trace.converged:
            bad.append(t)
            continue
        res = max(hausdorff(steiner(trace.final_body, v, PROCESS_TOLERANCES), trace.final_body) for v in S.dirs)
        worst = max(worst, res)
        if res >= eps:
            bad.append(t)
    dt = time.perf_counter() - t0
    return CheckResult("per", "periodic processes converge to limits fixed by each direction", not bad, trials, dt,
                       {"failed": bad, "max_residual": worst})


def check_irrat(seed: int = 8, eps: float = 1e-6, max_iters: int = 200_000) -> CheckResult:
    """Two directions one radian apart round any body into a disk."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    K = random_polygon(rng, 5, 12)
    A = area(K)
    S = Schedule.periodic([Direction.from_angle(0.0), Direction.from_angle(1.0)])
    trace = run(K, S, RunConfig(eps=eps, max_iters=max_iters, metrics="minimal"))
    F = trace.final_body
    spread = circumradius(F).radius - inradius(F).radius
    to_disk = hausdorff(F, disk_polygon(A, 256))
    dt = time.perf_counter() - t0
    passed = spread < 1e-3 and to_disk < 2e-3
    return CheckResult("irrat", "two directions 1 rad apart give a disk", passed, 1, dt,
                       {"verdict": trace.verdict, "iterations": trace.iterations, "R_minus_r": spread,
                        "hausdorff_to_disk": to_disk})


def check_counterexample() -> CheckResult:
    """u once and v forever is not idempotent on a segment."""
    t0 = time.perf_counter()
    gap = counterexample_nonidempotent(Direction.from_degrees(0), Direction.from_degrees(45), segment((0, 0), (1, 0)))
    return CheckResult("counterexample", "s_v s_u K differs from its square for a segment", gap > 0.01, 1,
                       time.perf_counter() - t0, {"gap": gap})


def check_oracle(seed: int = 9, trials: int = 50, resolution: int = 2048, extent: float = 1.0) -> CheckResult:
    """Exact symmetral against the grid engine."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    worst_area = 0.0
    worst_cells = 0.0
    for t in range(trials):
        K = random_polygon(rng, 3, 12, radius=0.95)
        u = _random_dir(rng)
        G = grid_steiner(rasterize(K, resolution, extent), u)
        E = rasterize(steiner(K, u), resolution, extent)
        worst_area = max(worst_area, abs(grid_area(G) - grid_area(E)) / grid_area(E))
        worst_cells = max(worst_cells, grid_hausdorff(G, E) / G.cell_size)
    dt = time.perf_counter() - t0
    return CheckResult("oracle", "grid engine matches exact symmetral (0.5% area, 2 cells)",
                       worst_area <= 0.005 and worst_cells <= 2.0, trials, dt,
                       {"max_rel_area_diff": worst_area, "max_hausdorff_cells": worst_cells})


def check_discontinuity(steps: int = 12) -> CheckResult:
    """Segments tilting toward u collapse to a point although the limit segment is fixed."""
    t0 = time.perf_counter()
    u = Direction.from_angle(0.0)
    origin = point(0.0, 0.0)
    dists = []
    for i in range(1, steps + 1):
        ui = Direction.from_angle(2.0 ** -i)
        K_i = segment(-ui.vector, ui.vector)
        dists.append(hausdorff(steiner(K_i, u), origin))
    K = segment(-u.vector, u.vector)
    fixed = hausdorff(steiner(K, u), K)
    decreasing = all(b < a for a, b in zip(dists, dists[1:]))
    passed = decreasing and dists[-1] < 1e-3 and fixed == 0.0
    return CheckResult("discontinuity", "s_u K_i -> point while s_u K = K", passed, steps, time.perf_counter() - t0,
                       {"last_distance": dists[-1], "limit_gap": fixed})


def check_determinism(seed: int = 10) -> CheckResult:
    """Identical configurations give byte-identical JSONL traces."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    K = random_polygon(rng, 4, 10)
    dirs = [Direction.from_angle(x) for x in random_direction_set(rng, 3)]
    outs = []
    for _ in range(2):
        S = Schedule.random(dirs, seed=seed)
        outs.append(trace_to_jsonl(run(K, S, RunConfig(eps=1e-9, max_iters=40))))
    return CheckResult("determinism", "repeat runs give byte-identical traces", outs[0] == outs[1], 2,
                       time.perf_counter() - t0, {"bytes": len(outs[0])})


CHECKS = {
    "volume": check_volume,
    "rRsu": check_monotone,
    "steinsum": check_steinsum,
    "reduce": check_reduce,
    "dend": check_dend,
    "findir": check_findir,
    "idem": check_idem,
    "per": check_per,
    "irrat": check_irrat,
    "counterexample": check_counterexample,
    "oracle": check_oracle,
    "discontinuity": check_discontinuity,
    "determinism": check_determinism,
}


def run_checks(only=None, seed: int | None = None, trials: int | None = None) -> list[CheckResult]:
    """Run the named checks (all by default); seed and trials override the defaults."""
    keys = list(CHECKS) if not only else list(only)
    unknown = [k for k in keys if k not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks: {unknown}; choose from {list(CHECKS)}")
    results = []
    shared = None
    for k in keys:
        fn = CHECKS[k]
        kwargs = {}
        code = fn.__code__.co_varnames[: fn.__code__.co_argcount]
        if seed is not None and "seed" in code:
            kwargs["seed"] = seed
        if trials is not None and "trials" in code:
            kwargs["trials"] = trials
        if k in ("findir", "idem") and not kwargs:
            # the idempotence suite reuses the converged limits of the findir suite
            if shared is None:
                shared = findir_cases()
            kwargs["cases"] = shared
        results.append(fn(**kwargs))
    return results
