"""Benchmark harness: error metrics, convergence sweeps, CSV reports.

The example catalog covers the standard battery: a scalar problem with a
linear-in-time exact solution, a 1-D problem with vanishing initial data
and known exact solution, three 1-D and three 2-D initial/source
configurations of varying smoothness, and the acceleration comparison.
Temporal errors are measured against either the exact solution or a
reference contour solution with N_ref nodes on the same mesh; spatial
errors against the exact solution or the halved-mesh solution via P1
prolongation.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import gamma, pi, sqrt
from typing import Callable

import numpy as np

from .cim import (
    Problem,
    ScalarDomain,
    discretize,
    evaluate,
    problem_parameters,
    solve_nodes,
    solve_nodes_accelerated,
)
from .contour import quadrature_nodes
from .fem import (
    InitialData1D,
    InitialData2D,
    Mesh1D,
    Mesh2D,
    assemble,
    l2_error,
    mass_norm,
    prolong_1d,
    prolong_2d,
)
from .symbols import FractionalSymbol, SourceTransform, pole_term, power_term


class BenchError(ValueError):
    """Raised for invalid experiment specifications."""


EXAMPLE_IDS = (
    "ex1_scalar",
    "ex2_vanishing",
    "ex3_1d_case1",
    "ex3_1d_case2",
    "ex3_1d_case3",
    "ex4_2d_case1",
    "ex4_2d_case2",
    "ex4_2d_case3",
)

CSV_HEADER = ["example", "beta", "N", "M", "n", "t", "error", "order", "iar", "wall_ms"]


@dataclass(frozen=True)
class ContourDefaults:
    """Contour-optimizer settings shared by every benchmark run."""

    alpha: float = 0.6767
    delta_prime: float = 0.1023
    d_margin: float = 0.5
    t0: float = 0.1
    lambda_ratio: float = 10.0
    K: float = 1.0


@dataclass(frozen=True)
class ExperimentSpec:
    """One sweep: which example, which parameter lists, which reference."""

    mode: str  # "solve" | "sweep-time" | "sweep-space" | "accel-compare"
    example_id: str
    betas: tuple[float, ...] = (0.5,)
    n_list: tuple[int, ...] = (100,)
    m_list: tuple[int, ...] = (32,)
    n_interp: int = 10
    eval_times: tuple[float, ...] = (0.6,)
    reference: str = "numeric"  # "exact" | "numeric"
    n_ref: int = 200
    output_path: str | None = None
    threads: int = 1
    contour: ContourDefaults = field(default_factory=ContourDefaults)

    def __post_init__(self) -> None:
        if self.example_id not in EXAMPLE_IDS:
            raise BenchError(f"unknown example {self.example_id!r}")
        if self.reference == "numeric" and self.n_list and self.n_ref <= max(self.n_list):
            raise BenchError("numeric reference needs n_ref > every N in the sweep")
        if self.reference == "exact" and self.example_id not in ("ex1_scalar", "ex2_vanishing"):
            raise BenchError("exact reference only available for ex1_scalar/ex2_vanishing")
        if self.reference not in ("exact", "numeric"):
            raise BenchError(f"unknown reference {self.reference!r}")


@dataclass(frozen=True)
class BuiltProblem:
    problem: Problem
    exact: Callable | None  # exact(t) scalar / exact(x, t) 1-D / exact(x, y, t) 2-D


def build_problem(example_id: str, beta: float, M: int, cd: ContourDefaults = ContourDefaults()) -> BuiltProblem:
    """Instantiate one catalog problem on an M-interval mesh (M ignored for scalar)."""
    sym = FractionalSymbol(cd.K, beta)
    common = dict(t0=cd.t0, lambda_ratio=cd.lambda_ratio)
    if example_id == "ex1_scalar":
        c = 1.5 * sqrt(pi)
        src = SourceTransform(
            (
                power_term("one", 1.0 + c * cd.K, 0.0),
                power_term("one", c / gamma(2.0 - beta), 1.0 - beta),
                power_term("one", c, 1.0),
            )
        )
        p = Problem(sym=sym, domain=ScalarDomain(1.0), u0=1.0, source=src, **common)
        return BuiltProblem(p, lambda t: 1.0 + c * t)
    if example_id == "ex2_vanishing":
        c_frac = gamma(2.5) / gamma(2.5 - beta)
        src = SourceTransform(
            (
                power_term("xx", 1.5 * cd.K, 0.5),
                power_term("xx", c_frac, 1.5 - beta),
                power_term("one", 2.0, 1.5),
            )
        )
        factors = {
            "xx": InitialData1D.polynomial((0.0, 1.0, -1.0)),
            "one": InitialData1D.polynomial((1.0,)),
        }
        p = Problem(
            sym=sym, domain=Mesh1D(M), u0=InitialData1D.zero(), source=src,
            spatial_factors=factors, **common,
        )
        return BuiltProblem(p, lambda x, t: t**1.5 * x * (1.0 - x))
    if example_id == "ex3_1d_case1":
        u0 = InitialData1D.indicator(0.0, 0.75, pi**3)
    elif example_id == "ex3_1d_case2":
        from .fem import Piece1D

        u0 = InitialData1D((Piece1D(0.0, 0.75, (0.0, 1.0)), Piece1D(0.75, 1.0, (0.0, -1.0))))
    elif example_id == "ex3_1d_case3":
        u0 = InitialData1D.polynomial((0.0, pi**3, -(pi**3)))
    elif example_id == "ex4_2d_case1":
        u0 = InitialData2D(
            fx=InitialData1D.indicator(0.0, 0.75), fy=InitialData1D.indicator(0.0, 1.0), scale=pi
        )
    elif example_id == "ex4_2d_case2":
        u0 = InitialData2D(
            fx=InitialData1D.polynomial((0.0, 1.0, -1.0)),
            fy=InitialData1D.polynomial((0.0, 1.0, -1.0)),
            scale=4.0 * pi**2,
        )
    elif example_id == "ex4_2d_case3":
        src = SourceTransform((pole_term("fxy", 3.0 * pi**5, 1.5),))

        def fxy(x, y):
            return np.sin(x) * (1.0 - x) ** 2 * y * (y - 1.0)

        p = Problem(
            sym=sym,
            domain=Mesh2D(M),
            u0=InitialData2D(fx=InitialData1D.zero(), fy=InitialData1D.zero()),
            source=src,
            spatial_factors={"fxy": fxy},
            **common,
        )
        return BuiltProblem(p, None)
    else:
        raise BenchError(f"unknown example {example_id!r}")
    domain = Mesh2D(M) if example_id.startswith("ex4") else Mesh1D(M)
    return BuiltProblem(Problem(sym=sym, domain=domain, u0=u0, **common), None)


def _solve_at(p: Problem, N: int, times, disc, cd: ContourDefaults):
    params = problem_parameters(
        p, N, alpha=cd.alpha, delta_prime=cd.delta_prime, d_margin=cd.d_margin
    )
    quad = quadrature_nodes(params, N)
    ns = solve_nodes(p, quad, disc)
    window = (p.t0, p.lambda_ratio * p.t0)
    return [evaluate(ns, t, window) for t in times]


def error_tau(
    bp: BuiltProblem,
    N: int,
    times,
    reference: str = "numeric",
    n_ref: int = 200,
    cd: ContourDefaults = ContourDefaults(),
    disc=None,
    ref_sols=None,
) -> float:
    """Max over ``times`` of the L2 distance to the reference solution.

    The numeric reference is the N_ref-node contour solution on the same
    mesh; ``ref_sols`` can carry precomputed reference evaluations.
    """
    p = bp.problem
    if disc is None:
        disc = discretize(p)
    sols = _solve_at(p, N, times, disc, cd)
    if reference == "exact":
        if bp.exact is None:
            raise BenchError("no exact solution for this example")
        if p.scalar:
            return max(abs(s - bp.exact(t)) for s, t in zip(sols, times))
        return max(
            l2_error(p.domain, s, lambda x, t=t: bp.exact(x, t)) for s, t in zip(sols, times)
        )
    if ref_sols is None:
        ref_sols = _solve_at(p, n_ref, times, disc, cd)
    if p.scalar:
        return max(abs(s - r) for s, r in zip(sols, ref_sols))
    ops = disc.ops
    return max(mass_norm(ops, s - r) for s, r in zip(sols, ref_sols))


def error_h(
    example_id: str,
    beta: float,
    N: int,
    M: int,
    t: float,
    reference: str = "numeric",
    cd: ContourDefaults = ContourDefaults(),
    coarse_sol=None,
    fine_sol=None,
) -> float:
    """Spatial error at one mesh size.

    Exact reference: L2 quadrature error against the exact solution.
    Numeric reference: mass-norm distance between the mesh-M solution
    (prolonged) and the mesh-2M solution.
    """
    bp = build_problem(example_id, beta, M, cd)
    p = bp.problem
    if coarse_sol is None:
        coarse_sol = _solve_at(p, N, [t], discretize(p), cd)[0]
    if reference == "exact":
        if bp.exact is None:
            raise BenchError("no exact solution for this example")
        return l2_error(p.domain, coarse_sol, lambda x: bp.exact(x, t))
    bp2 = build_problem(example_id, beta, 2 * M, cd)
    if fine_sol is None:
        fine_sol = _solve_at(bp2.problem, N, [t], discretize(bp2.problem), cd)[0]
    prolong = prolong_2d if isinstance(p.domain, Mesh2D) else prolong_1d
    fine_ops = assemble(bp2.problem.domain)
    return mass_norm(fine_ops, prolong(np.asarray(coarse_sol), M) - np.asarray(fine_sol))


def spatial_sweep(
    example_id: str,
    beta: float,
    N: int,
    m_list,
    t: float,
    reference: str = "numeric",
    cd: ContourDefaults = ContourDefaults(),
) -> list[tuple[int, float, float | None]]:
    """(M, error, order) rows over a mesh sweep, reusing nested solves."""
    m_list = sorted(m_list)
    sols: dict[int, np.ndarray] = {}
    needed = set(m_list) | ({2 * m for m in m_list} if reference == "numeric" else set())
    for m in sorted(needed):
        bp = build_problem(example_id, beta, m, cd)
        sols[m] = _solve_at(bp.problem, N, [t], discretize(bp.problem), cd)[0]
    rows = []
    prev = None
    for m in m_list:
        if reference == "exact":
            err = error_h(example_id, beta, N, m, t, "exact", cd, coarse_sol=sols[m])
        else:
            err = error_h(example_id, beta, N, m, t, "numeric", cd, coarse_sol=sols[m], fine_sol=sols[2 * m])
        order = None if prev is None else float(np.log2(prev / err)) if err > 0 else None
        rows.append((m, err, order))
        prev = err
    return rows


def iar(
    bp: BuiltProblem,
    N: int,
    n: int,
    t: float,
    cd: ContourDefaults = ContourDefaults(),
    exact: Callable | None = None,
    disc=None,
) -> float:
    """Relative L2 deviation of the accelerated solution from the exact one.

    Without an exact solution, the plain contour solution at the same N
    serves as the high-accuracy surrogate.
    """
    p = bp.problem
    if disc is None:
        disc = discretize(p)
    params = problem_parameters(
        p, N, alpha=cd.alpha, delta_prime=cd.delta_prime, d_margin=cd.d_margin
    )
    quad = quadrature_nodes(params, N)
    ns_acc = solve_nodes_accelerated(p, params, quad, n, disc)
    window = (p.t0, p.lambda_ratio * p.t0)
    u_acc = evaluate(ns_acc, t, window)
    exact = exact if exact is not None else bp.exact
    if exact is not None and not p.scalar:
        denom_fn = lambda *x: exact(*x, t)
        num = l2_error(p.domain, u_acc, denom_fn)
        zero = np.zeros_like(np.asarray(u_acc))
        denom = l2_error(p.domain, zero, denom_fn)
    else:
        u_ref = evaluate(solve_nodes(p, quad, disc), t, window)
        if p.scalar:
            num, denom = abs(u_acc - u_ref), abs(u_ref)
        else:
            num = mass_norm(disc.ops, np.asarray(u_acc) - np.asarray(u_ref))
            denom = mass_norm(disc.ops, np.asarray(u_ref))
    if denom < 1e-14:
        raise BenchError("reference solution vanishes; IAR undefined")
    return num / denom


def accel_deviation(bp: BuiltProblem, N: int, n: int, t: float, cd: ContourDefaults = ContourDefaults()) -> float:
    """Relative L2 deviation between plain and accelerated solutions."""
    p = bp.problem
    disc = discretize(p)
    params = problem_parameters(
        p, N, alpha=cd.alpha, delta_prime=cd.delta_prime, d_margin=cd.d_margin
    )
    quad = quadrature_nodes(params, N)
    window = (p.t0, p.lambda_ratio * p.t0)
    u_plain = evaluate(solve_nodes(p, quad, disc), t, window)
    u_acc = evaluate(solve_nodes_accelerated(p, params, quad, n, disc), t, window)
    if p.scalar:
        return abs(u_acc - u_plain) / abs(u_plain)
    return mass_norm(disc.ops, np.asarray(u_acc) - np.asarray(u_plain)) / mass_norm(
        disc.ops, np.asarray(u_plain)
    )


def timing_compare(
    example_id: str,
    beta: float,
    N: int,
    M: int,
    n: int,
    t: float = 0.4,
    cd: ContourDefaults = ContourDefaults(),
) -> tuple[float, float, float]:
    """Median-of-3 wall times (after one warm-up) for plain vs accelerated solves."""
    bp = build_problem(example_id, beta, M, cd)
    p = bp.problem
    disc = discretize(p)
    params = problem_parameters(
        p, N, alpha=cd.alpha, delta_prime=cd.delta_prime, d_margin=cd.d_margin
    )
    quad = quadrature_nodes(params, N)
    window = (p.t0, p.lambda_ratio * p.t0)

    def plain():
        return evaluate(solve_nodes(p, quad, disc), t, window)

    def accel():
        return evaluate(solve_nodes_accelerated(p, params, quad, n, disc), t, window)

    def timed(fn):
        fn()  # warm-up
        samples = []
        for _ in range(3):
            start = time.perf_counter()
            fn()
            samples.append(time.perf_counter() - start)
        return float(np.median(samples))

    t_plain = timed(plain)
    t_accel = timed(accel)
    return t_plain, t_accel, t_plain / t_accel


# ---------------------------------------------------------------------------
# sweep driver and CSV emission


def _fmt(value, kind: str) -> str:
    if value is None:
        return ""
    if kind == "sci":
        return f"{value:.4E}"
    if kind == "fix":
        return f"{value:.4f}"
    return str(value)


def _row(example, beta, N=None, M=None, n=None, t=None, error=None, order=None, iar_val=None, wall_ms=None):
    return {
        "example": example,
        "beta": _fmt(beta, "raw"),
        "N": _fmt(N, "raw"),
        "M": _fmt(M, "raw"),
        "n": _fmt(n, "raw"),
        "t": _fmt(t, "raw"),
        "error": _fmt(error, "sci"),
        "order": _fmt(order, "fix"),
        "iar": _fmt(iar_val, "sci"),
        "wall_ms": _fmt(wall_ms, "fix"),
    }


@dataclass
class ErrorReport:
    rows: list[dict]
    failures: list[str] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return buf.getvalue()

    def write(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def window_times(cd: ContourDefaults, quoted=()) -> tuple[float, ...]:
    """16 equispaced window samples plus any quoted times, deduplicated."""
    grid = np.linspace(cd.t0, cd.lambda_ratio * cd.t0, 16)
    return tuple(sorted(set(np.round(grid, 12)) | set(quoted)))


def _run_time_row(spec: ExperimentSpec, beta: float, N: int):
    bp = build_problem(spec.example_id, beta, max(spec.m_list), spec.contour)
    disc = discretize(bp.problem)
    start = time.perf_counter()
    err = error_tau(
        bp, N, window_times(spec.contour, spec.eval_times), spec.reference, spec.n_ref,
        spec.contour, disc=disc,
    )
    wall = (time.perf_counter() - start) * 1e3
    return _row(spec.example_id, beta, N=N, M=None if bp.problem.scalar else max(spec.m_list),
                t=max(spec.eval_times), error=err, wall_ms=wall)


def run(spec: ExperimentSpec) -> ErrorReport:
    """Execute one sweep; per-row failures are recorded, not raised."""
    report = ErrorReport(rows=[])
    jobs: list[Callable[[], list[dict]]] = []

    if spec.mode == "sweep-time":
        for beta in spec.betas:
            for N in spec.n_list:
                jobs.append(lambda beta=beta, N=N: [_run_time_row(spec, beta, N)])
    elif spec.mode == "sweep-space":
        t = max(spec.eval_times)
        N = max(spec.n_list)

        def space_job(beta):
            rows = []
            start = time.perf_counter()
            for m, err, order in spatial_sweep(
                spec.example_id, beta, N, spec.m_list, t, spec.reference, spec.contour
            ):
                wall = (time.perf_counter() - start) * 1e3
                rows.append(_row(spec.example_id, beta, N=N, M=m, t=t, error=err, order=order, wall_ms=wall))
                start = time.perf_counter()
            return rows

        for beta in spec.betas:
            jobs.append(lambda beta=beta: space_job(beta))
    elif spec.mode == "accel-compare":
        t = max(spec.eval_times)
        N = max(spec.n_list)

        def accel_job(beta, M):
            bp = build_problem(spec.example_id, beta, M, spec.contour)
            dev = accel_deviation(bp, N, spec.n_interp, t, spec.contour)
            iar_val = iar(bp, N, spec.n_interp, t, spec.contour)
            t_plain, t_accel, _ = timing_compare(spec.example_id, beta, N, M, spec.n_interp, t, spec.contour)
            return [
                _row(spec.example_id, beta, N=N, M=M, n=spec.n_interp, t=t,
                     error=dev, iar_val=iar_val, wall_ms=t_accel * 1e3),
                _row(spec.example_id, beta, N=N, M=M, n=None, t=t, wall_ms=t_plain * 1e3),
            ]

        for beta in spec.betas:
            for M in spec.m_list:
                jobs.append(lambda beta=beta, M=M: accel_job(beta, M))
    elif spec.mode == "solve":
        t_list = spec.eval_times

        def solve_job(beta, N, M):
            bp = build_problem(spec.example_id, beta, M, spec.contour)
            disc = discretize(bp.problem)
            start = time.perf_counter()
            sols = _solve_at(bp.problem, N, t_list, disc, spec.contour)
            wall = (time.perf_counter() - start) * 1e3
            rows = []
            for t, s in zip(t_list, sols):
                if bp.problem.scalar:
                    val = abs(s - bp.exact(t)) if bp.exact else abs(s)
                elif bp.exact is not None:
                    val = l2_error(bp.problem.domain, s, lambda x, t=t: bp.exact(x, t))
                else:
                    val = mass_norm(disc.ops, np.asarray(s))
                rows.append(_row(spec.example_id, beta, N=N, M=None if bp.problem.scalar else M,
                                 t=t, error=val, wall_ms=wall))
                wall = None
            return rows

        for beta in spec.betas:
            for N in spec.n_list:
                for M in spec.m_list:
                    jobs.append(lambda beta=beta, N=N, M=M: solve_job(beta, N, M))
    else:
        raise BenchError(f"unknown mode {spec.mode!r}")

    def safe(job):
        try:
            return job(), None
        except Exception as exc:  # per-row failure: record and continue
            return [], f"{type(exc).__name__}: {exc}"

    if spec.threads > 1:
        with ThreadPoolExecutor(max_workers=spec.threads) as pool:
            results = list(pool.map(safe, jobs))
    else:
        results = [safe(j) for j in jobs]
    for rows, failure in results:
        report.rows.extend(rows)
        if failure:
            report.failures.append(failure)
    if spec.output_path:
        report.write(spec.output_path)
    return report
