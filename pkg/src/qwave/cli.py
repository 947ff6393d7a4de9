"""Command-line front end: solves, benchmark sweeps, bounds, profiling.

Also home of the classical reference solvers (eigendecomposition and
leapfrog) and the scaling fits used to check the gate-count growth laws.
Sweep output is CSV with one row per configuration; construction-only
sweeps never allocate statevectors.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import circuit as cir
from . import qprof
from .sparsesim import dense_matrix, repetitions
from .statevector import DEFAULT_QUBIT_CAP
from .transpiler import TimingModel, estimate_time, load_timing_model, transpile
from .wavesolver import (
    Discretisation,
    WaveProblem,
    evolution_circuit,
    hamiltonian_terms,
    laplacian,
    qubit_requirement,
    solve,
)

CSV_FLOAT = "%.17g"


# -- classical reference solvers ---------------------------------------------


def classical_reference(disc: Discretisation, t: float, u0: np.ndarray,
                        method: str = "eigen", dt: float | None = None) -> np.ndarray:
    """Interior samples of the semi-discrete wave solution at time t.

    ``eigen`` evaluates cos(t sqrt(L/dx^2)) u0 exactly through the symmetric
    eigendecomposition; ``leapfrog`` steps the second-order system explicitly
    with step dt (refused above the dx stability limit).  Both assume zero
    initial velocity.
    """
    u0 = np.asarray(u0, dtype=float)
    scaled = laplacian(disc) / disc.delta_x**2
    if method == "eigen":
        w, v = np.linalg.eigh(scaled)
        freq = np.sqrt(np.clip(w, 0.0, None))
        return v @ (np.cos(t * freq) * (v.T @ u0))
    if method == "leapfrog":
        if dt is None:
            raise ValueError("leapfrog needs a time step dt")
        if dt > disc.delta_x:
            raise ValueError(
                f"leapfrog unstable: dt={dt} exceeds the CFL limit dx={disc.delta_x}"
            )
        if t == 0.0:
            return u0.copy()
        steps = max(1, math.ceil(t / dt))
        h = t / steps
        prev = u0.copy()
        cur = u0 - 0.5 * h * h * (scaled @ u0)
        for _ in range(steps - 1):
            prev, cur = cur, 2.0 * cur - prev - h * h * (scaled @ cur)
        return cur
    raise ValueError(f"unknown classical method {method!r}")


def default_initial_condition(disc: Discretisation) -> np.ndarray:
    """Unit-norm Gaussian bump centered at x = 0.5 with width 0.1."""
    xs = np.arange(1, disc.interior_points + 1) * disc.delta_x
    u0 = np.exp(-((xs - 0.5) ** 2) / (2 * 0.1**2))
    return u0 / np.linalg.norm(u0)


# -- sweeps and fits -----------------------------------------------------------


@dataclass
class SweepRow:
    """One benchmark configuration and its construction-time costs."""

    n_d: int
    t: float
    epsilon: float
    k: int
    r: int
    qubits_core: int
    qubits_total: int
    gates_native: int
    gates_transpiled: int
    est_time_s: float
    max_error: float | None = None


def sweep_row(n_d: int, t: float, epsilon: float, k: int, bound: str,
              target: str = "solve", model: TimingModel | None = None,
              simulate: bool = False, cap: int = DEFAULT_QUBIT_CAP) -> SweepRow:
    """Build (and optionally simulate) one configuration."""
    model = model or TimingModel()
    disc = Discretisation(n_d)
    rescale = target == "solve"
    circ, plan = evolution_circuit(disc, t, epsilon, k, bound, rescale=rescale)
    core, total = qubit_requirement(disc)
    row = SweepRow(
        n_d=n_d,
        t=t,
        epsilon=epsilon,
        k=k,
        r=plan.r,
        qubits_core=core,
        qubits_total=total,
        gates_native=cir.gate_count(circ, "native"),
        gates_transpiled=cir.gate_count(circ, "transpiled"),
        est_time_s=estimate_time(transpile(circ), model),
    )
    if simulate:
        u0 = default_initial_condition(disc)
        if target == "solve":
            sol = solve(WaveProblem(disc, t, epsilon, k, u0), bound=bound, cap=cap)
            ref = classical_reference(disc, t, u0)
            row.max_error = float(np.max(np.abs(sol.u_t - ref)))
        else:
            row.max_error = _hamsim_state_error(disc, t, epsilon, k, bound, cap)
    return row


def _hamsim_state_error(disc: Discretisation, t: float, epsilon: float, k: int,
                        bound: str, cap: int) -> float:
    """Statevector error of the benchmark Hamiltonian run on a fixed input."""
    from .statevector import apply, expm_hermitian

    plus, minus, _ = hamiltonian_terms(disc)
    circ, _ = evolution_circuit(disc, t, epsilon, k, bound, rescale=False)
    if circ.arity > cap:
        raise cir.CircuitError(
            f"hamsim needs {circ.arity} qubits, beyond the cap of {cap}"
        )
    dim = plus.dimension
    exact = expm_hermitian(dense_matrix(plus) + dense_matrix(minus), t)
    amp = np.ones(dim) / math.sqrt(dim)
    state = np.zeros(1 << circ.arity, dtype=np.complex128)
    state[:dim] = amp
    out = apply(circ, state, cap=cap)
    return float(np.linalg.norm(out[:dim] - exact @ amp))


def rows_to_csv(rows: list[SweepRow]) -> str:
    """Deterministic CSV: header from the field names, 17-digit floats."""
    names = [f.name for f in fields(SweepRow)]
    lines = [",".join(names)]
    for row in rows:
        cells = []
        for name in names:
            value = getattr(row, name)
            if value is None:
                cells.append("")
            elif isinstance(value, float):
                cells.append(CSV_FLOAT % value)
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def fit_scaling(nd_values, gate_counts) -> tuple[float, float, float]:
    """Least squares for gates = c * N_d^p * log2(N_d)^2 on log data.

    Returns (c, p, rms residual of log gates).
    """
    nd = np.asarray(nd_values, dtype=float)
    g = np.asarray(gate_counts, dtype=float)
    y = np.log(g) - 2.0 * np.log(np.log2(nd))
    a = np.stack([np.ones_like(nd), np.log(nd)], axis=1)
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    residual = float(np.sqrt(np.mean((a @ coef - y) ** 2)))
    return float(np.exp(coef[0])), float(coef[1]), residual


def fit_power(x_values, y_values) -> float:
    """Exponent p of a pure power law y = c x^p via log-log least squares."""
    x = np.log(np.asarray(x_values, dtype=float))
    y = np.log(np.asarray(y_values, dtype=float))
    a = np.stack([np.ones_like(x), x], axis=1)
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    return float(coef[1])


# -- command line ---------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nd", type=int, required=True, help="grid points N_d")
    p.add_argument("--t", type=float, required=True, help="physical time")
    p.add_argument("--eps", type=float, required=True, help="target precision")
    p.add_argument("--k", type=int, default=1, help="product-formula order index")
    p.add_argument("--bound", default="minimised",
                   choices=["analytic", "minimised", "empiric"])
    p.add_argument("--cap", type=int, default=DEFAULT_QUBIT_CAP,
                   help="simulator qubit cap")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwave",
        description="Quantum wave-equation solver: circuits, verification, profiling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="build (and optionally run) the wave solver")
    _add_common(p)
    p.add_argument("--simulate", action="store_true")

    p = sub.add_parser("hamsim", help="Hamiltonian-simulation benchmark circuit")
    _add_common(p)
    p.add_argument("--simulate", action="store_true")

    p = sub.add_parser("sweep", help="construction-only parameter sweep to CSV")
    p.add_argument("--param", required=True, choices=["nd", "t", "eps"])
    p.add_argument("--values", required=True,
                   help="comma-separated values for the swept parameter")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--target", default="solve", choices=["solve", "hamsim"])
    p.add_argument("--nd", type=int, default=32)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=1e-5)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--bound", default="minimised",
                   choices=["analytic", "minimised", "empiric"])

    p = sub.add_parser("rbounds", help="repetition bounds for given parameters")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--m", type=int, required=True, help="number of terms")
    p.add_argument("--lambda", dest="lam", type=float, required=True,
                   help="max term norm")

    p = sub.add_parser("transpile", help="lower a circuit JSON to the target set")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--timing", help="timing model file for a time estimate")

    p = sub.add_parser("profile", help="qprof call-graph profile of a circuit JSON")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--timing", help="timing model file")
    p.add_argument("--dot", help="also write a pruned DOT call graph")
    p.add_argument("--threshold", type=float, default=0.10,
                   help="DOT pruning threshold as a fraction of total time")

    p = sub.add_parser("classical", help="classical reference solution")
    p.add_argument("--nd", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--method", default="eigen", choices=["eigen", "leapfrog"])
    p.add_argument("--dt", type=float, help="leapfrog step")

    return parser


def _cmd_solve_or_hamsim(args, target: str) -> int:
    disc = Discretisation(args.nd)
    row = sweep_row(args.nd, args.t, args.eps, args.k, args.bound,
                    target=target, simulate=args.simulate, cap=args.cap)
    core, total = qubit_requirement(disc)
    print(f"n_d={args.nd} t={args.t} eps={args.eps} k={args.k} bound={args.bound}")
    print(f"r={row.r} qubits_core={core} qubits_total={total}")
    print(f"gates_native={row.gates_native} gates_transpiled={row.gates_transpiled}")
    print(f"est_time_s={CSV_FLOAT % row.est_time_s}")
    if row.max_error is not None:
        print(f"max_error={CSV_FLOAT % row.max_error}")
    return 0


def _cmd_sweep(args) -> int:
    values = [v for v in args.values.split(",") if v]
    rows = []
    for raw in values:
        nd, t, eps = args.nd, args.t, args.eps
        if args.param == "nd":
            nd = int(raw)
        elif args.param == "t":
            t = float(raw)
        else:
            eps = float(raw)
        rows.append(sweep_row(nd, t, eps, args.k, args.bound, target=args.target))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(rows_to_csv(rows))
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_rbounds(args) -> int:
    analytic = repetitions("analytic", args.k, args.t, args.eps, args.m, args.lam)
    minimised = repetitions("minimised", args.k, args.t, args.eps, args.m, args.lam)
    print(f"analytic={analytic} minimised={minimised}")
    return 0


def _cmd_transpile(args) -> int:
    source = cir.load(args.infile)
    lowered = transpile(source)
    cir.save(lowered, args.outfile)
    print(f"gates_native={cir.gate_count(source)} "
          f"gates_transpiled={cir.gate_count(lowered)}")
    if args.timing:
        model = load_timing_model(args.timing)
        print(f"est_time_s={CSV_FLOAT % estimate_time(lowered, model)}")
    return 0


def _cmd_profile(args) -> int:
    source = cir.load(args.infile)
    model = load_timing_model(args.timing) if args.timing else TimingModel()
    report = qprof.profile(source, model)
    sys.stdout.write(qprof.render_gprof(report))
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(qprof.render_dot(report, threshold=args.threshold))
    return 0


def _cmd_classical(args) -> int:
    disc = Discretisation(args.nd)
    u0 = default_initial_condition(disc)
    u_t = classical_reference(disc, args.t, u0, method=args.method, dt=args.dt)
    print("x,u")
    for i, value in enumerate(u_t):
        x = (i + 1) * disc.delta_x
        print(f"{CSV_FLOAT % x},{CSV_FLOAT % value}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "solve":
            return _cmd_solve_or_hamsim(args, "solve")
        if args.command == "hamsim":
            return _cmd_solve_or_hamsim(args, "hamsim")
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "rbounds":
            return _cmd_rbounds(args)
        if args.command == "transpile":
            return _cmd_transpile(args)
        if args.command == "profile":
            return _cmd_profile(args)
        if args.command == "classical":
            return _cmd_classical(args)
    except (cir.CircuitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
