"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 numerical or configuration failure,
3 threshold not found, 4 measure-and-prepare construction inapplicable.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from . import channels, entanglement, stochastic
from .channels import JumpOperator, LindbladGenerator
from .linalg import min_eigenvalue, partial_transpose

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_NOT_FOUND = 3
EXIT_HOLEVO = 4

CHANNELS = ("depolarizing", "dephasing", "dephasing-literal")
DEFAULT_T_MAX_TAUS = 20.0
DEFAULT_SWEEP_STEPS = 300

SWEEP_HEADER = ["t", "bloch_norm", "choi_min_eig", "pt_min_eig", "negativity", "is_eb"]
MC_HEADER = ["t", "mean_r1", "mean_r2", "mean_r3", "stderr_r1", "stderr_r2", "stderr_r3", "analytic_norm"]


class UsageError(Exception):
    pass


class GeneratorSpecError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _parse_float(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise GeneratorSpecError(lineno, f"not a number: {token!r}") from None
    if not math.isfinite(value):
        raise GeneratorSpecError(lineno, f"non-finite number: {token!r}")
    return value


def parse_generator_spec(text: str) -> LindbladGenerator:
    """Parse the line-oriented generator format.

    ``# ...`` comments and blank lines are ignored. ``H hx hy hz`` sets the
    Hamiltonian ``h . sigma / 2`` (at most once). ``J rate c0re c0im ... c3im``
    adds the jump ``c0 I + c1 s1 + c2 s2 + c3 s3`` at the given rate.
    """
    h = None
    jumps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        directive, *args = line.split()
        if directive == "H":
            if len(args) != 3:
                raise GeneratorSpecError(lineno, f"H takes 3 numbers, got {len(args)}")
            if h is not None:
                raise GeneratorSpecError(lineno, "duplicate H line")
            h = tuple(_parse_float(a, lineno) for a in args)
        elif directive == "J":
            if len(args) != 9:
                raise GeneratorSpecError(lineno, f"J takes 9 numbers, got {len(args)}")
            values = [_parse_float(a, lineno) for a in args]
            rate = values[0]
            if rate < 0:
                raise GeneratorSpecError(lineno, f"negative rate {rate}")
            coeffs = tuple(complex(values[1 + 2 * k], values[2 + 2 * k]) for k in range(4))
            jumps.append(JumpOperator(rate, coeffs))
        else:
            raise GeneratorSpecError(lineno, f"unknown directive {directive!r}")
    return LindbladGenerator(h=h or (0.0, 0.0, 0.0), jumps=tuple(jumps))


def format_generator_spec(gen: LindbladGenerator) -> str:
    lines = []
    if any(gen.h):
        lines.append("H " + " ".join(repr(x) for x in gen.h))
    for jump in gen.jumps:
        parts = [repr(jump.rate)]
        for c in jump.coeffs:
            parts += [repr(c.real), repr(c.imag)]
        lines.append("J " + " ".join(parts))
    return "\n".join(lines) + "\n"


# -- channel selection ---------------------------------------------------------


def _gamma(args) -> float:
    return args.gamma if args.gamma is not None else 1.0 / args.tau


def _load_spec(path: str) -> LindbladGenerator:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read spec file {path}: {exc}") from None
    return parse_generator_spec(text)


def bloch_generator(args) -> np.ndarray:
    if args.spec is not None:
        gen = _load_spec(args.spec)
    elif args.channel == "depolarizing":
        gen = channels.depolarizing_generator(args.tau)
    elif args.channel == "dephasing":
        gen = channels.dephasing_generator(_gamma(args))
    else:
        gen = channels.dephasing_generator(4.0 / args.tau)
    return channels.bloch_generator_from_lindblad(gen)


def channel_at(args, t: float) -> channels.QubitChannel:
    """Closed form for built-in channels, semigroup exponential for spec files."""
    if args.spec is not None:
        return channels.channel_from_generator(args.generator, t)
    if args.channel == "depolarizing":
        return channels.depolarizing_channel(t, args.tau)
    if args.channel == "dephasing":
        return channels.dephasing_channel(t, _gamma(args))
    return channels.dephasing_channel_literal(t, args.tau)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _open_output(path: str):
    if path == "-":
        return sys.stdout
    try:
        return open(path, "w", newline="", encoding="ascii")
    except OSError as exc:
        raise _NumericalFailure(f"cannot write {path}: {exc}") from None


class _NumericalFailure(Exception):
    pass


# -- commands -----------------------------------------------------------------


def cmd_disentangle(args) -> int:
    t_max = args.t_max if args.t_max is not None else DEFAULT_T_MAX_TAUS * args.tau
    t_star = entanglement.disentanglement_time(args.generator, t_max, tol=args.tol)
    if t_star is None:
        print(f"not found: map is still entangling at t_max = {_fmt(t_max)}")
        return EXIT_NOT_FOUND
    print(f"t* = {_fmt(t_star)}")
    if args.spec is None and args.channel == "depolarizing":
        ref = args.tau * math.log(3.0)
        print(f"tau ln 3 = {_fmt(ref)}")
        print(f"difference = {t_star - ref:.3e}")
    return EXIT_OK


def sweep_rows(args, t_max: float, steps: int) -> list[list[float]]:
    rows = []
    for t in np.linspace(0.0, t_max, steps):
        t = float(t)
        ch = channel_at(args, t)
        choi = entanglement.choi_of_channel(ch)
        verdict = entanglement.ppt_verdict(choi)
        bloch_norm = float(np.linalg.norm(ch.a @ np.array([1.0, 0.0, 0.0]) + ch.b))
        rows.append(
            [
                t,
                bloch_norm,
                min_eigenvalue(choi),
                verdict.min_pt_eigenvalue,
                verdict.negativity,
                int(verdict.is_entanglement_breaking),
            ]
        )
    return rows


def cmd_sweep(args) -> int:
    if args.steps < 2:
        raise UsageError("--steps must be at least 2")
    t_max = args.t_max if args.t_max is not None else DEFAULT_T_MAX_TAUS * args.tau
    rows = sweep_rows(args, t_max, args.steps)
    out = _open_output(args.out)
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        for row in rows:
            writer.writerow([_fmt(x) for x in row[:-1]] + [str(row[-1])])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _format_matrix(m: np.ndarray) -> str:
    cells = []
    for row in m:
        cells.append("[" + ", ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in row) + "]")
    return "[" + ", ".join(cells) + "]"


def cmd_holevo(args) -> int:
    try:
        form = entanglement.holevo_form_depolarizing(args.t, args.tau)
    except ValueError as exc:
        if "do not exist" in str(exc):
            print(f"inapplicable: {exc}")
            return EXIT_HOLEVO
        raise
    ch = channels.depolarizing_channel(args.t, args.tau)
    residual = entanglement.verify_holevo_form(form, ch, args.samples, seed=args.seed)
    labels = [f"{axis}{sign}" for axis in "123" for sign in "+-"]
    for label, (p, rho) in zip(labels, form.entries):
        purity = float(np.trace(rho @ rho).real)
        tag = " (pure)" if abs(purity - 1.0) <= 1e-12 else ""
        print(f"P[{label}] = {_format_matrix(p)}")
        print(f"rho[{label}] = {_format_matrix(rho)}  purity={purity:.12f}{tag}")
    print(f"residual = {residual:.3e}")
    if residual > 1e-12:
        print("residual exceeds 1e-12", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    try:
        psi0 = stochastic.state_from_bloch(args.initial)
        cfg = stochastic.SSEConfig(
            tau=args.tau,
            dt=args.dt,
            t_final=args.t_final,
            n_traj=args.n_traj,
            seed=args.seed,
            initial_state=psi0,
            n_samples=args.samples,
        )
    except ValueError as exc:
        raise _NumericalFailure(f"invalid configuration: {exc}") from None
    if cfg.n_traj < 2:
        raise _NumericalFailure("need at least two trajectories for a standard error")
    res = stochastic.run_ensemble(cfg, workers=args.workers)
    report = stochastic.compare_to_analytic(res, args.tau)
    r0 = float(np.linalg.norm(args.initial))

    out = _open_output(args.out)
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(MC_HEADER)
        for t, mean, err in zip(res.times, res.mean_bloch, res.stderr):
            analytic = math.exp(-t / args.tau) * r0
            writer.writerow([_fmt(t), *(_fmt(x) for x in mean), *(_fmt(x) for x in err), _fmt(analytic)])
    finally:
        if out is not sys.stdout:
            out.close()

    summary = sys.stderr if args.out == "-" else sys.stdout
    print(f"trajectories = {cfg.n_traj}, steps = {cfg.n_steps}, seed = {cfg.seed}", file=summary)
    print(f"max |z| = {report.max_abs_z:.4f}", file=summary)
    if report.flagged:
        print("warning: 3 <= max |z| < 4", file=summary)
    return EXIT_OK if report.passed else EXIT_NUMERICAL


def cmd_evolve(args) -> int:
    rho0 = channels.density_from_bloch(args.bloch)
    rho = channels.apply_channel(channel_at(args, args.t), rho0)
    r = channels.bloch_from_density(rho)
    print(f"rho(t) = {_format_matrix(rho)}")
    print("r(t) = " + " ".join(_fmt(x) for x in r))
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_channel_args(p: argparse.ArgumentParser) -> None:
    sel = p.add_mutually_exclusive_group()
    sel.add_argument("--channel", choices=CHANNELS, default="depolarizing")
    sel.add_argument("--spec", metavar="PATH", help="generator spec file (H/J lines)")
    p.add_argument("--tau", type=float, default=1.0, help="decoherence time (default 1)")
    p.add_argument("--gamma", type=float, help="dephasing rate (default 1/tau)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdisentangle", description="Qubit decoherence and entanglement-breaking analysis.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("disentangle", help="bisect the entanglement-breaking time")
    _add_channel_args(p)
    p.add_argument("--t-max", type=float, help="search horizon (default 20 tau)")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_disentangle, needs_generator=True)

    p = sub.add_parser("sweep", help="write a CSV time sweep of the EB diagnostics")
    _add_channel_args(p)
    p.add_argument("--t-max", type=float, help="last time point (default 20 tau)")
    p.add_argument("--steps", type=int, default=DEFAULT_SWEEP_STEPS)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.set_defaults(func=cmd_sweep, needs_generator=True)

    p = sub.add_parser("holevo", help="six-outcome measure-and-prepare form of the depolarizer")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=entanglement.DEFAULT_VERIFY_SEED)
    p.set_defaults(func=cmd_holevo, needs_generator=False)

    p = sub.add_parser("montecarlo", help="random-field trajectories vs. the depolarizer")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--dt", type=float, help="time step (default tau/1000)")
    p.add_argument("--t-final", type=float, help="final time (default 3 tau)")
    p.add_argument("--n-traj", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=stochastic.DEFAULT_SEED)
    p.add_argument("--samples", type=int, default=stochastic.DEFAULT_SAMPLES)
    p.add_argument("--initial", type=float, nargs=3, default=[0.0, 0.0, 1.0], metavar=("R1", "R2", "R3"))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.set_defaults(func=cmd_montecarlo, needs_generator=False)

    p = sub.add_parser("evolve", help="apply the channel at time t to a Bloch vector")
    _add_channel_args(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--bloch", type=float, nargs=3, default=[0.0, 0.0, 1.0], metavar=("R1", "R2", "R3"))
    p.set_defaults(func=cmd_evolve, needs_generator=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if not args.tau > 0 or not math.isfinite(args.tau):
            raise UsageError("--tau must be positive")
        if getattr(args, "gamma", None) is not None and not args.gamma > 0:
            raise UsageError("--gamma must be positive")
        if args.command == "montecarlo":
            args.dt = args.dt if args.dt is not None else args.tau / 1000.0
            args.t_final = args.t_final if args.t_final is not None else 3.0 * args.tau
        if args.needs_generator:
            args.generator = bloch_generator(args)
        return args.func(args)
    except (UsageError, GeneratorSpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (_NumericalFailure, ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
