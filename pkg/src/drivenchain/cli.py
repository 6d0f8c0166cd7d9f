"""Command-line front end: solve, sweep, scaling, resonances, oracle.

All verbs write machine-readable CSV/JSON; `--plot` additionally renders
a matplotlib figure next to the data file.  Exit codes: 0 success,
1 parameter error, 2 solver failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .asymptotics import greens_covariance_approx, series_covariance
from .chain import OMEGA_C, ChainParams, resonance_frequencies
from .errors import DrivenChainError
from .exact import CovarianceMatrix, solve_dense, solve_spectral
from .export import export_heatmap, export_records
from .fits import SweepRecord, midpoint_current, scaling_study, sweep_frequency
from .observables import profiles
from .oracle import extract_harmonic, integrate_covariance
from .weak import covariance_matrix_weak


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(p, omega=True):
    p.add_argument("--n", type=int, required=True, help="chain length")
    if omega:
        p.add_argument("--omega", type=float, default=0.0, help="driving frequency")
    p.add_argument("--eps", type=float, default=0.1, help="bath coupling")
    p.add_argument("--mu0", type=float, default=1.0, help="driving amplitude")


def _add_output(p):
    p.add_argument("--out", type=Path, help="output data file")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--plot", action="store_true",
                   help="render a figure next to the data file (requires --out)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="drivenchain",
                 description="oscillating steady states of a boundary-driven chain")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("solve", parents=[], help="solve one steady state")
    _add_common(p)
    p.add_argument("--method", default="spectral",
                   choices=["dense", "spectral", "weak", "series", "greens", "ode"])
    p.add_argument("--order", type=int, default=200, help="series truncation order")
    p.add_argument("--heatmap", type=Path, help="also write |C| as a matrix file")
    _add_output(p)

    p = sub.add_parser("sweep", help="midpoint current over a frequency grid")
    _add_common(p, omega=False)
    p.add_argument("--omega-min", type=float, required=True)
    p.add_argument("--omega-max", type=float, required=True)
    p.add_argument("--omega-steps", type=int, required=True)
    p.add_argument("--no-audit", action="store_true",
                   help="skip the second-solver subsample audit")
    _add_output(p)

    p = sub.add_parser("scaling", help="midpoint-current scaling fit over n")
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--mu0", type=float, default=1.0)
    p.add_argument("--n-list", type=str, help="comma-separated chain lengths")
    p.add_argument("--n-min", type=int, help="geometric grid start")
    p.add_argument("--n-max", type=int, help="geometric grid end")
    p.add_argument("--n-points", type=int, default=12, help="geometric grid size")
    p.add_argument("--parity", choices=["even", "odd", "any"], default="any")
    p.add_argument("--method", default="auto",
                   choices=["auto", "dense", "spectral", "weak"])
    p.add_argument("--windowed", action="store_true",
                   help="average |j| over geometric windows before fitting")
    _add_output(p)

    p = sub.add_parser("resonances", help="mode-pair resonance table")
    _add_common(p, omega=False)
    p.add_argument("--omega-min", type=float, default=0.0)
    p.add_argument("--omega-max", type=float, default=OMEGA_C)
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("oracle", help="time-domain cross-check of the stationary solver")
    _add_common(p)
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--tolerance", type=float, default=1e-3,
                   help="maximum allowed relative deviation")
    return ap


def _solve_covariance(params: ChainParams, method: str, order: int) -> CovarianceMatrix:
    if method == "dense":
        return solve_dense(params)
    if method == "spectral":
        return solve_spectral(params)
    if method == "weak":
        return covariance_matrix_weak(params)
    if method == "series":
        return series_covariance(params, max_order=order).cov
    if method == "ode":
        return extract_harmonic(integrate_covariance(params))
    raise ValueError(f"no covariance-matrix path for method {method!r}")


def _record(params: ChainParams, cur: complex, method: str) -> SweepRecord:
    return SweepRecord(
        omega=params.omega, n=params.n, eps=params.eps, mu0=params.mu0, method=method,
        current_re=cur.real, current_im=cur.imag, current_abs=abs(cur),
    )


def _render_heatmap(data: np.ndarray, path: Path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    im = ax.imshow(np.abs(data), origin="lower",
                   extent=(1, data.shape[1], 1, data.shape[0]))
    ax.set_xlabel("site k")
    ax.set_ylabel("site j")
    fig.colorbar(im, ax=ax, label="|C|")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def _render_records(records: list[SweepRecord], xfield: str, path: Path, logx: bool):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xs = [getattr(r, xfield) for r in records if not r.failed]
    ys = [r.current_abs for r in records if not r.failed]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(xs, ys, ".-", ms=3, lw=0.7)
    ax.set_yscale("log")
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(xfield)
    ax.set_ylabel("|midpoint current|")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def _figure_path(out: Path) -> Path:
    return out.with_suffix(".png")


def _cmd_solve(args) -> int:
    params = ChainParams(n=args.n, eps=args.eps, mu0=args.mu0, omega=args.omega)
    if args.method == "greens":
        cur, _ = _greens_midpoint(params)
        rec = _record(params, cur, "greens")
        cov = None
    else:
        cov = _solve_covariance(params, args.method, args.order)
        rec = _record(params, profiles(cov).midpoint_current, args.method)
    print(f"n={rec.n} omega={rec.omega} eps={rec.eps} method={rec.method} "
          f"midpoint_current={rec.current_re:+.12e}{rec.current_im:+.12e}j "
          f"abs={rec.current_abs:.12e}")
    if args.out:
        export_records([rec], args.format, args.out)
    if args.heatmap:
        if cov is None:
            raise ValueError("--heatmap needs a full-matrix method (not greens)")
        export_heatmap(cov, args.format, args.heatmap)
        if args.plot:
            _render_heatmap(cov.data, _figure_path(args.heatmap))
    elif args.plot and cov is not None and args.out:
        _render_heatmap(cov.data, _figure_path(args.out))
    return 0


def _greens_midpoint(params: ChainParams) -> tuple[complex, str]:
    mid = (params.n + 1) // 2
    c = greens_covariance_approx(params, mid, mid + 1)
    return 4.0 * (-1.0) ** (mid + 1) * c, "greens"


def _cmd_sweep(args) -> int:
    if args.omega_steps < 1:
        raise ValueError("need at least one frequency step")
    params = ChainParams(n=args.n, eps=args.eps, mu0=args.mu0)
    grid = np.linspace(args.omega_min, args.omega_max, args.omega_steps)
    records = sweep_frequency(params, grid, audit=not args.no_audit)
    nfail = sum(r.failed for r in records)
    print(f"swept {len(records)} points, {nfail} failed")
    if args.out:
        export_records(records, args.format, args.out)
        if args.plot:
            _render_records(records, "omega", _figure_path(args.out), logx=False)
    return 0


def _parse_n_list(args) -> list[int]:
    if args.n_list:
        ns = [int(s) for s in args.n_list.split(",")]
    elif args.n_min and args.n_max:
        raw = np.geomspace(args.n_min, args.n_max, args.n_points)
        ns = sorted({int(round(v)) for v in raw})
    else:
        raise ValueError("scaling needs --n-list or --n-min/--n-max")
    if args.parity == "even":
        ns = [n if n % 2 == 0 else n + 1 for n in ns]
    elif args.parity == "odd":
        ns = [n if n % 2 == 1 else n + 1 for n in ns]
    return sorted(set(ns))


def _cmd_scaling(args) -> int:
    ns = _parse_n_list(args)
    fit = scaling_study(args.omega, args.eps, ns, mu0=args.mu0,
                        method=args.method, windowed=args.windowed)
    label = "alpha" if fit.kind == "power_law" else "xi"
    flag = "" if fit.acceptance_grade else " [warning: r^2 <= 0.98]"
    print(f"kind={fit.kind} {label}={fit.exponent:.6g} stderr={fit.stderr:.3g} "
          f"r_squared={fit.r_squared:.6f}{flag}")
    if args.out:
        records = []
        for n in ns:
            p = ChainParams(n=n, eps=args.eps, mu0=args.mu0, omega=args.omega)
            cur, tag = midpoint_current(p, args.method)
            records.append(_record(p, cur, tag))
        export_records(records, args.format, args.out)
        if args.plot:
            _render_records(records, "n", _figure_path(args.out), logx=True)
    return 0


def _cmd_resonances(args) -> int:
    params = ChainParams(n=args.n, eps=args.eps, mu0=args.mu0)
    table = resonance_frequencies(params, args.omega_min, args.omega_max)
    print(f"{len(table.entries)} resonances in ({args.omega_min}, {args.omega_max}]"
          f"; width scale eps/n = {table.width_scale:.3e}")
    if args.out:
        try:
            if args.format == "csv":
                lines = ["p,m,omega"]
                lines += [f"{p},{m},{w!r}" for (p, m, w) in table.entries]
                args.out.write_text("\n".join(lines) + "\n")
            else:
                import json
                args.out.write_text(json.dumps(
                    [{"p": p, "m": m, "omega": w} for (p, m, w) in table.entries],
                    indent=1) + "\n")
        except OSError as exc:
            raise DrivenChainError(f"cannot write {args.out}: {exc}") from exc
    else:
        for p, m, w in table.entries[:40]:
            print(f"  omega_{p}-{m} = {w:.9f}")
        if len(table.entries) > 40:
            print(f"  ... {len(table.entries) - 40} more (use --out)")
    return 0


def _cmd_oracle(args) -> int:
    params = ChainParams(n=args.n, eps=args.eps, mu0=args.mu0, omega=args.omega)
    traj = integrate_covariance(params, t_end=args.t_end)
    C_ode = extract_harmonic(traj)
    C_ref = solve_spectral(params)
    scale = max(np.abs(C_ref.data).max(), 1e-300)
    rel = float(np.abs(C_ode.data - C_ref.data).max() / scale)
    ok = rel <= args.tolerance
    print(f"oracle vs spectral: max relative deviation {rel:.3e} "
          f"({'OK' if ok else 'MISMATCH'}, tolerance {args.tolerance:.1e})")
    if not ok:
        raise DrivenChainError(f"oracle deviation {rel:.3e} exceeds {args.tolerance:.1e}")
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "scaling": _cmd_scaling,
    "resonances": _cmd_resonances,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.verb](args)
    except (ValueError, OSError) as exc:
        print(f"drivenchain: parameter error: {exc}", file=sys.stderr)
        return 1
    except DrivenChainError as exc:
        print(f"drivenchain: solver error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
