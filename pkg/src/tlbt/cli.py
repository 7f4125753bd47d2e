"""Command-line front end.

    tlbt <command> [--system FILE | --heat-rod N | --random N,M,P] [--horizon T]
                   [--orders r1,r2,...] [--input u1|u2|FILE] [--grid N]
                   [--out DIR] [--seed S] [--json]

Exit status: 0 success, 1 a bound violation was found, 2 usage or data error.
"""
import argparse
import json
import math
import sys
import warnings
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__, _backend
from . import io as tio
from .balancing import balance, tl_singular_values, truncate
from .bounds import (
    GROUP_TOL,
    balanced_constant,
    corollary_bound,
    global_constant,
    hinf_limit_bound,
    theorem_bound,
)
from .exceptions import DimensionError, SingularMatrixError, TLBTError
from .gramians import gramians_lyapunov, gramians_quadrature
from .simulation import (
    Signal,
    builtin_inputs,
    default_grid,
    l2_norm,
    normalize_input,
    sampled_signal,
    simulate,
    verify_bound,
)
from .system import heat_rod, random_stable

DEFAULT_ORDERS = (2, 4, 6, 8)
DEFAULT_RANK_TOL = 1e-9


class CLIError(Exception):
    pass


@contextmanager
def stage(name):
    try:
        yield
    except CLIError:
        raise
    except (TLBTError, ValueError, OSError, np.linalg.LinAlgError) as exc:
        raise CLIError(f"{name}: {exc}") from exc


def _orders(text):
    try:
        orders = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid order list {text!r}") from None
    if not orders or min(orders) < 1:
        raise argparse.ArgumentTypeError("orders must be positive integers")
    return orders


def _dims(text):
    try:
        dims = [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid dimensions {text!r}") from None
    if len(dims) == 1:
        dims += [1, 1]
    if len(dims) != 3 or min(dims) < 1:
        raise argparse.ArgumentTypeError("expected N or N,M,P with positive entries")
    return dims


def _rank_tol(text):
    if text.lower() in ("none", "strict"):
        return None
    return float(text)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--system", metavar="FILE", help="system JSON file or MatrixMarket directory")
    src.add_argument("--heat-rod", metavar="N", type=int, help="built-in heat rod with N nodes (default 200)")
    src.add_argument("--random", metavar="N[,M,P]", type=_dims, help="random stable system (uses --seed)")
    common.add_argument("--horizon", "-T", type=float, default=12.0, help="final time T (default 12)")
    common.add_argument("--orders", type=_orders, help="reduced orders, e.g. 2,4,6,8")
    common.add_argument("--input", dest="input", help="u1, u2 or a CSV file t,u1..um")
    common.add_argument("--grid", type=int, help="number of time steps (even)")
    common.add_argument("--out", metavar="DIR", help="directory for output files")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true", help="print the JSON summary")
    common.add_argument("--rank-tol", type=_rank_tol, default=DEFAULT_RANK_TOL,
                        help="relative singular value cut-off for balancing, or 'none' (default 1e-9)")
    common.add_argument("--group-tol", type=float, default=GROUP_TOL)
    common.add_argument("--hold", choices=("cubic", "midpoint"), default="cubic")
    common.add_argument("--rom", metavar="FILE", help="reduced model JSON (simulate/verify)")
    common.add_argument("--quadrature", action="store_true", help="gramians: also run the quadrature route")

    parser = argparse.ArgumentParser(prog="tlbt", description="Time-limited balanced truncation toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("table", "errors and bounds for several orders and both test inputs"),
        ("gramians", "time-limited Gramians and singular values"),
        ("reduce", "write reduced models"),
        ("bound", "error bound reports"),
        ("simulate", "simulate the system (or a ROM) and write the trajectory"),
        ("verify", "check measured errors against the bound"),
    ):
        sub.add_parser(name, parents=[common], help=help_)
    return parser


def _config(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("json",)}
    if args.system is None and args.random is None and args.heat_rod is None:
        cfg["heat_rod"] = 200
    return cfg


def _load_system(args):
    with stage("lti-system"):
        if args.system is not None:
            return tio.read_system(args.system), f"file:{args.system}"
        if args.random is not None:
            n, m, p = args.random
            return random_stable(n, m, p, args.seed), f"random:{n},{m},{p}:seed={args.seed}"
        n = 200 if args.heat_rod is None else args.heat_rod
        return heat_rod(n), f"heat_rod:{n}"


def _grid(args):
    N = default_grid(args.horizon) if args.grid is None else args.grid
    if N < 2 or N % 2:
        raise CLIError(f"simulation: grid must be an even number >= 2, got {N}")
    return N


def _broadcast(u, m, T, N):
    # built-in signals are scalar; drive every channel with the same waveform
    if m == 1:
        return u
    sig = Signal(lambda t: np.repeat(u(t), m, axis=1), u.description)
    return normalize_input(sig, T, N)


def _inputs(args, sys, which_default=("u1", "u2")):
    T = args.horizon
    N = _grid(args)
    with stage("simulation"):
        u1, u2 = builtin_inputs(T, N)
        names = which_default if args.input is None else (args.input,)
        out = []
        for name in names:
            if name == "u1":
                out.append(_broadcast(u1, sys.m, T, N))
            elif name == "u2":
                out.append(_broadcast(u2, sys.m, T, N))
            else:
                t, v = tio.read_samples(name)
                if v.shape[1] != sys.m:
                    raise DimensionError(f"{name}: {v.shape[1]} input channels, system has m={sys.m}")
                out.append(normalize_input(sampled_signal(t, v, Path(name).name), T, N))
        return out


def _tolerances(args):
    return {
        "rank_tol": args.rank_tol,
        "group_tol": args.group_tol,
        "bound_rtol": 1e-9,
        "zero_bound_floor": 1e-8,
        "psd_tol": 1e-12,
    }


def _pipeline(args, sys):
    if not (args.horizon > 0 and math.isfinite(args.horizon)):
        raise CLIError(f"config: horizon must be positive and finite, got {args.horizon}")
    with stage("gramian"):
        gram = gramians_lyapunov(sys, args.horizon)
    with stage("balancing"), warnings.catch_warnings():
        warnings.simplefilter("ignore")
        bal = balance(sys, gram, rank_tol=args.rank_tol)
    return gram, bal


def _check_orders(orders, sys):
    bad = [r for r in orders if not 1 <= r <= sys.n]
    if bad:
        raise CLIError(f"config: orders {bad} outside 1..{sys.n}")


def _rom(bal, r):
    # orders above the numerical order keep every significant state
    return truncate(bal, min(r, bal.order))


def _corollary(sys, gram, bal, sigma_truncated, group_tol):
    with stage("bounds"):
        try:
            c = global_constant(sys, gram)
            source = "original"
        except SingularMatrixError:
            c = balanced_constant(bal)
            source = "balanced"
        return corollary_bound(sys, gram, sigma_truncated, group_tol, constant=c), c, source


def _bound_report(sys, gram, bal, r, group_tol):
    rom = _rom(bal, r)
    with stage("bounds"):
        br = theorem_bound(bal, rom.r, group_tol)
    # states dropped by a rank-truncated balancing are truncated too
    tail = np.concatenate([rom.sigma_truncated, bal.sigma_discarded])
    cor, c, source = _corollary(sys, gram, bal, tail, group_tol)
    return rom, br, {
        "r": r,
        "r_effective": rom.r,
        "T": gram.horizon,
        "groups": [
            {"value": g.value, "multiplicity": g.multiplicity, "boundary": g.boundary, "c": g.constant}
            for g in br.groups
        ],
        "theorem_total": br.total,
        "theorem_certified": br.certified,
        "corollary_total": cor,
        "c_T": c.c_T,
        "c_T_source": source,
        "hinf_limit": hinf_limit_bound([g.value for g in br.groups]),
        "discarded_tail": br.discarded_tail,
    }


def _finite(obj):
    # strict JSON has no inf/nan
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _dumps(doc):
    return json.dumps(_finite(doc), indent=2, sort_keys=True)


def _write_json(path, doc):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(_dumps(doc) + "\n")


def cmd_gramians(args, sys, summary):
    with stage("gramian"):
        gram = gramians_lyapunov(sys, args.horizon)
        sigma = tl_singular_values(gram)
    summary.update(
        horizon=args.horizon,
        sigma=sigma.tolist(),
        P_norm=float(np.linalg.norm(gram.P, 2)),
        Q_norm=float(np.linalg.norm(gram.Q, 2)),
    )
    if sys.n <= 20:
        summary["P"] = gram.P.tolist()
        summary["Q"] = gram.Q.tolist()
    if args.quadrature:
        with stage("gramian"):
            gq = gramians_quadrature(sys, args.horizon)
        summary["quadrature_rel_diff"] = {
            "P": float(np.linalg.norm(gram.P - gq.P) / np.linalg.norm(gram.P)),
            "Q": float(np.linalg.norm(gram.Q - gq.Q) / np.linalg.norm(gram.Q)),
        }
    if args.out:
        with stage("io"):
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            tio.write_matrix(gram.P, out / "P.mtx")
            tio.write_matrix(gram.Q, out / "Q.mtx")
        summary["files"] = ["P.mtx", "Q.mtx"]
    lines = [f"n = {sys.n}, T = {args.horizon:g}", "time-limited singular values:"]
    lines += [f"  {i + 1:3d}  {s:.6e}" for i, s in enumerate(sigma[: min(sigma.size, 20)])]
    return 0, lines


def cmd_reduce(args, sys, summary):
    orders = args.orders or list(DEFAULT_ORDERS)
    _check_orders(orders, sys)
    gram, bal = _pipeline(args, sys)
    roms = []
    lines = [f"balanced order {bal.order} of n = {sys.n}"]
    for r in orders:
        rom = _rom(bal, r)
        entry = {
            "r": r,
            "r_effective": rom.r,
            "stable": bool(rom.sys_r.is_stable()),
            "sigma_truncated_sum": float(np.sum(rom.sigma_truncated)),
        }
        if args.out:
            with stage("io"):
                name = f"rom_r{r}.json"
                tio.write_rom(rom, Path(args.out) / name)
            entry["file"] = name
        roms.append(entry)
        lines.append(f"r = {r:3d}  stable = {entry['stable']}  sum(truncated sigma) = {entry['sigma_truncated_sum']:.3e}")
    summary.update(horizon=args.horizon, order=bal.order, sigma=bal.sigma.tolist(), roms=roms)
    return 0, lines


def cmd_bound(args, sys, summary):
    orders = args.orders or list(DEFAULT_ORDERS)
    _check_orders(orders, sys)
    gram, bal = _pipeline(args, sys)
    reports = []
    lines = [f"{'r':>4}  {'theorem':>11}  {'corollary':>11}  {'H-inf limit':>11}  {'c_T':>10}"]
    for r in orders:
        _, _, rep = _bound_report(sys, gram, bal, r, args.group_tol)
        reports.append(rep)
        if args.out:
            with stage("io"):
                _write_json(Path(args.out) / f"bound_r{r}.json", rep)
        lines.append(
            f"{r:>4}  {rep['theorem_certified']:11.3e}  {rep['corollary_total']:11.3e}  "
            f"{rep['hinf_limit']:11.3e}  {rep['c_T']:10.6g}"
        )
    summary.update(bounds=reports)
    return 0, lines


def cmd_simulate(args, sys, summary):
    N = _grid(args)
    (u,) = _inputs(args, sys, ("u1",))
    target = sys
    if args.rom:
        with stage("io"):
            target, _ = tio.read_rom(args.rom)
        if target.m != sys.m or target.p != sys.p:
            raise CLIError(f"lti-system: ROM has (m, p) = ({target.m}, {target.p}), system has ({sys.m}, {sys.p})")
    with stage("simulation"):
        traj = simulate(target, u, args.horizon, N, args.hold)
    summary.update(horizon=args.horizon, grid=N, input=u.description, output_l2=l2_norm(traj))
    if args.out:
        with stage("io"):
            Path(args.out).mkdir(parents=True, exist_ok=True)
            tio.write_trajectory(traj, Path(args.out) / "trajectory.csv")
        summary["files"] = ["trajectory.csv"]
    return 0, [f"||y||_L2 = {summary['output_l2']:.6e} on {N} steps"]


def _verify_rows(args, sys, gram, bal, orders, inputs):
    N = _grid(args)
    rows = []
    for r in orders:
        rom, br, rep = _bound_report(sys, gram, bal, r, args.group_tol)
        row = dict(rep)
        row["checks"] = {}
        for u in inputs:
            with stage("simulation"):
                chk = verify_bound(sys, rom.sys_r, u, args.horizon, N, br.certified, hold=args.hold)
            row["checks"][u.description] = {
                "error": chk.error,
                "bound": chk.bound,
                "ratio": chk.ratio,
                "holds": chk.holds,
            }
        row["holds"] = all(c["holds"] for c in row["checks"].values())
        rows.append(row)
    return rows


def cmd_table(args, sys, summary):
    orders = args.orders or list(DEFAULT_ORDERS)
    _check_orders(orders, sys)
    gram, bal = _pipeline(args, sys)
    inputs = _inputs(args, sys)
    rows = _verify_rows(args, sys, gram, bal, orders, inputs)
    names = [u.description for u in inputs]
    head = f"{'r':>4}" + "".join(f"  {'err ' + n:>12}" for n in names)
    head += f"  {'theorem':>11}  {'2c_T sum':>11}  holds"
    lines = [head]
    for row in rows:
        line = f"{row['r']:>4}" + "".join(f"  {row['checks'][n]['error']:12.3e}" for n in names)
        line += f"  {row['theorem_certified']:11.3e}  {row['corollary_total']:11.3e}  {'yes' if row['holds'] else 'NO'}"
        lines.append(line)
    summary.update(horizon=args.horizon, grid=_grid(args), order=bal.order, rows=rows)
    if args.out:
        with stage("io"):
            _write_json(Path(args.out) / "table.json", summary)
            Path(args.out, "table.txt").write_text("\n".join(lines) + "\n")
    return (0 if all(r["holds"] for r in rows) else 1), lines


def cmd_verify(args, sys, summary):
    gram, bal = _pipeline(args, sys)
    inputs = _inputs(args, sys)
    if args.rom:
        with stage("io"):
            rom_sys, meta = tio.read_rom(args.rom)
        if rom_sys.m != sys.m or rom_sys.p != sys.p or rom_sys.n > bal.order:
            raise CLIError(
                f"lti-system: ROM dimensions (n, m, p) = ({rom_sys.n}, {rom_sys.m}, {rom_sys.p}) "
                f"incompatible with system (order {bal.order}, m = {sys.m}, p = {sys.p})"
            )
        with stage("bounds"):
            br = theorem_bound(bal, rom_sys.n, args.group_tol)
        N = _grid(args)
        rows = [{"r": rom_sys.n, "theorem_total": br.total, "theorem_certified": br.certified, "checks": {}}]
        for u in inputs:
            with stage("simulation"):
                chk = verify_bound(sys, rom_sys, u, args.horizon, N, br.certified, hold=args.hold)
            rows[0]["checks"][u.description] = {
                "error": chk.error, "bound": chk.bound, "ratio": chk.ratio, "holds": chk.holds,
            }
        rows[0]["holds"] = all(c["holds"] for c in rows[0]["checks"].values())
    else:
        orders = args.orders or list(DEFAULT_ORDERS)
        _check_orders(orders, sys)
        rows = _verify_rows(args, sys, gram, bal, orders, inputs)
    summary.update(horizon=args.horizon, rows=rows)
    lines = []
    for row in rows:
        for name, c in row["checks"].items():
            lines.append(
                f"r = {row['r']:3d}  {name}: error {c['error']:.3e}  bound {c['bound']:.3e}  "
                f"{'holds' if c['holds'] else 'VIOLATED'}"
            )
    return (0 if all(r["holds"] for r in rows) else 1), lines


COMMANDS = {
    "table": cmd_table,
    "gramians": cmd_gramians,
    "reduce": cmd_reduce,
    "bound": cmd_bound,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        sys_, source = _load_system(args)
        summary = {
            "command": args.command,
            "config": _config(args),
            "system": {"source": source, "n": sys_.n, "m": sys_.m, "p": sys_.p},
            "tolerances": _tolerances(args),
            "backend": _backend.BACKEND,
        }
        code, lines = COMMANDS[args.command](args, sys_, summary)
    except CLIError as exc:
        print(f"tlbt: error: {exc}", file=sys.stderr)
        return 2
    summary["exit_code"] = code
    if args.out:
        _write_json(Path(args.out) / f"{args.command}_summary.json", summary)
    if args.json:
        print(_dumps(summary))
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
