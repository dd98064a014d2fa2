"""Command-line front end.

Subcommands: solve, sweep, spectrum, fss, oracle-check.  Exit codes: 0 ok,
1 invalid input, 2 compute failure, 3 oracle mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import criticality as crit
from .cache import GroundStateCache, fmt
from .measures import BlockEntropies, gmc_spectrum
from .symmetric import ModelParams, SolverError, ground_state

log = logging.getLogger("lmg_gmc")

EXIT_OK, EXIT_INVALID, EXIT_COMPUTE, EXIT_ORACLE = 0, 1, 2, 3


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------- parsing helpers

def parse_range(text: str) -> np.ndarray:
    """``start:stop:step`` (inclusive stop) or a single value."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) != 3:
            raise ValueError
        start, stop, step = map(float, parts)
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected start:stop:step") from None
    return crit.uniform_grid(start, stop, step)


def parse_k_list(text: str) -> list:
    items = [t for t in (text or "").split(",") if t.strip()]
    if not items:
        raise UsageError("empty k list")
    return [crit.parse_k_spec(t) for t in items]


def read_config(path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _solver(args):
    cache = GroundStateCache.from_env(getattr(args, "cache_dir", None))
    return cache if cache is not None else ground_state


def _workers(args):
    return args.workers if args.workers else (os.cpu_count() or 1)


def _open_out(path):
    if path in (None, "-"):
        return _StdoutBox()
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", newline="")


class _StdoutBox(io.StringIO):
    def close(self):
        sys.stdout.write(self.getvalue())
        super().close()


def _params(args, field=0.0):
    return ModelParams(args.n, args.gamma, field, args.coupling)


def _write_csv(path, header, rows):
    fh = _open_out(path)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x
                             for x in row])
    finally:
        fh.close()


# ---------------------------------------------------------------- commands

def cmd_solve(args) -> int:
    params = _params(args, args.h)
    gs = _solver(args)(params)
    record = {
        "params": {"n_spins": params.n_spins, "gamma": params.gamma,
                   "field": params.field, "coupling": params.coupling},
        "energy": gs.energy,
        "parity": gs.parity,
        "residual": gs.eigensolve_residual,
        "amplitudes": gs.vector.amplitudes.tolist(),
    }
    fh = _open_out(args.out)
    try:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")
    finally:
        fh.close()
    return EXIT_OK


def cmd_sweep(args) -> int:
    k_list = parse_k_list(args.k)
    h_grid = parse_range(args.h)
    if h_grid.size < 3 and args.derivative:
        raise UsageError("derivative columns need at least 3 field points")
    solver = _solver(args)
    evaluator = lambda p, orders: crit.evaluate_orders(p, orders, solver=solver)  # noqa: E731
    curves = crit.sweep(_params(args), k_list, h_grid, workers=_workers(args),
                        evaluator=evaluator)
    if args.derivative:
        curves = [crit.differentiate(c) for c in curves]
    header = ["h"] + [c.label for c in curves]
    columns = [h_grid] + [c.values for c in curves]
    if args.derivative:
        header += [f"d{c.label}_dh" for c in curves]
        columns += [c.derivative for c in curves]
    _write_csv(args.out, header, zip(*columns))
    if args.plot:
        from .plotting import plot_sweep
        plot_sweep(curves, args.plot, title=f"N = {args.n}, gamma = {args.gamma}")
        if args.derivative:
            p = Path(args.plot)
            plot_sweep(curves, p.with_name(p.stem + "_derivative" + p.suffix), derivative=True)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    gs = _solver(args)(_params(args, args.h))
    spec = gmc_spectrum(gs.vector)
    n = args.n
    ks = [k for k in range(1, n + 1) if not args.divisors_only or n % k == 0]
    shown = spec.genuine_display()
    rows = []
    for k in ks:
        genuine = "" if k == 1 else float(spec.genuine[k - 2] if args.raw else shown[k - 2])
        rows.append([k, spec.above(k), genuine])
    _write_csv(args.out, ["k", "S_above_k", "S_genuine"], rows)
    if args.plot:
        from .plotting import plot_spectrum
        plot_spectrum(ks, [spec.above(k) for k in ks], args.plot,
                      title=f"N = {n}, h = {args.h}")
    return EXIT_OK


def fss_report(result: crit.FssResult) -> dict:
    fit = result.fit
    return {
        "k_spec": fit.k_spec,
        "sizes": [int(n) for n in fit.sizes],
        "orders": [p.order for p in result.points],
        "h_min": [float(h) for h in fit.h_min_values],
        "s_at_min": [float(s) for s in fit.correlation_at_min],
        "alpha": fit.alpha,
        "prefactor": fit.prefactor_A,
        "alpha_stderr": fit.alpha_stderr,
        "excluded_sizes": fit.excluded,
        "hmin_fit_powerlaw": result.trend["powerlaw"],
        "hmin_fit_inverselog": result.trend["inverselog"],
    }


def cmd_fss(args) -> int:
    spec = crit.parse_k_spec(args.k)
    solver = _solver(args)
    evaluator = lambda p, orders: crit.evaluate_orders(p, orders, solver=solver)  # noqa: E731
    h_grid = parse_range(args.h)
    result = crit.run_fss(spec, args.max_n, gamma=args.gamma, coupling=args.coupling,
                          drop_below=args.drop_below, h_grid=h_grid,
                          workers=_workers(args), refine_levels=args.refine_levels,
                          evaluator=evaluator)
    report = fss_report(result)
    fh = _open_out(args.out)
    try:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    finally:
        fh.close()
    if args.plot:
        from .plotting import plot_fss
        plot_fss(result.fit, args.plot, h_min=result.fit.h_min_values)
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    from .oracle import equivalence_suite

    cases = equivalence_suite(range(2, args.n_max + 1), gmc=not args.no_gmc,
                              perturb=args.perturb)
    failures = 0
    for c in cases:
        status = "PASS" if c.passed else "FAIL"
        failures += not c.passed
        gmc = "" if c.gmc_error is None else f" gmc_err={c.gmc_error:.2e} (k={c.worst_k})"
        print(f"{status} N={c.n_spins} gamma={c.gamma} h={c.field} "
              f"energy_err={c.energy_error:.2e}{gmc}")
    print(f"{len(cases) - failures}/{len(cases)} cases passed")
    return EXIT_ORACLE if failures else EXIT_OK


# ---------------------------------------------------------------- parser

def _add_model_args(p, field=True):
    p.add_argument("--n", type=int, required=True, help="number of spins N")
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--coupling", "--lambda", dest="coupling", type=float, default=1.0)
    if field:
        p.add_argument("--h", type=float, default=0.0, help="transverse field")


def _add_common(p):
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--cache-dir", default=None,
                   help="ground-state cache directory (env LMG_GMC_CACHE_DIR)")
    p.add_argument("--workers", type=int, default=None,
                   help="concurrent solves (default: all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lmg-gmc",
        description="Genuine multipartite correlations in the LMG ground state.")
    parser.add_argument("--config", default=None, help="key = value defaults file")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="ground state in the Dicke basis")
    _add_model_args(p)
    _add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="S^k(h) curves over a field grid")
    _add_model_args(p, field=False)
    p.add_argument("--k", required=True, help="comma list of orders: 1, 2, ..., N, N/2, N/4")
    p.add_argument("--h", default="0:2:0.01", help="field range start:stop:step")
    p.add_argument("--derivative", action="store_true", help="add dS/dh columns")
    p.add_argument("--plot", default=None, help="figure path (.svg, .png, .pdf)")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("spectrum", help="S^{k->N} and S^k for every k at one field")
    _add_model_args(p)
    p.add_argument("--divisors-only", action="store_true", help="keep only k dividing N")
    p.add_argument("--raw", action="store_true", help="keep roundoff negatives as computed")
    p.add_argument("--plot", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("fss", help="finite-size scaling exponent of S^k(h_min)")
    p.add_argument("--k", required=True, help="order: integer, N, N/2 or N/4")
    p.add_argument("--max-n", type=int, default=498)
    p.add_argument("--drop-below", type=int, default=crit.DEFAULT_DROP_BELOW)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--coupling", "--lambda", dest="coupling", type=float, default=1.0)
    p.add_argument("--h", default=f"{crit.DEFAULT_H_START}:{crit.DEFAULT_H_STOP}:"
                                  f"{crit.DEFAULT_H_STEP}",
                   help="coarse field grid start:stop:step")
    p.add_argument("--refine-levels", type=int, default=crit.DEFAULT_REFINE_LEVELS)
    p.add_argument("--plot", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_fss)

    p = sub.add_parser("oracle-check", help="compare against the full 2^N solution")
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--no-gmc", action="store_true", help="energies only (allows N <= 12)")
    p.add_argument("--perturb", type=float, default=0.0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    values = read_config(known.config)
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            dests = {a.dest: a for a in sp._actions}
            defaults = {}
            for key, raw in values.items():
                if key in dests:
                    a = dests[key]
                    if a.const is True:
                        defaults[key] = raw.lower() in ("1", "true", "yes", "on")
                    else:
                        defaults[key] = a.type(raw) if a.type else raw
                        a.required = False
            sp.set_defaults(**defaults)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except crit.InsufficientSizesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SolverError, ArithmeticError, crit.GridRangeError) as exc:
        print(f"compute failure: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
