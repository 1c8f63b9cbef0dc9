"""Command-line front end.

Exit codes: 0 success, 1 failed validation, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys

import numpy as np

from . import mc, validate
from .kernels import KernelSet
from .pricing import convexity, hw_kernels, hw_reference, price_hw
from .termstructure import ConfigError, ContractKind, ContractSpec, load_config

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

PRICE_COLUMNS = ["kind", "T1", "T2", "v0", "v1", "total", "reference", "convexity", "epsilon"]


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return "%.17g" % x


def _write_csv(rows, header, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])


def _emit(rows, header, path=None, stdout=None) -> None:
    stdout = stdout or sys.stdout
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            _write_csv(rows, header, fh)
    else:
        _write_csv(rows, header, stdout)


# -- commands --------------------------------------------------------------------------


def price_rows(params, contracts) -> list[list]:
    k = KernelSet(params)
    rows = []
    for spec in contracts:
        b = convexity(k, spec)
        eps = k.epsilon_report(spec.T2).epsilon
        rows.append([spec.kind.value, spec.T1, spec.T2, b.v0, b.v1, b.total, b.reference, b.convexity, eps])
    return rows


def cmd_price(args) -> int:
    params, contracts = load_config(args.config)
    if args.contract is not None:
        if not 0 <= args.contract < len(contracts):
            raise ConfigError("contract", f"index {args.contract} out of range ({len(contracts)} contracts)")
        contracts = [contracts[args.contract]]
    if not contracts:
        raise ConfigError("contracts", "config lists no contracts")
    _emit(price_rows(params, contracts), PRICE_COLUMNS, args.out)
    return EXIT_OK


def sweep_grid(start: float, end: float, step: float) -> np.ndarray:
    n = int(math.floor((end - start) / step + 1e-9))
    return start + step * np.arange(n + 1)


def sweep_rows(params, kind, t1_values, tenor, hw_exact=False) -> tuple[list[str], list[list]]:
    kind = ContractKind(kind)
    if kind is ContractKind.FORWARD:
        raise ConfigError("kind", "sweep needs a futures kind")
    k = KernelSet(params)
    khw = hw_kernels(k)
    with_ed = kind in (ContractKind.SOFR_3M, ContractKind.EURODOLLAR)
    header = ["T1", "convexity_full", "convexity_hw", "difference", "ratio"]
    if with_ed:
        header.append("eurodollar_minus_sofr")
    rows = []
    for T1 in t1_values:
        T1 = float(T1)
        T2 = T1 + tenor
        spec = ContractSpec(kind, T1, T2, tenor)
        full = convexity(k, spec).convexity
        hw = price_hw(khw, 0.0, 0.0, T1, T2, kind, exact=hw_exact) - hw_reference(khw, kind, T1, T2)
        diff = hw - full
        ratio = diff / full if full != 0 else float("nan")
        row = [T1, full, hw, diff, ratio]
        if with_ed:
            ed = convexity(k, ContractSpec(ContractKind.EURODOLLAR, T1, T2, tenor)).convexity
            sofr = convexity(k, ContractSpec(ContractKind.SOFR_3M, T1, T2, tenor)).convexity
            row.append(ed - sofr)
        rows.append(row)
    return header, rows


def cmd_sweep(args) -> int:
    params, _ = load_config(args.config)
    if not args.t1_step > 0:
        raise ConfigError("t1-step", "must be positive")
    if args.t1_end < args.t1_start or args.t1_start < 0:
        raise ConfigError("t1-end", "need 0 <= t1-start <= t1-end")
    if not args.tenor > 0:
        raise ConfigError("tenor", "must be positive")
    grid = sweep_grid(args.t1_start, args.t1_end, args.t1_step)
    if grid[-1] + args.tenor > params.horizon + 1e-12:
        raise ConfigError("t1-end", f"T1 + tenor = {grid[-1] + args.tenor:g} exceeds horizon {params.horizon:g}")
    header, rows = sweep_rows(params, args.kind, grid, args.tenor, args.hw_exact)
    _emit(rows, header, args.out)
    return EXIT_OK


def _report(checks) -> int:
    for c in checks:
        print(c.line())
    ok = validate.all_passed(checks)
    print("ALL PASS" if ok else f"{sum(not c.passed for c in checks)} FAILED")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_mc_validate(args) -> int:
    params, contracts = load_config(args.config)
    try:
        cfg = mc.SimConfig(args.paths, step=args.step, seed=args.seed)
    except ValueError as exc:
        raise ConfigError("mc", str(exc)) from None
    return _report(validate.mc_suite(params, contracts, cfg, args.tol_scale))


def cmd_greens_validate(args) -> int:
    params, contracts = load_config(args.config)
    return _report(validate.greens_suite(params, contracts, args.grid, args.box, args.tol_scale))


def cmd_closedform_validate(args) -> int:
    params, _ = load_config(args.config)
    try:
        checks = validate.closedform_suite(params, args.tol_scale)
    except ValueError as exc:
        raise ConfigError("curves", str(exc)) from None
    return _report(checks)


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sofr-convexity", description="SOFR and Eurodollar futures convexity")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("price", help="price the contracts of a config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--contract", type=int, default=None, help="index into the config's contracts")
    sp.add_argument("--out", default=None, help="CSV path (default: stdout)")
    sp.set_defaults(func=cmd_price)

    sp = sub.add_parser("sweep", help="convexity against settlement date")
    sp.add_argument("--config", required=True)
    sp.add_argument("--kind", required=True, choices=[k.value for k in ContractKind if k is not ContractKind.FORWARD])
    sp.add_argument("--t1-start", type=float, required=True)
    sp.add_argument("--t1-end", type=float, required=True)
    sp.add_argument("--t1-step", type=float, required=True)
    sp.add_argument("--tenor", type=float, required=True)
    sp.add_argument("--out", default=None)
    sp.add_argument("--hw-exact", action="store_true",
                    help="include the accrual-period calibration drift in the Hull-White baseline")
    sp.set_defaults(func=cmd_sweep)

    for name, func, help_ in (
        ("mc-validate", cmd_mc_validate, "Monte Carlo oracle checks"),
        ("greens-validate", cmd_greens_validate, "Green's function convolution checks"),
        ("closedform-validate", cmd_closedform_validate, "kernel closed-form checks"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=True)
        sp.add_argument("--tol-scale", type=float, default=1.0, help="multiply every tolerance")
        if name == "mc-validate":
            sp.add_argument("--paths", type=int, default=1_000_000)
            sp.add_argument("--seed", type=int, default=20240101)
            sp.add_argument("--step", type=float, default=1.0 / 365.0)
        if name == "greens-validate":
            sp.add_argument("--grid", type=int, default=200)
            sp.add_argument("--box", type=float, default=10.0)
        sp.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
