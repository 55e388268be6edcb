"""Command-line interface.

Every CSV written here starts with '#' comment lines recording the package
version, the subcommand, and the full parameter set (including the seed for
stochastic runs), so a result file is reproducible from its own header.
Output is UTF-8 with LF line endings; rows are emitted in deterministic
order.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import math
import sys

import numpy as np

from . import __version__
from .canonical import cut_spectrum, to_natural_form, truncate
from .core import contract_to_table, factorize_at_cut, l1_distance
from .infotheory import entropy_cost_bracket, shannon_entropy
from .models import (
    AsepParams,
    IsingParams,
    asep_candidate_representations,
    asep_mps,
    asep_representation,
    ising_entropy_cost_exact,
    ising_mps,
)
from .mcsim import (
    McConfig,
    estimate_mutual_information,
    save_run,
    simulate,
)
from .verify import run_all


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _grid(bounds) -> list:
    lo, hi, step = bounds
    if step <= 0.0:
        raise ValueError("grid step must be positive")
    vals = []
    k = 0
    while True:
        v = round(lo + k * step, 12)
        if v > hi + 1e-9:
            break
        vals.append(v)
        k += 1
    return vals


@contextlib.contextmanager
def _open_out(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _emit(fh, command: str, params: dict, columns, rows, warnings=()):
    fh.write(f"# smps {__version__}\n")
    fh.write(f"# command = {command}\n")
    for key, value in params.items():
        fh.write(f"# {key} = {value}\n")
    for w in warnings:
        fh.write(f"# warning: {w}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)


def cmd_phase_sweep(args) -> int:
    cut = args.cut if args.cut is not None else args.n // 2
    alphas = _grid(args.alpha_grid)
    betas = _grid(args.beta_grid)
    rows = []
    for a in alphas:
        for b in betas:
            params = AsepParams(a, b, args.n)
            rep = asep_representation(params)
            mps = rep.to_mps()
            cands = [(lbl, r.to_mps()) for lbl, r in asep_candidate_representations(params)]
            bracket = entropy_cost_bracket(mps, cut, cands)
            rows.append(
                (
                    _fmt(a),
                    _fmt(b),
                    args.n,
                    cut,
                    _fmt(bracket.lower_bound),
                    _fmt(bracket.upper_bound),
                    rep.regime,
                )
            )
    with _open_out(args.out) as fh:
        _emit(
            fh,
            "phase-sweep",
            {
                "alpha_grid": ":".join(map(_fmt, args.alpha_grid)),
                "beta_grid": ":".join(map(_fmt, args.beta_grid)),
                "n": args.n,
                "cut": cut,
            },
            ("alpha", "beta", "n", "cut", "mi_bits", "entropy_cost_ub_bits", "regime"),
            rows,
        )
    return 0


def cmd_spectrum(args) -> int:
    cut = args.cut if args.cut is not None else args.n // 2
    params = AsepParams(args.alpha, args.beta, args.n)
    spectrum = cut_spectrum(asep_mps(params), cut)
    rows = [(rank + 1, _fmt(p)) for rank, p in enumerate(spectrum.probabilities)]
    with _open_out(args.out) as fh:
        _emit(
            fh,
            "spectrum",
            {
                "alpha": _fmt(args.alpha),
                "beta": _fmt(args.beta),
                "n": args.n,
                "cut": cut,
                "bond_dim": spectrum.bond_dim,
            },
            ("rank", "probability"),
            rows,
        )
    return 0


def cmd_ising(args) -> int:
    n = args.n
    cut = n // 2
    rows = []
    for beta in _grid(args.beta_grid):
        nf = to_natural_form(ising_mps(IsingParams(beta, n)))
        from_stack = shannon_entropy(nf.spectrum(cut).probabilities, check=False)
        rows.append((_fmt(beta), _fmt(ising_entropy_cost_exact(beta)), _fmt(from_stack)))
    with _open_out(args.out) as fh:
        _emit(
            fh,
            "ising",
            {"beta_grid": ":".join(map(_fmt, args.beta_grid)), "n": n, "cut": cut},
            ("beta", "entropy_cost_exact_bits", "entropy_cost_stack_bits"),
            rows,
        )
    return 0


def cmd_mc(args) -> int:
    rows = []
    warnings = []
    for n in args.n:
        params = AsepParams(args.alpha, args.beta, n)
        config = McConfig(
            params,
            sample_count=args.samples,
            burn_in_time=args.burn_in,
            sample_interval=args.interval,
            seed=args.seed,
        )
        run = simulate(config, backend=args.backend)
        cut = args.cut if args.cut is not None else n // 2
        est = estimate_mutual_information(run, cut)
        if est.insufficient_samples:
            warnings.append(
                f"n={n}: {est.sample_count} samples is under 100x the observed "
                f"joint support ({est.joint_support}); plug-in bias may dominate"
            )
        if args.save_run:
            path = args.save_run if len(args.n) == 1 else f"{args.save_run}.n{n}"
            save_run(path, run)
        rows.append(
            (
                n,
                _fmt(args.alpha),
                _fmt(args.beta),
                _fmt(est.estimate),
                _fmt(est.std_error),
                _fmt(math.exp(est.estimate * math.log(2.0))),
            )
        )
    with _open_out(args.out) as fh:
        _emit(
            fh,
            "mc",
            {
                "alpha": _fmt(args.alpha),
                "beta": _fmt(args.beta),
                "n_values": ",".join(str(n) for n in args.n),
                "samples": args.samples,
                "burn_in": "auto" if args.burn_in is None else _fmt(args.burn_in),
                "interval": "auto" if args.interval is None else _fmt(args.interval),
                "seed": args.seed,
                "exp_mi": "exp of the estimate converted to nats",
            },
            ("n", "alpha", "beta", "mi_estimate_bits", "stderr_bits", "exp_mi"),
            rows,
            warnings=warnings,
        )
    return 0


def cmd_truncate(args) -> int:
    params = AsepParams(args.alpha, args.beta, args.n)
    mps = asep_mps(params)
    nf = to_natural_form(mps)
    truncated, bound, tails = truncate(nf, args.bond_cap)
    extras = {}
    if 2**args.n <= 2**12:
        extras["measured_l1"] = _fmt(
            l1_distance(contract_to_table(mps), contract_to_table(truncated))
        )
    rows = [(k + 1, _fmt(tail)) for k, tail in enumerate(tails)]
    with _open_out(args.out) as fh:
        _emit(
            fh,
            "truncate",
            {
                "alpha": _fmt(args.alpha),
                "beta": _fmt(args.beta),
                "n": args.n,
                "bond_cap": args.bond_cap,
                "error_bound": _fmt(bound),
                "max_bond_dim": max(truncated.bond_dims),
                **extras,
            },
            ("bond", "discarded_mass"),
            rows,
        )
    return 0


def cmd_verify(args) -> int:
    results = run_all(seed=args.seed, fast=args.fast)
    for res in results:
        print(res.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smps",
        description="Stochastic matrix product state toolkit for driven lattice gases",
    )
    parser.add_argument("--version", action="version", version=f"smps {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phase-sweep", help="correlation measures over a rate grid")
    p.add_argument("--alpha-grid", nargs=3, type=float, default=[0.05, 0.95, 0.05],
                   metavar=("MIN", "MAX", "STEP"))
    p.add_argument("--beta-grid", nargs=3, type=float, default=[0.05, 0.95, 0.05],
                   metavar=("MIN", "MAX", "STEP"))
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--cut", type=int, default=None, help="default: n//2")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_phase_sweep)

    p = sub.add_parser("spectrum", help="cut spectrum at one rate point")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--cut", type=int, default=None, help="default: n//2")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("ising", help="spin-chain correlation cost vs coupling")
    p.add_argument("--beta-grid", nargs=3, type=float, default=[0.0, 5.0, 0.25],
                   metavar=("MIN", "MAX", "STEP"))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_ising)

    p = sub.add_parser("mc", help="kinetic Monte Carlo mutual-information estimates")
    p.add_argument("--n", nargs="+", type=int, default=[8])
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--burn-in", type=float, default=None, help="default: 20n")
    p.add_argument("--interval", type=float, default=None, help="default: n")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cut", type=int, default=None, help="default: n//2")
    p.add_argument("--backend", choices=("cython", "python"), default=None)
    p.add_argument("--save-run", default=None, help="write raw samples to this path")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("truncate", help="certified bond truncation of a steady state")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--bond-cap", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_truncate)

    p = sub.add_parser("verify", help="run the built-in identity and bound checks")
    p.add_argument("--seed", type=int, default=20260814)
    p.add_argument("--fast", action="store_true", help="smaller corpora")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
