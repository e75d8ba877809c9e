"""Command-line front end: ``kuramoto-sync <command> [options]``.

Exit codes: 0 success, 1 selfcheck failure, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from ._validation import ConsistencyError, NumericalFailure
from .bifurcation import branch_diagram, count_events, events_for
from .continuum import FlipSet, build_discontinuous, discretize
from .dynamics import integrate, perturbation
from .equilibria import (
    ChiCurve,
    SignSequence,
    build_equilibrium,
    chi_derivative,
    chi_paired,
    enumerate_sequences,
    equilibria_for,
    group_identical,
)
from .io import to_csv, to_json
from .model import ModelConfig, km_jacobian, lift_state
from .stability import equilibrium_report, spectrum

EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


def parse_sigma(text: str, n: int) -> SignSequence:
    for i, ch in enumerate(text, start=1):
        if ch not in "+-−":
            raise UsageError(f"--sigma: invalid character {ch!r} at position {i} (use '+' or '-')")
    if len(text) != n - 1:
        raise UsageError(f"--sigma must have n - 1 = {n - 1} characters, got {len(text)}")
    return SignSequence.from_string(text)


def _config(args) -> ModelConfig:
    if getattr(args, "K", None) is not None:
        return ModelConfig(args.n, a=args.a, K=args.K)
    return ModelConfig.from_ratio(args.n, args.ratio, a=args.a)


def _meta(args, **extra) -> dict:
    meta = {"program": f"kuramoto-sync {__version__}", "command": args.command}
    for key in ("n", "a", "K", "ratio", "sigma", "seed"):
        val = getattr(args, key, None)
        if val is not None:
            meta[key] = val
    meta.update(extra)
    return meta


def _emit(args, header, rows, meta, json_data=None):
    if args.format == "json":
        data = json_data if json_data is not None else [dict(zip(header, r)) for r in rows]
        text = to_json(meta, data)
    else:
        text = to_csv(header, rows, meta)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------------
# commands

def cmd_equilibria(args):
    cfg = _config(args)
    seqs = [parse_sigma(args.sigma, cfg.n)] if args.sigma else enumerate_sequences(cfg.n0)
    eqs = []
    for sigma in seqs:
        eqs.extend(equilibria_for(sigma, cfg))
    grouped = group_identical(eqs)
    header = ["sigma", "xi", "C_hat", *[f"v_{i + 1}" for i in range(cfg.n - 1)], "verdict", "multiplicity", "aliases"]
    rows = []
    for eq in grouped:
        rep = equilibrium_report(eq, cfg)
        aliases = " ".join(s.label for s in eq.aliases)
        rows.append([eq.sigma.label, eq.xi, eq.c_hat, *eq.v, rep.verdict, eq.multiplicity, aliases])
    meta = _meta(args, units="xi dimensionless; C_hat dimensionless; v in rad (-pi, pi]",
                 equilibria_by_sign_sequence=len(eqs), distinct_states=len(grouped), solver_tol=1e-12)
    _emit(args, header, rows, meta)


def cmd_bifurcations(args):
    n0 = (args.n - 1) // 2
    ModelConfig(args.n, a=args.a)
    seqs = None if args.enumerate_all else [SignSequence.all_ones(n0)]
    events = events_for(n0, a=args.a, sequences=seqs)
    header = ["kind", "K_over_a", "K_star", "xi_star", "criticality", "degeneracy_order", "participants"]
    rows = [[e.kind, e.ratio, e.K_star, e.xi_star, e.criticality, e.degeneracy_order,
             " ".join(p.label for p in e.participants)] for e in events]
    extra = {"units": "K in rad/time; xi dimensionless"}
    if args.enumerate_all:
        workers = args.workers
        if workers is None and os.environ.get("KURAMOTO_SYNC_THREADS"):
            workers = int(os.environ["KURAMOTO_SYNC_THREADS"])
        c = count_events(n0, workers=workers)
        extra.update({
            "families_distinct": c.families_distinct,
            "families_coarse": c.families_coarse,
            "saddle_nodes": c.saddle_nodes,
            "pitchforks": c.pitchforks,
            "pitchfork_lower_bound": c.bounds["pitchforks_min"],
        })
    _emit(args, header, rows, _meta(args, **extra))


def cmd_chi(args):
    sigma = parse_sigma(args.sigma, args.n)
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    xs = np.linspace(0.0, 1.0, args.samples)
    chi = chi_paired(sigma, xs)
    with np.errstate(divide="ignore"):
        d = chi_derivative(sigma, xs)
        ratio = np.where(np.abs(chi) > 0, 1.0 / np.abs(chi), np.inf)
    header = ["xi", "chi", "dchi_dxi", "K_over_a"]
    rows = [[x, c, dd, r] for x, c, dd, r in zip(xs, chi, d, ratio)]
    _emit(args, header, rows, _meta(args, units="all columns dimensionless"))


def cmd_diagram(args):
    n0 = (args.n - 1) // 2
    ModelConfig(args.n, a=args.a)
    if args.K_range is not None:
        K_range = tuple(args.K_range)
    else:
        K_range = (args.ratio_range[0] * args.a, args.ratio_range[1] * args.a)
    seqs = [parse_sigma(args.sigma, args.n)] if args.sigma else None
    pts = branch_diagram(n0, K_range, args.samples, a=args.a, sequences=seqs)
    header = ["K", "K_over_a", "sigma_id", "sigma", "root", "xi", "component", "v", "verdict"]
    rows = []
    for p in pts:
        for i, v in enumerate(p.v):
            rows.append([p.K, p.K / args.a, p.sigma.index, p.sigma.label, p.root, p.xi, i + 1, v, p.verdict])
    _emit(args, header, rows, _meta(args, K_range=f"{K_range[0]:.15g} {K_range[1]:.15g}",
                                     samples=args.samples, units="K in rad/time; v in rad"))


def cmd_stability(args):
    n = args.n
    sigma = parse_sigma(args.sigma, n)
    entries = []
    if args.xi is not None:
        chi = chi_paired(sigma, args.xi)
        if chi == 0:
            raise ConsistencyError("chi vanishes at this xi; no finite coupling")
        cfg = ModelConfig(n, a=args.a, K=args.a / abs(chi))
        eqs = [build_equilibrium(sigma, args.xi, cfg)]
    else:
        cfg = _config(args)
        eqs = equilibria_for(sigma, cfg)
    for eq in eqs:
        rep = spectrum(km_jacobian(eq.v, cfg))
        entries.append({
            "sigma": sigma.label, "xi": eq.xi, "K": cfg.K, "K_over_a": cfg.ratio, "C_hat": eq.c_hat,
            "eigenvalues": rep.eigenvalues, "l_plus": rep.l_plus, "l_zero": rep.l_zero,
            "l_minus": rep.l_minus, "verdict": rep.verdict, "zero_tol": rep.zero_tol,
        })
    meta = _meta(args, units="eigenvalues in 1/time")
    if args.format == "json":
        _emit(args, [], [], meta, json_data=entries)
    else:
        header = ["sigma", "xi", "K", "verdict", "l_plus", "l_zero", "l_minus", *[f"lambda_{i + 1}" for i in range(n)]]
        rows = [[e["sigma"], e["xi"], e["K"], e["verdict"], e["l_plus"], e["l_zero"], e["l_minus"], *e["eigenvalues"]]
                for e in entries]
        _emit(args, header, rows, meta)


def cmd_simulate(args):
    cfg = _config(args)
    if args.sigma:
        sigma = parse_sigma(args.sigma, cfg.n)
        roots = ChiCurve(sigma).roots(cfg.beta)
        if args.root >= len(roots):
            raise UsageError(f"sigma {sigma.label} has {len(roots)} equilibria at this coupling; --root {args.root} unavailable")
        u_ref = lift_state(build_equilibrium(sigma, roots[args.root], cfg).v)
        start = f"equilibrium {sigma.label} root {args.root}"
    else:
        u_ref = np.zeros(cfg.n)
        start = "in-phase state"
    u0 = u_ref + perturbation(cfg.n, args.perturb, args.seed) if args.perturb > 0 else u_ref
    dt = args.dt if args.dt is not None else 0.01 / cfg.K
    traj = integrate(u0, cfg, args.t_end, dt, record_every=args.record_every,
                     descriptor=f"{start} + rms {args.perturb:g} (seed {args.seed})")
    header = ["t", *[f"u_{i + 1}" for i in range(cfg.n)]]
    rows = [[t, *u] for t, u in zip(traj.times, traj.states)]
    _emit(args, header, rows, _meta(args, initial=traj.descriptor, dt=traj.dt, integrator="rk4 fixed step",
                                     units="t in time units; u in rad (-pi, pi]"))


def cmd_continuum(args):
    if args.K is not None:
        beta = args.a / args.K
    else:
        beta = 1.0 / args.ratio
    flips = FlipSet(tuple(tuple(iv) for iv in (args.flip or [])))
    sol = build_discontinuous(flips, beta, a=args.a, root=args.root)
    if sol is None:
        raise NumericalFailure(f"no stationary profile with this flip set at K/a = {1 / beta:.15g}")
    meta = _meta(args, kind=sol.kind, C=sol.C, eta=sol.eta, flip_set=str(list(flips.intervals)),
                 units="x dimensionless; u in rad (-pi, pi]")
    if sol.note:
        meta["note"] = sol.note
    if args.discretize:
        if args.discretize % 2 == 0:
            raise UsageError("--discretize must be odd")
        vals = discretize(sol, args.discretize).values
        xs = (np.arange(args.discretize) + 0.5) / args.discretize
        header = ["x_mid", "cell_average"]
        rows = list(zip(xs, vals))
    else:
        xs = np.linspace(0.0, 1.0, args.samples)
        header = ["x", "u"]
        rows = list(zip(xs, sol.profile(xs)))
    _emit(args, header, rows, meta)


def cmd_selfcheck(args):
    from .selfcheck import run_all

    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        results = run_all(stream=out)
        failed = [r for r in results if not r.passed]
        print(f"{len(results) - len(failed)}/{len(results)} checks passed", file=out)
    finally:
        if args.output:
            out.close()
    return 1 if failed else 0


# ----------------------------------------------------------------------------
# parser

def _add_common(p, need_n=True):
    if need_n:
        p.add_argument("--n", type=int, required=True, help="odd node count >= 3")
    p.add_argument("--a", type=float, default=1.0, help="frequency slope (default 1)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", help="write to this file instead of stdout")


def _add_coupling(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--K", type=float, help="coupling strength")
    g.add_argument("--ratio", type=float, help="coupling ratio K/a")
    return g


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kuramoto-sync", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("equilibria", help="all equilibria at a given coupling")
    _add_common(p)
    _add_coupling(p)
    p.add_argument("--sigma", help="restrict to one sign sequence, e.g. '+-++'")
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("bifurcations", help="saddle-node and pitchfork events")
    _add_common(p)
    p.add_argument("--enumerate-all", action="store_true", help="all sign sequences, with exhaustive counts")
    p.add_argument("--workers", type=int, default=None, help="processes for the exhaustive count (default: $KURAMOTO_SYNC_THREADS or 1)")
    p.set_defaults(func=cmd_bifurcations)

    p = sub.add_parser("chi", help="sample the consistency function of one sign sequence")
    _add_common(p)
    p.add_argument("--sigma", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=cmd_chi)

    p = sub.add_parser("diagram", help="branch diagram over a range of couplings")
    _add_common(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--K-range", dest="K_range", type=float, nargs=2, metavar=("LO", "HI"))
    g.add_argument("--ratio-range", dest="ratio_range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--sigma", help="restrict to one sign sequence")
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("stability", help="Jacobian spectrum of one sign sequence's equilibria")
    _add_common(p)
    p.set_defaults(format="json")
    p.add_argument("--sigma", required=True)
    g = _add_coupling(p)
    g.add_argument("--xi", type=float, help="evaluate at this xi (coupling implied)")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("simulate", help="integrate the model with fixed-step RK4")
    _add_common(p)
    _add_coupling(p)
    p.add_argument("--sigma", help="start from this sign sequence's equilibrium")
    p.add_argument("--root", type=int, default=0, help="which equilibrium of --sigma (by increasing xi)")
    p.add_argument("--perturb", type=float, default=0.0, help="rms size of the initial disturbance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-end", dest="t_end", type=float, default=100.0)
    p.add_argument("--dt", type=float, default=None, help="step (default 0.01/K)")
    p.add_argument("--record-every", dest="record_every", type=int, default=100)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("continuum", help="stationary profile of the continuum limit")
    _add_common(p, need_n=False)
    _add_coupling(p)
    p.add_argument("--flip", type=float, nargs=2, action="append", metavar=("LO", "HI"),
                   help="flip interval (repeatable)")
    p.add_argument("--root", type=int, default=0)
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--discretize", type=int, default=None, help="emit cell averages for this odd n")
    p.set_defaults(func=cmd_continuum)

    p = sub.add_parser("selfcheck", help="run the acceptance checks")
    p.add_argument("--output")
    p.set_defaults(func=cmd_selfcheck, format="csv")
    return parser


def _join_sigma(argv):
    # sign strings such as "-+-+" look like options to argparse
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--sigma":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--sigma={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_sigma(argv))
    try:
        code = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (NumericalFailure, ConsistencyError) as exc:
        print(f"kuramoto-sync: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"kuramoto-sync: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return int(code or 0)


if __name__ == "__main__":
    sys.exit(main())
