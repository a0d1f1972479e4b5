"""Command-line entry point: ``giantwalk <command> [flags]``.

Every artifact carries the fully resolved configuration, including the
seed. JSON outputs hold it under ``"config"``; edge lists carry it on a
leading ``#`` comment line; CSV tables get a ``<name>.config.json`` sidecar.
Nothing time- or host-dependent is written, so re-running a stored
configuration reproduces its artifacts byte for byte.

Exit status: 0 on success, 2 on usage errors, 3 when every requested
quantity was censored by a budget.
"""

from __future__ import annotations

import argparse
import json
import math
import secrets
import sys
from pathlib import Path


from . import __version__
from . import conductance as cond
from . import experiments as ex
from .decompose import dangling_mass, decompose
from .generators import RngSeed, read_degree_sequence, sample_configuration, sample_gnp
from .graph import GraphError, format_edgelist, is_bipartite, read_edgelist
from .walk import BudgetExceeded, WalkConfig, mixing_report

EXIT_OK, EXIT_USAGE, EXIT_CENSORED = 0, 2, 3


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ helpers


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def _dump(obj) -> str:
    return ex.summary_json(obj) + "\n"


def _resolve_seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(63)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def _check(cond_ok: bool, flag: str, msg: str) -> None:
    if not cond_ok:
        raise UsageError(f"{flag}: {msg}")


def _resolve_p(args, n: int) -> tuple[float, float | None]:
    if args.p is None and args.d is None:
        raise UsageError("one of --p or --d is required")
    if args.p is not None:
        _check(0.0 <= args.p <= 1.0, "--p", f"must lie in [0, 1], got {args.p}")
        return args.p, None
    _check(args.d >= 0, "--d", f"must be non-negative, got {args.d}")
    p = args.d / n
    _check(p <= 1.0, "--d", f"d/n = {p} exceeds 1")
    return p, args.d


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(tok)) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _starts(text: str):
    if text == "all":
        return "all"
    if "," in text or text.startswith("v"):
        return [int(t) for t in text.lstrip("v").split(",") if t]
    return int(text)


def _load(path: str):
    try:
        return read_edgelist(path)
    except FileNotFoundError:
        raise UsageError(f"--input: no such file {path}") from None


def _target_component(g, which: str):
    rep = decompose(g)
    if which == "giant":
        return rep, rep.giant_vertices
    idx = int(which)
    _check(0 <= idx < len(rep.components), "--component", f"index {idx} out of range")
    return rep, rep.components[idx]


# ----------------------------------------------------------------- commands


def cmd_gen(args) -> int:
    _check(args.n >= 1, "--n", f"must be positive, got {args.n}")
    seed = _resolve_seed(args)
    rs = RngSeed(seed, ("gen",))
    if args.model == "gnp":
        p, d = _resolve_p(args, args.n)
        g = sample_gnp(args.n, p, rs)
        config = {"command": "gen", "model": "gnp", "n": args.n, "p": p, "d": d, "seed": seed}
    else:
        _check(args.degrees is not None, "--degrees", "required for the configuration model")
        ds = read_degree_sequence(args.degrees)
        g = sample_configuration(ds, rs)
        config = {"command": "gen", "model": "config", "degrees": args.degrees, "n": len(ds), "seed": seed}
    config["version"] = __version__
    header = "# config " + json.dumps(config, sort_keys=True) + "\n"
    _emit(header + format_edgelist(g), args.out)
    return EXIT_OK


def cmd_decompose(args) -> int:
    g = _load(args.input)
    rep = decompose(g)
    body = rep.summary()
    body["dangling_mass"] = {str(i): dangling_mass(rep.dangling_trees, i) for i in args.tree_sizes}
    body["config"] = {"command": "decompose", "input": args.input, "tree_sizes": args.tree_sizes}
    _emit(_dump(body), args.out)
    return EXIT_OK


def cmd_walk(args) -> int:
    _check(0.0 <= args.laziness < 1.0, "--laziness", f"must lie in [0, 1), got {args.laziness}")
    _check(0.0 < args.epsilon < 1.0, "--epsilon", f"must lie in (0, 1), got {args.epsilon}")
    _check(args.budget > 0, "--budget", "must be positive")
    seed = _resolve_seed(args)
    g = _load(args.input)
    _, comp = _target_component(g, args.component)
    cfg = WalkConfig(
        laziness=args.laziness, epsilon=args.epsilon, starts=args.starts, seed=seed, max_matvecs=args.budget
    )
    body = {
        "config": {
            "command": "walk",
            "input": args.input,
            "component": args.component,
            "laziness": args.laziness,
            "epsilon": args.epsilon,
            "starts": args.starts,
            "budget": args.budget,
            "seed": seed,
        },
        "component_size": int(comp.size),
    }
    censored = 0
    for key, cesaro in (("t_mix", False), ("t_mix_cesaro", True)):
        try:
            body[key] = mixing_report(g, comp, cfg, cesaro=cesaro).to_dict()
        except BudgetExceeded as err:
            body[key] = {"censored": True, "reason": str(err)}
            censored += 1
        except GraphError as err:
            if cesaro or not is_bipartite(g, comp).bipartite:
                raise
            body[key] = {"censored": True, "reason": str(err)}
            censored += 1
    _emit(_dump(body), args.out)
    return EXIT_CENSORED if censored == 2 else EXIT_OK


def cmd_conductance(args) -> int:
    _check(args.budget >= 0, "--budget", "must be non-negative")
    seed = _resolve_seed(args)
    g = _load(args.input)
    rep, comp = _target_component(g, args.component)
    prof = cond.conductance_profile(g, comp, rep, budget=args.budget, seed=RngSeed(seed, ("phi",)))
    witnesses = [prof.global_witness] + [s.witness for s in prof.scales if s.witness]
    dy = cond.bound_dyadic_sum(prof, args.C)
    bounds = {
        "bound_lower": float(cond.bound_lower(g, comp, witnesses)),
        "bound_js": cond.bound_jerrum_sinclair(prof.global_phi, prof.pi_min, args.C),
        **dy.to_dict(),
    }
    config = {
        "command": "conductance",
        "input": args.input,
        "component": args.component,
        "budget": args.budget,
        "C": args.C,
        "seed": seed,
    }
    _emit(cond.profile_json(prof, bounds, config=config) + "\n", args.out)
    return EXIT_OK


def _write_table(outdir: Path, name: str, records, config: dict) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / f"{name}.csv").write_text(ex.records_to_csv(records))
    (outdir / f"{name}.config.json").write_text(_dump(config))


def cmd_experiment(args) -> int:
    seed = _resolve_seed(args)
    _check(args.replicates >= 1, "--replicates", "must be at least 1")
    _check(args.workers >= 1, "--workers", "must be at least 1")
    ns = args.n
    _check(bool(ns) and min(ns) >= 3, "--n", "needs values >= 3")
    outdir = Path(args.out)
    config = {
        "command": "experiment",
        "kind": args.kind,
        "n": ns,
        "d": args.d,
        "replicates": args.replicates,
        "seed": seed,
        "version": __version__,
    }
    if args.kind == "scaling":
        _check(args.regime in ex.REGIMES, "--regime", f"choose from {', '.join(ex.REGIMES)}")
        if args.regime == "constant-d":
            _check(args.d is not None and args.d > 1, "--d", "constant-d regime needs --d > 1")
        _check(0.0 <= args.laziness < 1.0, "--laziness", "must lie in [0, 1)")
        cfg = ex.ScalingConfig(
            args.regime, d=args.d, laziness=args.laziness, max_matvecs=args.budget, all_starts_below=args.all_starts_below
        )
        config.update(regime=args.regime, laziness=args.laziness, budget=args.budget, all_starts_below=args.all_starts_below)
        res = ex.run_scaling_study(ns, cfg, args.replicates, seed, workers=args.workers)
        records = res.records
        summary = {"fit": res.fit}
        outdir.mkdir(parents=True, exist_ok=True)
        curves = {}
        for key in ("ratio_local", "ratio_diameter"):
            xs = [n for n in ns if key in res.fit["cells"].get(str(n), {})]
            curves[key] = (xs, [res.fit["cells"][str(n)][key] for n in xs])
            ex.write_plot_data(outdir / f"{key}.dat", *curves[key])
        ex.write_svg(outdir / "scaling.svg", curves, title=f"T'_mix / predictor, {args.regime}")
    elif args.kind == "paths":
        _check(args.d is not None and args.d > 1, "--d", "path census needs --d > 1")
        records, summary = [], {}
        for n in ns:
            res = ex.run_path_census(n, args.d, args.replicates, seed, workers=args.workers)
            records += res.records
            summary[str(n)] = {
                "path_lower": res.path_lower,
                "path_upper": res.path_upper,
                "frac_above_lower": res.frac_above_lower,
                "frac_below_upper": res.frac_below_upper,
                "above_lower": res.above_lower,
                "below_upper": res.below_upper,
            }
        outdir.mkdir(parents=True, exist_ok=True)
        ex.write_plot_data(outdir / "longest_path.dat", [r.n for r in records], [r.metrics["longest_path"] for r in records])
    else:
        _check(args.d is not None and args.d > 1, "--d", "expansion check needs --d > 1")
        config["samples"] = args.samples
        records, summary = [], {}
        for n in ns:
            res = ex.run_expansion_check(n, args.d, args.replicates, args.samples, seed, workers=args.workers)
            records += res.records
            summary[str(n)] = {"eps_hat": res.eps_hat, "eps1_hat": res.eps1_hat, "l_hat": res.l_hat, "L_hat": res.L_hat}
        outdir.mkdir(parents=True, exist_ok=True)
        ex.write_plot_data(outdir / "eps_hat.dat", ns, [summary[str(n)]["eps_hat"] for n in ns])
    _write_table(outdir, args.kind, records, config)
    (outdir / f"{args.kind}.summary.json").write_text(_dump({"config": config, **summary}))
    print(f"wrote {outdir / (args.kind + '.csv')}", file=sys.stderr)
    if records and all(r.censored for r in records):
        return EXIT_CENSORED
    return EXIT_OK


def cmd_demo(args) -> int:
    _check(args.l >= 2, "--l", "must be at least 2")
    _check(args.expander_n >= 4, "--expander-n", "must be at least 4")
    seed = _resolve_seed(args)
    rep = ex.run_obstruction_demo(args.l, args.expander_n, args.walks, seed, max_matvecs=args.budget)
    body = {
        "config": {
            "command": "demo",
            "l": args.l,
            "expander_n": args.expander_n,
            "walks": args.walks,
            "budget": args.budget,
            "seed": seed,
        },
        **rep.to_dict(),
        "l_squared_over_10": math.floor(args.l**2 / 10),
    }
    _emit(_dump(body), args.out)
    return EXIT_OK


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="giantwalk", description="Random walks and conductance on sparse random graphs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def seed_flag(p):
        p.add_argument("--seed", type=int, default=None, help="root seed (generated and printed if omitted)")

    p = sub.add_parser("gen", help="sample a graph and write an edge list")
    p.add_argument("--n", type=int, required=True)
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--p", type=float)
    grp.add_argument("--d", type=float, help="average degree; p = d / n")
    p.add_argument("--model", choices=("gnp", "config"), default="gnp")
    p.add_argument("--degrees", help="degree-sequence file for --model config")
    seed_flag(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("decompose", help="components, 2-core, trees and degree-2 paths")
    p.add_argument("--input", required=True)
    p.add_argument("--tree-sizes", type=_int_list, default=[20], help="report vertices in dangling trees of at least these sizes")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("walk", help="exact T_mix and Cesaro T'_mix")
    p.add_argument("--input", required=True)
    p.add_argument("--component", default="giant", help="'giant' or a component index")
    p.add_argument("--laziness", type=float, default=0.0)
    p.add_argument("--epsilon", type=float, default=1 / math.e)
    p.add_argument("--starts", type=_starts, default="all", help="'all', a count k, or a comma list of vertices")
    p.add_argument("--budget", type=int, default=1_000_000, help="mat-vec budget")
    seed_flag(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("conductance", help="conductance profile and mixing bounds")
    p.add_argument("--input", required=True)
    p.add_argument("--component", default="giant")
    p.add_argument("--budget", type=int, default=20, help="largest component enumerated exactly")
    p.add_argument("--C", type=float, default=1.0, help="unknown constant in the upper bounds")
    seed_flag(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_conductance)

    p = sub.add_parser("experiment", help="replicated experiments; writes CSV and plot data")
    p.add_argument("kind", choices=("scaling", "paths", "expansion"))
    p.add_argument("--n", type=_int_list, required=True, help="comma-separated sizes")
    p.add_argument("--d", type=float, default=None)
    p.add_argument("--regime", default="constant-d")
    p.add_argument("--replicates", type=int, default=5)
    p.add_argument("--laziness", type=float, default=0.0)
    p.add_argument("--budget", type=int, default=1_000_000, help="mat-vec budget per walk")
    p.add_argument("--all-starts-below", type=int, default=0, help="use every start when the giant is this small")
    p.add_argument("--samples", type=int, default=1000, help="sets per graph for the expansion check")
    p.add_argument("--workers", type=int, default=1)
    seed_flag(p)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("demo", help="long path between two expanders")
    p.add_argument("--l", type=int, default=50)
    p.add_argument("--expander-n", type=int, default=100)
    p.add_argument("--walks", type=int, default=10_000)
    p.add_argument("--budget", type=int, default=5_000_000)
    seed_flag(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_demo)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        parser.error(str(err))
    except (GraphError, ValueError) as err:
        print(f"giantwalk: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
