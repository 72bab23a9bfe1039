"""Command-line front end: generate | pack | oracle | bench | adversary.

Exit codes: 0 success, 2 validation or precondition failure, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import instances
from .aptas import DEFAULT_MAX_CONFIGS, aptas_solve
from .classic import best_fit, bounded_best_fit, first_fit, first_fit_decreasing, next_fit
from .core import (
    BudgetExceeded, Instance, PreconditionError, compute_stretch, instance_from_json,
    instance_to_json, load_instance, parse_rational, report_row, save_instance,
    save_packing, validate_packing, write_report,
)
from .offline import DEFAULT_BUDGET, offline_1plus_eps, offline_17_1plus_eps
from .online import (
    MFF, MNF, LevelScheme, OnlineBoundedBestFit, OnlineFirstFit, OnlineNextFit, Placement,
    ThresholdScheme, run_online, write_trace,
)
from .oracle import OracleLimitError, cached_solve

ALGORITHMS = ("nf", "ff", "ffd", "bf", "bbf", "mnf", "mff", "level17", "threshold",
              "vl1eps", "off17", "aptas")
ONLINE = {"mnf", "mff", "level17", "threshold"}
FAMILIES = ("theorem1", "sylvester", "tightness", "random")

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3


def parse_count(text) -> int:
    """Integer flag that also accepts forms like ``1e6``."""
    value = float(text)
    if value != int(value) or value < 0:
        raise argparse.ArgumentTypeError(f"not a non-negative integer: {text}")
    return int(value)


def _need(value, flag, algo):
    if value is None:
        raise PreconditionError(f"--{flag} is required for {algo}")
    return value


def run_algorithm(algo: str, instance: Instance, epsilon=None, beta=None, k: int = 2,
                  budget: int = DEFAULT_BUDGET, max_configs: int = DEFAULT_MAX_CONFIGS,
                  candidates_out=None):
    """Run one named algorithm; returns (packing, placement events)."""
    items = instance.items
    if algo in ONLINE:
        eps = parse_rational(_need(epsilon, "epsilon", algo))
        if algo == "threshold":
            alg = ThresholdScheme(eps)
        else:
            mode = MFF if algo == "mff" else MNF
            alg = LevelScheme(eps, mode, isolate=(algo == "level17"))
        return run_online(alg, items)
    if algo == "nf":
        p = next_fit(items)
    elif algo == "ff":
        p = first_fit(items)
    elif algo == "ffd":
        p = first_fit_decreasing(items)
    elif algo == "bf":
        p = best_fit(items)
    elif algo == "bbf":
        p = bounded_best_fit(items, k=k)
    elif algo == "vl1eps":
        p = offline_1plus_eps(instance, _need(epsilon, "epsilon", algo), budget)
    elif algo == "off17":
        p = offline_17_1plus_eps(instance, _need(epsilon, "epsilon", algo), budget)
    elif algo == "aptas":
        res = aptas_solve(instance, _need(epsilon, "epsilon", algo), _need(beta, "beta", algo),
                          max_configs=max_configs, max_nodes=budget,
                          keep_trace=candidates_out is not None)
        if candidates_out is not None:
            with open(candidates_out, "w") as fh:
                json.dump(res.trace, fh, indent=1)
        p = res.packing
    else:
        raise PreconditionError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")
    events = [Placement(it.id, b.id) for b in p.bins for it in b.contents]
    return p, events


def _size_law(text):
    kind, _, rest = text.partition(":")
    if kind == "uniform":
        lo, hi = rest.split(",") if rest else ("1/100", "1")
        return ("uniform", lo, hi)
    if kind == "discrete":
        return ("discrete", rest.split(","))
    raise PreconditionError(f"size law must be uniform:lo,hi or discrete:a,b,..., got {text!r}")


def generate(family: str, n=None, m=None, epsilon=None, j=None, gamma=None, pairs=None,
             seed=0, size_law="uniform:1/100,1") -> Instance:
    if family == "theorem1":
        return instances.gen_theorem1(_need(n, "n", family), _need(epsilon, "epsilon", family))
    if family == "sylvester":
        return instances.gen_sylvester(_need(m, "m", family), _need(n, "n", family),
                                       _need(epsilon, "epsilon", family))
    if family == "tightness":
        return instances.gen_tightness(_need(j, "j", family), _need(gamma, "gamma", family),
                                       _need(pairs, "pairs", family))
    if family == "random":
        return instances.gen_random(_need(n, "n", family), m or 1, _size_law(size_law), seed)
    raise PreconditionError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def adversary_algorithm(algo: str, epsilon=None, k: int = 2):
    if algo == "nf":
        return OnlineNextFit()
    if algo == "ff":
        return OnlineFirstFit()
    if algo == "bbf":
        return OnlineBoundedBestFit(k)
    if algo == "threshold":
        return ThresholdScheme(_need(epsilon, "epsilon", algo))
    if algo in ("level17", "mnf", "mff"):
        mode = MFF if algo == "mff" else MNF
        return LevelScheme(_need(epsilon, "epsilon", algo), mode, isolate=(algo == "level17"))
    raise PreconditionError(f"algorithm {algo!r} has no online form")


# ---------------------------------------------------------------------------
# bench


def _bench_instance(spec: dict) -> tuple[str, Instance]:
    if "path" in spec:
        inst = load_instance(spec["path"])
        return spec.get("name", spec["path"]), inst
    if "items" in spec:
        return spec.get("name", "inline"), instance_from_json(spec)
    params = {k: v for k, v in spec.items() if k not in ("name", "family", "oracle")}
    inst = generate(spec["family"], **params)
    return spec.get("name", spec["family"]), inst


def _bench_cell(args) -> dict:
    name, inst, alg, use_oracle = args
    params = {k: v for k, v in alg.items() if k != "algo"}
    try:
        packing, _ = run_algorithm(alg["algo"], inst, params.get("epsilon"), params.get("beta"),
                                   int(params.get("k", 2)), parse_count(params.get("budget", DEFAULT_BUDGET)))
        report = validate_packing(packing, inst)
        if not report.ok:
            return report_row(name, alg["algo"], params, None,
                              f"invalid packing: {len(report.violations)} violations")
        oracle = None
        if use_oracle:
            try:
                oracle = cached_solve(inst)
            except OracleLimitError:
                oracle = None
        return report_row(name, alg["algo"], params, compute_stretch(packing, inst, oracle))
    except (PreconditionError, BudgetExceeded, ValueError) as exc:
        return report_row(name, alg["algo"], params, None, f"{type(exc).__name__}: {exc}")


def bench(manifest: dict, jobs: int = 1) -> str:
    """Instances x algorithms; rows follow manifest order."""
    default_oracle = manifest.get("oracle", True)
    cells = []
    for spec in manifest["instances"]:
        name, inst = _bench_instance(spec)
        use_oracle = spec.get("oracle", default_oracle)
        for alg in manifest["algorithms"]:
            cells.append((name, inst, alg, use_oracle))
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(_bench_cell, cells))
    else:
        rows = [_bench_cell(c) for c in cells]
    return write_report(rows)


# ---------------------------------------------------------------------------
# argument parsing


def _write_text(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="colourpack", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write an instance JSON file")
    g.add_argument("family", choices=FAMILIES)
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--epsilon")
    g.add_argument("--j", type=int)
    g.add_argument("--gamma")
    g.add_argument("--pairs", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--size-law", default="uniform:1/100,1",
                   help="uniform:lo,hi or discrete:a,b,... (random family)")
    g.add_argument("-o", "--out", default="-")

    p = sub.add_parser("pack", help="pack an instance file")
    p.add_argument("instance")
    p.add_argument("--algo", required=True, choices=ALGORITHMS)
    p.add_argument("--epsilon")
    p.add_argument("--beta")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--budget", type=parse_count, default=None,
                   help="search node budget (vl1eps, off17, aptas)")
    p.add_argument("--max-configs", type=parse_count, default=None)
    p.add_argument("--config", help="JSON file with budget and max_configs")
    p.add_argument("-o", "--out", help="packing JSON output")
    p.add_argument("--trace", help="placement trace output (JSON lines)")
    p.add_argument("--candidates", help="aptas: dump evaluated candidates as JSON")

    o = sub.add_parser("oracle", help="exact optimum (and OPT_beta) as JSON")
    o.add_argument("instance")
    o.add_argument("--beta")
    o.add_argument("--limit-n", type=int, default=16)
    o.add_argument("--beta-limit-n", type=int, default=10)
    o.add_argument("-o", "--out", default="-")

    b = sub.add_parser("bench", help="run a manifest of instances x algorithms to CSV")
    b.add_argument("manifest")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("-o", "--out", default="-")

    a = sub.add_parser("adversary", help="round-based online adversary trajectory as CSV")
    a.add_argument("--algo", required=True, choices=("nf", "ff", "bbf", "mnf", "mff", "level17", "threshold"))
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--rounds", type=int, required=True)
    a.add_argument("--epsilon")
    a.add_argument("--k", type=int, default=2)
    a.add_argument("-o", "--out", default="-")
    return ap


def _cmd_pack(args) -> int:
    inst = load_instance(args.instance)
    config = {}
    if args.config:
        with open(args.config) as fh:
            config = json.load(fh)
    budget = args.budget if args.budget is not None else parse_count(config.get("budget", DEFAULT_BUDGET))
    max_configs = (args.max_configs if args.max_configs is not None
                   else parse_count(config.get("max_configs", DEFAULT_MAX_CONFIGS)))
    packing, events = run_algorithm(args.algo, inst, args.epsilon, args.beta, args.k, budget,
                                    max_configs, args.candidates)
    report = validate_packing(packing, inst)
    if not report.ok:
        for v in report.violations:
            print(f"violation: {v.kind} bin={v.bin_id} item={v.item_id} {v.detail}", file=sys.stderr)
        return EXIT_INVALID
    if args.out:
        save_packing(packing, args.out)
    if args.trace:
        with open(args.trace, "w") as fh:
            write_trace(events, fh)
    spans = packing.spans()
    print(f"bins={packing.bin_count} spans=" + ",".join(f"{c}:{spans[c]}" for c in sorted(spans)))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            inst = generate(args.family, args.n, args.m, args.epsilon, args.j, args.gamma,
                            args.pairs, args.seed, args.size_law)
            if args.out == "-":
                print(json.dumps(instance_to_json(inst), indent=1))
            else:
                save_instance(inst, args.out)
            return EXIT_OK
        if args.command == "pack":
            return _cmd_pack(args)
        if args.command == "oracle":
            inst = load_instance(args.instance)
            res = cached_solve(inst, args.beta, limit_n=args.limit_n, beta_limit_n=args.beta_limit_n)
            _write_text(json.dumps(res.to_json(), indent=1) + "\n", args.out)
            return EXIT_OK
        if args.command == "bench":
            with open(args.manifest) as fh:
                manifest = json.load(fh)
            _write_text(bench(manifest, args.jobs), args.out)
            return EXIT_OK
        if args.command == "adversary":
            alg = adversary_algorithm(args.algo, args.epsilon, args.k)
            traj = instances.run_adversary(alg, args.n, args.rounds)
            _write_text(traj.to_csv(), args.out)
            if traj.error:
                print(f"stopped early: {traj.error}", file=sys.stderr)
                return EXIT_INVALID
            return EXIT_OK
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (PreconditionError, OracleLimitError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
