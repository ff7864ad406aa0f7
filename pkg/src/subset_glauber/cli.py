"""Command-line entry point.

Results go to stdout as JSON; logs go to stderr. Exit codes: 0 success,
1 a verification check failed, 2 graph parse error (or bad usage),
3 invalid model, 4 cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import corpus as corpus_mod
from .dynamics import ChainConfig, EmptyGroundSetError, empirical_vector, run, transition_matrix
from .graph import GraphParseError, Kind, Subset, parse_graph, read_graph
from .models import (
    CapExceededError,
    InvalidModelError,
    exact_partition_log,
    model_from_config,
)
from .verification import (
    check_multiplicativity,
    congestion,
    exact_mixing_time,
    lemma_report,
    stationary_distribution,
    tv_curve,
    tv_distance,
)
from .widths import EXACT_CAP, resolve_ordering, write_ordering

log = logging.getLogger("subset_glauber")

EXIT_FAIL, EXIT_PARSE, EXIT_MODEL, EXIT_CAP = 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _emit(obj):
    json.dump(obj, sys.stdout, indent=1)
    sys.stdout.write("\n")


def _load_graph(path):
    try:
        return read_graph(path)
    except GraphParseError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from None
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from None


def _model_config(args) -> dict:
    flag_params = {
        k: getattr(args, k)
        for k in ("q", "mu", "x", "y", "v", "xs")
        if getattr(args, k, None) is not None
    }
    if args.model and (args.family or flag_params):
        raise CliError(EXIT_PARSE, "use either --model or --family with parameter flags, not both")
    if args.model:
        text = args.model
        if text.startswith("@"):
            with open(text[1:]) as fh:
                text = fh.read()
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_MODEL, f"--model is not valid JSON: {exc}") from None
    if not args.family:
        raise CliError(EXIT_MODEL, "a model is required (--model JSON or --family)")
    cfg = {"family": args.family}
    for k, v in flag_params.items():
        if k == "xs":
            cfg["x"] = v
        elif k == "v":
            cfg["v"] = v
        else:
            cfg[k] = v
    return cfg


def _load_model(args, g):
    try:
        model = model_from_config(_model_config(args))
        model.check_graph(g)
    except InvalidModelError as exc:
        raise CliError(EXIT_MODEL, str(exc)) from None
    return model


def _ordering(g, kind, how, cap=EXACT_CAP):
    try:
        return resolve_ordering(g, kind, how, cap)
    except CapExceededError as exc:
        raise CliError(EXIT_CAP, f"{exc}; try --ordering greedy") from None
    except (OSError, ValueError) as exc:
        raise CliError(EXIT_PARSE, f"bad ordering {how!r}: {exc}") from None


# subcommands ----------------------------------------------------------------

def cmd_sample(args) -> int:
    g = _load_graph(args.graph)
    model = _load_model(args, g)
    k = g.universe(model.kind)
    try:
        initial = None if args.initial is None else Subset(model.kind, k, int(args.initial, 16))
        cfg = ChainConfig(
            model, g, seed=args.seed, steps=args.steps, initial=initial,
            burn_in=args.burn_in, thinning=args.thin,
        )
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"bad sampler flags: {exc}") from None
    try:
        trace = run(cfg)
    except EmptyGroundSetError as exc:
        raise CliError(EXIT_MODEL, str(exc)) from None
    if args.out:
        with open(args.out, "w") as fh:
            for step, mask, lw in zip(trace.sample_steps, trace.masks, trace.log_weights):
                fh.write(json.dumps({"step": int(step), "subset": f"{int(mask):x}", "log_weight": float(lw)}))
                fh.write("\n")
    summary = {
        "family": model.family,
        "kind": model.kind.value,
        "seed": args.seed,
        "steps": args.steps,
        "burn_in": cfg.burn_in,
        "thinning": cfg.thinning,
        "samples": len(trace),
        "acceptance_rate": trace.acceptance_rate,
        "final": trace.final.hex(),
    }
    if k <= 20 and len(trace):
        pi = stationary_distribution(model, g)
        summary["tv_to_exact"] = tv_distance(empirical_vector(trace), pi)
    if args.summary:
        with open(args.summary, "w") as fh:
            json.dump(summary, fh, indent=1)
    _emit(summary)
    return 0


def cmd_exact(args) -> int:
    g = _load_graph(args.graph)
    model = _load_model(args, g)
    try:
        log_z = exact_partition_log(model, g)
    except CapExceededError as exc:
        raise CliError(EXIT_CAP, str(exc)) from None
    out = {"family": model.family, "kind": model.kind.value, "log_partition": log_z}
    out["partition"] = math.exp(log_z) if log_z < 700 else None
    k = g.universe(model.kind)
    if k <= 20 and not args.no_pi:
        pi = stationary_distribution(model, g)
        out["pi"] = {f"{s:x}": float(p) for s, p in enumerate(pi)}
    _emit(out)
    return 0


def cmd_width(args) -> int:
    g = _load_graph(args.graph)
    kind = Kind(args.kind)
    o = _ordering(g, kind, args.ordering, args.cap)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(write_ordering(o))
    _emit({"kind": kind.value, "width": o.width, "ordering": list(o.perm), "method": args.ordering})
    return 0


def cmd_congestion(args) -> int:
    g = _load_graph(args.graph)
    model = _load_model(args, g)
    o = _ordering(g, model.kind, args.ordering)
    try:
        rep = congestion(model, g, o)
        lem = lemma_report(model, g, o)
    except CapExceededError as exc:
        raise CliError(EXIT_CAP, str(exc)) from None
    _emit({"congestion": rep.to_json(), "lemma": lem.to_json(), "ordering": list(o.perm)})
    return 0 if rep.passed and lem.passed else EXIT_FAIL


def cmd_mixing(args) -> int:
    g = _load_graph(args.graph)
    model = _load_model(args, g)
    o = _ordering(g, model.kind, args.ordering)
    try:
        rep = congestion(model, g, o)
        mix = exact_mixing_time(model, g, args.epsilon, rep)
    except CapExceededError as exc:
        raise CliError(EXIT_CAP, str(exc)) from None
    if args.plot_data:
        P = transition_matrix(model, g, cap=1 << 10)
        pi = stationary_distribution(model, g)
        curve = tv_curve(P, pi, max(mix.tau, 1) * 2)
        with open(args.plot_data, "w") as fh:
            fh.write("t,tv\n")
            for t, d in enumerate(curve):
                fh.write(f"{t},{d!r}\n")
    _emit({"mixing": mix.to_json(), "congestion": rep.to_json()})
    return 0 if mix.passed else EXIT_FAIL


def cmd_check_mult(args) -> int:
    g = _load_graph(args.graph)
    model = _load_model(args, g)
    try:
        rep = check_multiplicativity(model, g, args.lam)
    except CapExceededError as exc:
        raise CliError(EXIT_CAP, str(exc)) from None
    _emit(rep.to_json())
    return 0 if rep.passed else EXIT_FAIL


# verify-all -----------------------------------------------------------------

MULT_MAX_N = 6
STATE_CAP = 1 << 10


def verify_instance(name, g, models, epsilon=0.01) -> dict:
    """Run every applicable check for one graph; checks outside the caps are skipped."""
    checks = []
    orderings = {}

    def add(model, check, passed, detail):
        checks.append({"model": model.config(), "check": check, "pass": passed, "detail": detail})

    for model in models:
        k = g.universe(model.kind)
        if g.n <= MULT_MAX_N:
            rep = check_multiplicativity(model, g)
            add(model, "multiplicativity", rep.passed, rep.to_json())
        if 1 << k > STATE_CAP:
            add(model, "congestion", None, {"skipped": f"2^{k} states"})
            continue
        if model.kind not in orderings:
            orderings[model.kind] = resolve_ordering(g, model.kind, "exact")
        o = orderings[model.kind]
        lem = lemma_report(model, g, o)
        add(model, "lemma_ratio", lem.passed, lem.to_json())
        cong = congestion(model, g, o)
        add(model, "congestion", cong.passed, cong.to_json())
        mix = exact_mixing_time(model, g, epsilon, cong)
        add(model, "sinclair", mix.passed, mix.to_json())
        P = transition_matrix(model, g, cap=STATE_CAP)
        pi = stationary_distribution(model, g)
        flow = pi[:, None] * P
        db = float(np.abs(flow - flow.T).max())
        rows = float(np.abs(P.sum(axis=1) - 1.0).max())
        add(model, "detailed_balance", db <= 1e-12 and rows <= 1e-12,
            {"max_flow_asymmetry": db, "max_row_error": rows})
    return {"name": name, "n": g.n, "m": g.m, "checks": checks}


def _verify_task(task):
    name, text, configs, epsilon = task
    g = parse_graph(text)
    models = corpus_mod.model_matrix(g) if configs is None else [model_from_config(c) for c in configs]
    return verify_instance(name, g, models, epsilon)


def cmd_verify_all(args) -> int:
    if args.graph and args.corpus:
        raise CliError(EXIT_PARSE, "use either --graph or --corpus")
    if args.graph:
        entries = [(args.graph, _load_graph(args.graph), None)]
    elif args.corpus:
        try:
            entries = corpus_mod.load_manifest(args.corpus)
        except GraphParseError as exc:
            raise CliError(EXIT_PARSE, str(exc)) from None
        except InvalidModelError as exc:
            raise CliError(EXIT_MODEL, str(exc)) from None
    else:
        entries = [(name, g, None) for name, g in corpus_mod.default_corpus()]
    if args.models != "default":
        try:
            with open(args.models) as fh:
                shared = [model_from_config(c) for c in json.load(fh)]
        except InvalidModelError as exc:
            raise CliError(EXIT_MODEL, str(exc)) from None
        entries = [(name, g, models or shared) for name, g, models in entries]
    if not entries:
        log.warning("empty corpus: nothing to verify")
    tasks = [
        (name, g.to_text(), None if models is None else [m.config() for m in models], args.epsilon)
        for name, g, models in entries
    ]
    try:
        if args.threads > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=args.threads) as pool:
                results = list(pool.map(_verify_task, tasks, chunksize=8))
        else:
            results = [_verify_task(t) for t in tasks]
    except InvalidModelError as exc:
        raise CliError(EXIT_MODEL, str(exc)) from None
    total = passed = skipped = 0
    failures = []
    for inst in results:
        for c in inst["checks"]:
            total += 1
            if c["pass"] is None:
                skipped += 1
            elif c["pass"]:
                passed += 1
            else:
                failures.append({"instance": inst["name"], **c})
    out = {
        "summary": {
            "instances": len(results),
            "checks": total,
            "passed": passed,
            "failed": len(failures),
            "skipped": skipped,
        },
        "failures": failures,
    }
    if args.details:
        out["instances"] = results
    _emit(out)
    return EXIT_FAIL if failures else 0


# argument parsing -----------------------------------------------------------

def _add_model_flags(p):
    p.add_argument("--model", help='JSON model config, e.g. \'{"family":"rc","q":2,"mu":1}\' (or @file)')
    p.add_argument("--family", choices=["rc", "tutte", "r2", "multi_tutte", "upoly", "interlace"])
    p.add_argument("--q", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--x", type=float, help="x for tutte / interlace")
    p.add_argument("--y", type=float)
    p.add_argument("--v", type=float, nargs="+", help="per-edge weights for multi_tutte")
    p.add_argument("--xs", type=float, nargs="+", help="per-size x_1..x_n for upoly")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subset-glauber", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="run the single bond / single site flip chain")
    p.add_argument("--graph", required=True)
    _add_model_flags(p)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int, default=None, help="default: steps // 10")
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--initial", help="initial subset as a hex bitmask (default: empty)")
    p.add_argument("--out", help="JSON-lines trace file")
    p.add_argument("--summary", help="also write the summary JSON here")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("exact", help="exact log partition function and stationary distribution")
    p.add_argument("--graph", required=True)
    _add_model_flags(p)
    p.add_argument("--no-pi", action="store_true", help="omit the stationary distribution")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("width", help="linear-width / vertex-separation orderings")
    p.add_argument("--graph", required=True)
    p.add_argument("--kind", choices=["edge", "vertex"], default="edge")
    p.add_argument("--ordering", default="exact", help="exact | greedy | auto | path to an ordering file")
    p.add_argument("--cap", type=int, default=EXACT_CAP)
    p.add_argument("--out", help="write the ordering, one index per line")
    p.set_defaults(func=cmd_width)

    p = sub.add_parser("congestion", help="exact canonical-path congestion and lemma ratio")
    p.add_argument("--graph", required=True)
    _add_model_flags(p)
    p.add_argument("--ordering", default="exact")
    p.set_defaults(func=cmd_congestion)

    p = sub.add_parser("mixing", help="exact mixing time against the congestion bound")
    p.add_argument("--graph", required=True)
    _add_model_flags(p)
    p.add_argument("--ordering", default="exact")
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--plot-data", help="write (t, worst-start TV) as CSV")
    p.set_defaults(func=cmd_mixing)

    p = sub.add_parser("check-mult", help="exhaustive lambda-multiplicativity check")
    p.add_argument("--graph", required=True)
    _add_model_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, help="override the model's lambda")
    p.set_defaults(func=cmd_check_mult)

    p = sub.add_parser("verify-all", help="every check over a corpus")
    p.add_argument("--graph")
    p.add_argument("--corpus", help="manifest: JSON list of {graph, models}")
    p.add_argument("--models", default="default", help="'default' or a JSON file with a list of model configs")
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--details", action="store_true", help="include per-instance results")
    p.set_defaults(func=cmd_verify_all)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except CliError as exc:
        log.error("%s", exc)
        return exc.code
    except CapExceededError as exc:
        log.error("%s", exc)
        return EXIT_CAP
    except InvalidModelError as exc:
        log.error("%s", exc)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
