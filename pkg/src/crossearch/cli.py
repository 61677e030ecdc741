"""Command-line interface.

Exit codes: 0 on success, 2 on configuration or usage errors, 3 when a
theoretical predictor is evaluated outside its numeric domain.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import evt, polycost
from .harness import (
    ConfigError,
    ExperimentConfig,
    fig3_defaults,
    load_config,
    read_rows,
    run_fig2,
    run_fig3,
)
from .search import (
    gradient_descent_restarts,
    mean_field_search,
    random_search,
    selection_crossover,
)
from .seeding import stream
from .svgplot import emit_plot

__all__ = ["main"]


def _emit(payload) -> None:
    print(json.dumps(payload))


def _load_cost(args) -> polycost.CostFunction:
    if args.cost is not None:
        return polycost.load_cost_function(args.cost)
    if args.n is None or args.k is None:
        raise ConfigError("provide --cost, or --n and --k to sample an instance")
    return polycost.sample_cost_function(args.n, args.k, args.instance_seed)


def _cmd_gen(args) -> int:
    cf = polycost.sample_cost_function(args.n, args.k, args.seed)
    polycost.save_cost_function(cf, args.out)
    _emit(
        {
            "path": args.out,
            "n_dims": cf.n_dims,
            "max_order": cf.max_order,
            "seed": cf.seed,
            "coefficients": int(cf.coefficients.size),
        }
    )
    return 0


def _cmd_eval(args) -> int:
    cf = polycost.load_cost_function(args.cost)
    text = args.state if args.state is not None else sys.stdin.read()
    try:
        entries = [int(part) for part in text.replace(",", " ").split()]
    except ValueError as err:
        raise ConfigError(f"state entries must be integers: {err}") from err
    state = polycost.validate_state(entries, cf.n_dims)
    _emit({"value": float(polycost.evaluate(cf, state))})
    return 0


def _cmd_search(args) -> int:
    cf = _load_cost(args)
    rng = stream(args.seed, 0)
    if args.algorithm == "random":
        result = random_search(cf, args.samples, rng)
    elif args.algorithm == "descent":
        result = gradient_descent_restarts(cf, args.restarts, rng)
    elif args.algorithm == "crossover":
        result = selection_crossover(
            cf, args.pool, args.offspring_pool, args.repeats, rng
        )
    else:
        result = mean_field_search(
            cf, args.n_parents, args.pool, args.offspring_pool, args.repeats, rng
        )
    payload = {
        "algorithm": args.algorithm,
        "best_value": float(result.best_value),
        "evaluations": int(result.evaluations),
        "best_state": [int(v) for v in result.best_state],
    }
    for key, value in result.extras.items():
        payload[key] = float(value)
    _emit(payload)
    return 0


def _cmd_theory(args) -> int:
    lines = [{"predictor": "global_min_estimate", "value": evt.global_min_estimate(args.n)}]
    base = evt.GaussianSpec(0.0, 1.0)
    for form in ("exact", "approximate"):
        spec = evt.min_distribution(base, args.m, form)
        lines.append(
            {
                "predictor": f"min_distribution_{form}",
                "mean": spec.mean,
                "variance": spec.variance,
            }
        )
    if args.target is not None:
        lines.append(
            {
                "predictor": "required_iterations",
                "target": args.target,
                "value": evt.required_iterations(args.target, base),
            }
        )
    params = evt.theory_params(args.n, polycost.uniform_order_variance(args.n, args.k))
    lines.append(
        {
            "predictor": "theory_params",
            "schema_strength": params.schema_strength,
            "gain": params.gain,
            "cost_base": params.cost_base,
            "n_differing": params.n_differing,
            "predicted_total_cost": params.predicted_total_cost(args.n),
        }
    )
    for name, fn in (
        ("offspring_distribution", evt.offspring_distribution),
        ("offspring_min_distribution", evt.offspring_min_distribution),
    ):
        spec = fn(params, args.m)
        lines.append({"predictor": name, "mean": spec.mean, "variance": spec.variance})
    lines.append(
        {
            "predictor": "predicted_offspring_variance",
            "n_differing": args.n // 2,
            "value": evt.predicted_offspring_variance(
                args.n, args.n // 2, polycost.uniform_order_variance(args.n, args.k)
            ),
        }
    )
    if args.mixture_mean is not None:
        prediction = evt.mixture_prediction(args.mixture_mean, args.m)
        lines.append(
            {
                "predictor": "mixture_prediction",
                "offspring_mean": prediction.offspring_mean,
                "offspring_variance": prediction.offspring_variance,
                "min_estimate": prediction.min_estimate,
            }
        )
    for line in lines:
        _emit(line)
    return 0


def _experiment_config(args) -> ExperimentConfig:
    if args.config is not None:
        config = load_config(args.config)
    elif args.defaults == "fig3":
        config = fig3_defaults()
    else:
        config = ExperimentConfig()
    if args.seed is not None:
        from dataclasses import replace

        config = replace(config, master_seed=args.seed)
    return config


def _cmd_fig2(args) -> int:
    rows, path = run_fig2(_experiment_config(args), args.out, args.threads)
    _emit({"rows": len(rows), "path": path})
    return 0


def _cmd_fig3(args) -> int:
    rows, path = run_fig3(_experiment_config(args), args.out, args.threads)
    _emit({"rows": len(rows), "path": path})
    return 0


def _cmd_plot(args) -> int:
    emit_plot(read_rows(args.table), args.kind, args.out)
    _emit({"path": args.out})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crossearch",
        description="Random multilinear cost functions, extreme-value "
        "predictions, and crossover search experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="sample an instance and save it")
    gen.add_argument("--n", type=int, required=True, help="number of variables")
    gen.add_argument("--k", type=int, required=True, help="highest term order")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output file (.npz)")
    gen.set_defaults(func=_cmd_gen)

    ev = sub.add_parser("eval", help="evaluate a saved instance at one state")
    ev.add_argument("--cost", required=True, help="instance file from gen")
    ev.add_argument("--state", help="entries of +-1 (default: read stdin)")
    ev.set_defaults(func=_cmd_eval)

    srch = sub.add_parser("search", help="run one search algorithm")
    srch.add_argument(
        "algorithm", choices=("random", "descent", "crossover", "mean_field")
    )
    srch.add_argument("--cost", help="instance file from gen")
    srch.add_argument("--n", type=int, help="sample an instance instead")
    srch.add_argument("--k", type=int)
    srch.add_argument("--instance-seed", type=int, default=0)
    srch.add_argument("--seed", type=int, default=0, help="search stream seed")
    srch.add_argument("--samples", type=int, default=1_000_000)
    srch.add_argument("--restarts", type=int, default=1000)
    srch.add_argument("--pool", type=int, default=1000)
    srch.add_argument("--offspring-pool", type=int, default=1000)
    srch.add_argument("--repeats", type=int, default=333)
    srch.add_argument("--n-parents", type=int, default=4)
    srch.set_defaults(func=_cmd_search)

    theory = sub.add_parser("theory", help="print predictor values as JSON lines")
    theory.add_argument("--n", type=int, required=True)
    theory.add_argument("--k", type=int, default=2)
    theory.add_argument("--m", type=int, default=1000, help="draws per stage")
    theory.add_argument("--target", type=float, help="also invert for this value")
    theory.add_argument(
        "--mixture-mean", type=float, help="also predict for this mixture mean"
    )
    theory.set_defaults(func=_cmd_theory)

    for name, fn in (("fig2", _cmd_fig2), ("fig3", _cmd_fig3)):
        cmd = sub.add_parser(name, help=f"run the {name} experiment grid")
        cmd.add_argument("--config", help="flat key = value file")
        cmd.add_argument("--seed", type=int, help="override master_seed")
        cmd.add_argument("--out", default=".", help="output directory")
        cmd.add_argument("--threads", type=int, default=1)
        cmd.set_defaults(func=fn, defaults=name)

    plot = sub.add_parser("plot", help="render an experiment table to SVG")
    plot.add_argument("--table", required=True, help="CSV from fig2/fig3")
    plot.add_argument("--kind", choices=("fig2", "fig3"), required=True)
    plot.add_argument("--out", required=True, help="output file (.svg)")
    plot.set_defaults(func=_cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as err:
        return int(err.code or 0)
    except evt.NumericDomainError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
