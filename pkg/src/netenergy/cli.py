"""Command line interface.

Exit codes: 0 success, 1 invalid input or usage, 2 numerical failure.
Node ids on the command line and in output are 1-based.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import __version__, io
from .centrality import STRATEGIES, compute_centralities, rank_nodes, select_drivers
from .control import (best_drivers_for_target, lambda_min_upper_bound, metrics,
                      target_min_energy)
from .errors import NumericError, ValidationError
from .gramian import GramianSpec, ctrb_gramian
from .netgraph import Network, network_from_matrix

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _ids(nodes) -> str:
    return " ".join(str(k + 1) for k in nodes)


def _load(path: str) -> Network:
    try:
        return network_from_matrix(io.read_matrix(path))
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror or exc}") from None


def _spec(args, net: Network | None = None) -> GramianSpec:
    kw = {} if args.tol is None else {"lyap_tol": args.tol}
    if args.horizon is not None:
        return GramianSpec.parse(args.horizon, **kw)
    if net is not None and not net.is_stable:
        raise ValidationError(f"spectral radius {net.spectral_radius:.6g} >= 1: "
                              "pass --horizon T for a finite horizon")
    return GramianSpec(**kw)


def cmd_analyze(args) -> None:
    net = _load(args.matrix)
    table = compute_centralities(net, _spec(args, net))
    sys.stdout.write(table.to_csv())
    for crit in ("rank_diff", "rank_quot", "p_only"):
        print(f"# {crit}: {_ids(rank_nodes(table, crit))}")


def cmd_drivers(args) -> None:
    net = _load(args.matrix)
    spec = _spec(args, net)
    if args.m > net.n:
        raise ValidationError(f"--m must lie in 1..{net.n}")
    ds = select_drivers(net, args.strategy, args.m, spec, seed=args.seed)
    print(f"strategy: {ds.strategy}")
    print(f"drivers: {_ids(ds.members)}")
    print(metrics(ctrb_gramian(net, ds.members, spec)).to_json())


def cmd_bound(args) -> None:
    net = _load(args.matrix)
    table = compute_centralities(net, _spec(args, net))
    print(io.fmt(lambda_min_upper_bound(table, args.m)))


def cmd_target(args) -> None:
    net = _load(args.matrix)
    spec = _spec(args, net)
    node = args.node - 1
    if not 0 <= node < net.n:
        raise ValidationError(f"--node must lie in 1..{net.n}")
    ds = best_drivers_for_target(net, node, args.m, spec)
    energy, state = target_min_energy(net, ds.members, spec, node)
    print(f"drivers: {_ids(ds.members)}")
    print(f"energy: {io.fmt(energy)}")
    print("optimal_state: " + " ".join(io.fmt(v) for v in state))


def cmd_experiment(args) -> None:
    from .experiment import emit_csv, load_config, run_experiment

    cfg = load_config(args.config)
    if args.horizon is not None or args.tol is not None:
        spec = cfg.spec
        horizon = args.horizon if args.horizon is not None else spec.label()
        tol = args.tol if args.tol is not None else spec.lyap_tol
        cfg = replace(cfg, spec=GramianSpec.parse(horizon, lyap_tol=tol,
                                                  lyap_max_iter=spec.lyap_max_iter))
    if args.seed is not None:
        cfg = replace(cfg, base_seed=args.seed)
    result = run_experiment(cfg, workers=args.workers)
    for path in emit_csv(result, args.out):
        print(path)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--horizon", help="'inf' (default when stable) or a positive integer T")
    common.add_argument("--tol", type=float, help="Lyapunov solver relative tolerance")
    common.add_argument("--seed", type=int, help="seed for randomised steps")

    parser = _Parser(prog="netenergy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="print centralities and rankings")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("drivers", parents=[common], help="select drivers and report metrics")
    p.add_argument("matrix")
    p.add_argument("--strategy", choices=STRATEGIES, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_drivers)

    p = sub.add_parser("bound", parents=[common], help="upper bound on lambda_min for m drivers")
    p.add_argument("matrix")
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("target", parents=[common], help="best drivers for one target node")
    p.add_argument("matrix")
    p.add_argument("--node", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_target)

    p = sub.add_parser("experiment", parents=[common], help="run a sweep from a JSON config")
    p.add_argument("config")
    p.add_argument("--out", default="results")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_experiment)
    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "seed", None) is not None and not 0 <= args.seed < 2**64:
            raise ValidationError("--seed must be a 64-bit unsigned integer")
        args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
