"""Command-line entry point.

Exit codes: 0 on success, 2 when input validation fails, 1 on runtime
errors (missing files, provider failures, malformed payloads).
"""

import argparse
import sys

from .errors import StilusError, ValidationError
from .pipeline import (
    load_config,
    run_attribution,
    run_clustering,
    run_embed,
    run_network,
    run_preprocess,
    with_overrides,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stilus",
        description="Embed labeled corpora, cluster them by author, and rank attribution candidates.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH", help="JSON run configuration")
    common.add_argument("--seed", type=int, default=None, help="override the config seed")
    common.add_argument("--out", default=None, metavar="DIR", help="override the output directory")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("cluster", parents=[common], help="fit k-means and score author agreement")
    sub.add_parser("network", parents=[common], help="export the author similarity network")
    attribute = sub.add_parser("attribute", parents=[common], help="rank candidate authors for a query")
    attribute.add_argument("--query", required=True, metavar="AUTHOR", help="author name to attribute")
    sub.add_parser("embed", parents=[common], help="write embeddings and labels only")
    sub.add_parser("preprocess", parents=[common], help="write cleaned units only")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = with_overrides(load_config(args.config), seed=args.seed, out=args.out)
        if args.command == "cluster":
            report, fit, paths = run_clustering(config)
            print(
                f"accuracy {report.accuracy:.4f} over {len(fit.assignments)} units "
                f"in {fit.iterations} iterations; artifacts in {config.out}"
            )
        elif args.command == "network":
            graph, paths = run_network(config)
            print(
                f"network over {len(graph.nodes)} authors: {len(graph.edges)} edges "
                f"at threshold {config.threshold}; artifacts in {config.out}"
            )
        elif args.command == "attribute":
            payload = run_attribution(config, args.query)
            top = payload["ranking"][0] if payload["ranking"] else None
            lead = f"top candidate {top['author']} ({top['similarity']:.4f})" if top else "no candidates"
            print(f"attribution for {args.query}: {lead}; report in {config.out}")
        elif args.command == "embed":
            run_embed(config)
            print(f"embeddings written to {config.out}")
        else:
            run_preprocess(config)
            print(f"cleaned units written to {config.out}")
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StilusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
