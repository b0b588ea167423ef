"""Command-line entry point.

One JSON config drives everything; flags override config fields. `run`
executes every stage; the per-stage subcommands re-run one stage against an
existing output directory. Exit codes: 0 success, 1 internal error, 2
usage or configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigError, MissingFile, MissingUpstream, TrendlabError
from .fixture import generate_fixture
from .pipeline import STAGES, load_config, run_pipeline


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esg-trendlab",
        description="ESG report corpus analytics: topic weights, two strategic axes, "
        "2x2 zones, rankings, trends and a regression report.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_pipeline_command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="pipeline config JSON")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="override the output directory")
        p.add_argument(
            "--svg",
            action="store_const",
            const=True,
            default=None,
            help="also render per-year strategic scatter SVGs",
        )
        p.add_argument(
            "--quantile-heatmaps",
            action="store_const",
            const=True,
            default=None,
            help="also export quantile-scaled score heatmap JSON",
        )
        p.add_argument("--threshold-mode", choices=("median", "zero"), default=None)
        p.add_argument("--years", default=None, help="inclusive year filter, e.g. 2017..2020")
        return p

    add_pipeline_command("run", "execute every stage and write the run manifest")
    stage_help = {
        "ingest": "tokenize the corpus and cache it",
        "score": "topic weight matrices per year",
        "represent": "within-industry representativeness per topic",
        "distinguish": "cross-sector forest importance per topic",
        "model": "strategic coordinates, zones, trends, E/S/G triples",
        "regress": "pooled regression report across company-years",
        "rank": "within-class and across-class rankings",
    }
    for name, _ in STAGES:
        if name in stage_help:
            add_pipeline_command(name, stage_help[name])

    fx = sub.add_parser("fixture", help="generate the synthetic demonstration corpus")
    fx.add_argument("--out", required=True, help="directory to create the corpus in")
    fx.add_argument("--seed", type=int, default=42)
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    return {
        "seed": args.seed,
        "out_dir": args.out,
        "threshold_mode": args.threshold_mode,
        "quantile_heatmaps": args.quantile_heatmaps,
        "years": args.years,
        "svg": args.svg,
    }


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    command = args.command
    try:
        if command == "fixture":
            out = generate_fixture(Path(args.out), seed=args.seed)
            print(f"fixture written to {out}")
            return 0
        cfg = load_config(args.config, _overrides(args))
        if command == "run":
            manifest = run_pipeline(cfg)
            for stage in manifest["stages"]:
                print(f"{stage['name']}: {len(stage['outputs'])} files")
            print(f"run manifest: {cfg.out_dir / 'run_manifest.json'}")
            return 0
        stage_fn = dict(STAGES)[command]
        outputs = stage_fn(cfg)
        for name in outputs:
            print(cfg.out_dir / name)
        return 0
    except (ConfigError, MissingFile, MissingUpstream) as exc:
        print(f"esg-trendlab {command}: {exc}", file=sys.stderr)
        return 2
    except TrendlabError as exc:
        print(f"esg-trendlab {command}: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - defensive catch-all
        print(f"esg-trendlab {command}: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
