"""Command-line entry points.

Subcommands run pipeline stages against on-disk artifacts under the
configured output directory; ``run`` executes the whole experiment. Exit
codes: 0 success, 2 configuration error, 3 data error, 4 stage failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .corpus import CorpusError, load_corpus, save_corpus
from .experiment import (ConfigError, DataError, ExperimentConfig, StageError,
                         apply_overrides, config_from_mapping,
                         parse_config_file, run_experiment, stage_embed,
                         stage_evaluate, stage_recommend, stage_report,
                         stage_train_scorer, _params_as)
from .matrix import EmbeddingFormatError
from .synthgen import SynthConfig, generate_corpus, write_truth

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_STAGE = 4

log = logging.getLogger("citerec.cli")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citerec",
        description="Offline evaluation of research-paper recommenders")
    parser.add_argument("--verbose", "-v", action="store_true",
                        help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True,
                           help="flat key=value configuration file")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config entry")
        p.add_argument("--seed", type=int, default=None,
                       help="override run.seed")
        p.add_argument("--out", default=None, help="override run.out")
        p.add_argument("--workers", type=int, default=None,
                       help="override run.workers")

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    common(p)

    p = sub.add_parser("ingest-check",
                       help="validate a corpus file and print counts")
    p.add_argument("--corpus", required=True)

    for name, helptext in (("embed", "train one embedding method"),
                           ("train-scorer", "train the MLP scorer"),
                           ("recommend", "rank candidates for all queries"),
                           ("evaluate", "compute per-query metrics")):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("--method", required=True)

    p = sub.add_parser("report", help="merge per-query metrics into a report")
    common(p)
    p.add_argument("--methods", default=None,
                   help="comma list (default: run.methods)")

    p = sub.add_parser("run", help="run the full experiment")
    common(p)
    return parser


def _load_config(args) -> ExperimentConfig:
    mapping = parse_config_file(args.config)
    mapping = apply_overrides(mapping, args.overrides)
    if args.seed is not None:
        mapping["run.seed"] = str(args.seed)
    if args.out is not None:
        mapping["run.out"] = args.out
    if args.workers is not None:
        mapping["run.workers"] = str(args.workers)
    return config_from_mapping(mapping)


def _cmd_synth(args) -> int:
    mapping = parse_config_file(args.config)
    mapping = apply_overrides(mapping, args.overrides)
    if args.seed is not None:
        mapping["synth.seed"] = str(args.seed)
    params = {k.split(".", 1)[1]: v for k, v in mapping.items()
              if k.startswith("synth.")}
    out_path = params.pop("out", mapping.get("corpus.path"))
    if not out_path:
        raise ConfigError("synth needs synth.out or corpus.path")
    cfg = _params_as(SynthConfig, params)
    corpus, truth = generate_corpus(cfg)
    os.makedirs(os.path.dirname(os.path.abspath(out_path)), exist_ok=True)
    save_corpus(corpus, out_path)
    write_truth(truth, out_path + ".truth")
    print(f"wrote {len(corpus)} papers to {out_path} "
          f"(+ ground truth sidecar {out_path}.truth)")
    return EXIT_OK


def _plural(n: int, word: str) -> str:
    return f"{n} {word}" + ("" if n == 1 else "s")


def _cmd_ingest_check(args) -> int:
    corpus = load_corpus(args.corpus)
    s = corpus.stats
    print(f"{_plural(len(corpus), 'paper')}, "
          f"{_plural(len(corpus.citation_edges), 'edge')}, "
          f"{s.dangling_references} dangling, "
          f"{_plural(s.year_anomaly_edges, 'year-anomaly edge')}, "
          f"{_plural(s.self_citations_dropped, 'self-citation')} dropped")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command == "ingest-check":
            return _cmd_ingest_check(args)
        cfg = _load_config(args)
        if args.command == "run":
            run_experiment(cfg)
            print(os.path.join(cfg.out_dir, "report.txt"))
            return EXIT_OK
        if args.command == "embed":
            print(stage_embed(cfg, args.method))
            return EXIT_OK
        if args.command == "train-scorer":
            print(stage_train_scorer(cfg, args.method))
            return EXIT_OK
        if args.command == "recommend":
            print(stage_recommend(cfg, args.method))
            return EXIT_OK
        if args.command == "evaluate":
            print(stage_evaluate(cfg, args.method))
            return EXIT_OK
        if args.command == "report":
            methods = (tuple(m.strip() for m in args.methods.split(","))
                       if args.methods else None)
            print(stage_report(cfg, methods))
            return EXIT_OK
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, CorpusError, EmbeddingFormatError,
            FileNotFoundError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except StageError as e:
        print(f"{e}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    sys.exit(main())
