"""Run the synthetic two-architecture comparison at desk scale.

Generates a 4-block bridged citation corpus, runs the sage-mean and
combsage pipelines end to end for one or more global seeds, and prints
precision@10 and the graph-perspective novelty of the relevant subset for
each, mirroring the acceptance comparison. Use --seeds to sweep.

    python scripts/desk_scale_analogue.py --seeds 0,1,2,3,4 --out /tmp/desk
"""

import argparse
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from citerec.experiment import config_from_mapping, run_experiment  # noqa: E402


def desk_mapping(corpus_path: str, out_dir: str, seed: int) -> dict[str, str]:
    return {
        "corpus.path": corpus_path,
        "run.out": out_dir,
        "run.seed": str(seed),
        "run.methods": "sage-mean,combsage",
        "years.embed_cutoff": "2016",
        "years.scorer_cutoff": "2017",
        "years.query": "2017",
        "years.relevance_start": "2017",
        "eval.k": "10,20,30",
        "eval.bootstrap": "1000",
        "graphref.dim": "64",
        "graphref.walks": "5",
        "graphref.length": "16",
        "graphref.window": "3",
        "graphref.epochs": "3",
        "embed.method.sage-mean.dim": "64",
        "embed.method.sage-mean.samples": "10,5",
        "embed.method.sage-mean.epochs": "6",
        "embed.method.sage-mean.batch": "1024",
        "embed.method.sage-mean.feature_vocab_cap": "400",
        "embed.method.combsage.dim": "64",
        "embed.method.combsage.samples": "10,5",
        "embed.method.combsage.epochs": "6",
        "embed.method.combsage.batch": "1024",
        "embed.method.combsage.feature_vocab_cap": "400",
        "scorer.hidden": "64",
        "scorer.epochs": "6",
        "scorer.batch": "2048",
        "scorer.lr": "0.002",
    }


def synth_config(seed: int):
    # p_intra/p_inter at 100:1 keeps cross-block citations meaningful
    # (bridge papers cite their partner block at the intra rate) instead of
    # uniform noise, which singleton components would otherwise amplify
    from citerec.synthgen import SynthConfig
    return SynthConfig(blocks=4, papers_per_block_per_year=50,
                       year_start=2010, year_end=2019,
                       p_intra=0.05, p_inter=0.0005,
                       bridge_fraction=0.1, references_per_paper=15.0,
                       vocab_per_block=80, vocab_overlap=0.2,
                       seed=seed)


def run_one(seed: int, out_root: str):
    from citerec.corpus import save_corpus
    from citerec.synthgen import generate_corpus, write_truth

    out_dir = os.path.join(out_root, f"seed{seed}")
    os.makedirs(out_dir, exist_ok=True)
    corpus_path = os.path.join(out_dir, "corpus.jsonl")
    t0 = time.time()
    corpus, truth = generate_corpus(synth_config(seed))
    save_corpus(corpus, corpus_path)
    write_truth(truth, corpus_path + ".truth")
    cfg = config_from_mapping(desk_mapping(corpus_path, out_dir, seed))
    report = run_experiment(cfg)
    elapsed = time.time() - t0

    rows = {}
    for m in report.methods:
        agg = m.aggregates
        rows[m.method] = {
            "p@10": agg["precision@10"],
            "novelty": agg["rel_novelty_graph@10"],
        }
    return rows, elapsed


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", default="0")
    ap.add_argument("--out", default="/tmp/citerec-desk")
    args = ap.parse_args()
    seeds = [int(s) for s in args.seeds.split(",")]
    wins_a = wins_b = 0
    for seed in seeds:
        rows, elapsed = run_one(seed, args.out)
        sage, comb = rows["sage-mean"], rows["combsage"]
        band = 2.0 * ((sage["p@10"].bootstrap_std or 0) ** 2
                      + (comb["p@10"].bootstrap_std or 0) ** 2) ** 0.5
        ok_a = comb["p@10"].mean >= sage["p@10"].mean - band
        ok_b = (comb["novelty"].mean or 0) > (sage["novelty"].mean or 0)
        wins_a += ok_a
        wins_b += ok_b
        print(f"seed {seed}: {elapsed:6.1f}s  "
              f"p@10 sage={sage['p@10'].mean:.4f}"
              f" comb={comb['p@10'].mean:.4f} band={band:.4f} ok={ok_a}  "
              f"rel_nov_graph@10 sage={sage['novelty'].mean:.4f}"
              f" comb={comb['novelty'].mean:.4f} ok={ok_b}")
    print(f"precision criterion: {wins_a}/{len(seeds)}; "
          f"novelty criterion: {wins_b}/{len(seeds)}")


if __name__ == "__main__":
    main()
