"""Minimal end-to-end demo: generate a small two-discipline corpus, build
a synthetic content reference space, run all four embedding methods, and
print the headline report rows.

    python scripts/quickstart_synthetic.py --out /tmp/citerec-quickstart
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import numpy as np  # noqa: E402

from citerec.corpus import save_corpus  # noqa: E402
from citerec.experiment import config_from_mapping, run_experiment  # noqa: E402
from citerec.matrix import EmbeddingMatrix, save_embedding_matrix  # noqa: E402
from citerec.synthgen import SynthConfig, generate_corpus, write_truth  # noqa: E402


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="/tmp/citerec-quickstart")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    corpus, truth = generate_corpus(SynthConfig(
        blocks=2, papers_per_block_per_year=25, year_start=2011,
        year_end=2019, p_intra=0.12, p_inter=0.004, bridge_fraction=0.1,
        references_per_paper=10.0, seed=args.seed))
    corpus_path = os.path.join(args.out, "corpus.jsonl")
    save_corpus(corpus, corpus_path)
    write_truth(truth, corpus_path + ".truth")

    # stand-in content vectors: random but fixed per paper, as an ingested
    # external matrix would be
    rng = np.random.Generator(np.random.PCG64(args.seed))
    ids = sorted(corpus.papers)
    content = EmbeddingMatrix("demo-content", 32, ids,
                              dense=rng.normal(size=(len(ids), 32)))
    content_path = os.path.join(args.out, "content.emb")
    save_embedding_matrix(content, content_path)

    cfg = config_from_mapping({
        "corpus.path": corpus_path,
        "run.out": os.path.join(args.out, "run"),
        "run.seed": str(args.seed),
        "run.methods": "tfidf,deepwalk,sage-mean,combsage",
        "years.embed_cutoff": "2016", "years.scorer_cutoff": "2017",
        "years.query": "2017", "years.relevance_start": "2017",
        "eval.k": "10,20", "eval.bootstrap": "500",
        "content.demo": content_path,
        "eval.content_reference": "demo",
        "graphref.dim": "32", "graphref.walks": "4", "graphref.length": "12",
        "graphref.epochs": "2",
        "embed.method.tfidf.vocab_cap": "300",
        "embed.method.deepwalk.dim": "32",
        "embed.method.deepwalk.walks": "4",
        "embed.method.deepwalk.length": "12",
        "embed.method.deepwalk.epochs": "2",
        "embed.method.sage-mean.dim": "32",
        "embed.method.sage-mean.samples": "8,4",
        "embed.method.sage-mean.epochs": "4",
        "embed.method.sage-mean.feature_vocab_cap": "200",
        "embed.method.combsage.dim": "32",
        "embed.method.combsage.samples": "8,4",
        "embed.method.combsage.epochs": "4",
        "embed.method.combsage.feature_vocab_cap": "200",
        "scorer.hidden": "32", "scorer.epochs": "4",
    })
    report = run_experiment(cfg)
    print(f"report: {os.path.join(args.out, 'run', 'report.txt')}")
    for m in report.methods:
        p10 = m.aggregates["precision@10"]
        nov = m.aggregates["novelty_graph@10"]
        print(f"  {m.method:10s} precision@10 {p10.mean:.3f}"
              f" (std {p10.bootstrap_std:.3f})"
              f"  graph novelty@10 {nov.mean:.3f}")


if __name__ == "__main__":
    main()
