"""Deterministic block-structured citation corpora for desk-scale runs.

Papers arrive year by year in a fixed number of disciplinary blocks and
cite strictly earlier papers, preferring their own block. A configurable
fraction of papers are bridges: each picks one partner block, cites it as
eagerly as its own, and mixes the two blocks' vocabularies in its text.
Ground-truth block/bridge labels travel in a sidecar file only; the corpus
itself carries nothing that identifies the planted structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, Paper


@dataclass(frozen=True)
class SynthConfig:
    blocks: int = 4
    papers_per_block_per_year: int = 50
    year_start: int = 2010
    year_end: int = 2019
    p_intra: float = 0.08
    p_inter: float = 0.004
    bridge_fraction: float = 0.1
    references_per_paper: float = 15.0
    vocab_per_block: int = 80
    vocab_overlap: float = 0.2
    title_tokens: int = 8
    abstract_tokens: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.blocks < 1 or self.papers_per_block_per_year < 1:
            raise ValueError("need at least one block and one paper per year")
        if self.year_end < self.year_start:
            raise ValueError("empty year range")
        for name in ("p_intra", "p_inter", "bridge_fraction", "vocab_overlap"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be within [0, 1]")
        if self.references_per_paper <= 0:
            raise ValueError("references_per_paper must be positive")


def _block_vocabularies(cfg: SynthConfig) -> list[list[str]]:
    shared_n = int(round(cfg.vocab_overlap * cfg.vocab_per_block))
    shared = [f"common{i:03d}" for i in range(shared_n)]
    pools = []
    for b in range(cfg.blocks):
        own = [f"field{b}term{i:03d}"
               for i in range(cfg.vocab_per_block - shared_n)]
        pools.append(own + shared)
    return pools


def generate_corpus(cfg: SynthConfig) -> tuple[Corpus, dict[str, tuple[int, bool]]]:
    """Returns (corpus, truth) where truth maps id -> (block, is_bridge).

    Deterministic given the config: the same seed reproduces the corpus
    byte for byte. Citations are Bernoulli draws per earlier paper, scaled
    so the expected reference count tracks ``references_per_paper``.
    """
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    pools = _block_vocabularies(cfg)
    years = range(cfg.year_start, cfg.year_end + 1)

    ids: list[str] = []
    blocks_arr = np.empty(0, dtype=np.int64)
    papers: list[Paper] = []
    truth: dict[str, tuple[int, bool]] = {}

    for year in years:
        earlier_blocks = blocks_arr  # papers from strictly earlier years
        n_earlier = len(earlier_blocks)
        year_rows = []  # (block, is_bridge, refs, title, abstract)
        for block in range(cfg.blocks):
            for _ in range(cfg.papers_per_block_per_year):
                is_bridge = bool(rng.random() < cfg.bridge_fraction)
                partner = -1
                if is_bridge and cfg.blocks > 1:
                    others = [b for b in range(cfg.blocks) if b != block]
                    partner = others[int(rng.integers(0, len(others)))]
                refs: list[str] = []
                if n_earlier > 0:
                    base = np.where(earlier_blocks == block,
                                    cfg.p_intra, cfg.p_inter)
                    if partner >= 0:
                        base = np.where(earlier_blocks == partner,
                                        cfg.p_intra, base)
                    expected = base.sum()
                    if expected > 0:
                        scale = min(cfg.references_per_paper / expected, 1.0 /
                                    max(base.max(), 1e-12))
                        prob = base * scale
                        hits = rng.random(n_earlier) < prob
                        refs = [ids[j] for j in np.flatnonzero(hits)]
                if is_bridge and partner >= 0:
                    text_pool = pools[block] + pools[partner]
                else:
                    text_pool = pools[block]
                title = " ".join(text_pool[int(j)] for j in
                                 rng.integers(0, len(text_pool),
                                              size=cfg.title_tokens))
                abstract = " ".join(text_pool[int(j)] for j in
                                    rng.integers(0, len(text_pool),
                                                 size=cfg.abstract_tokens))
                year_rows.append((block, is_bridge, refs, title, abstract))
        # neutral ids in shuffled order so nothing about a paper's id or
        # position in the file encodes its block
        perm = rng.permutation(len(year_rows))
        year_blocks = []
        for pos, src in enumerate(perm):
            block, is_bridge, refs, title, abstract = year_rows[src]
            pid = f"y{year}p{pos:04d}"
            papers.append(Paper(pid, title, abstract, year, tuple(refs)))
            truth[pid] = (block, is_bridge)
            ids.append(pid)
            year_blocks.append(block)
        blocks_arr = np.concatenate(
            [blocks_arr, np.array(year_blocks, dtype=np.int64)])
    if not papers:
        raise ValueError("configuration yields zero papers")
    return Corpus.from_papers(papers), truth


def write_truth(truth: dict[str, tuple[int, bool]], path: str) -> None:
    """Sidecar: id, block, is_bridge. For test assertions only."""
    with open(path, "w", encoding="utf-8") as fh:
        for pid, (block, is_bridge) in truth.items():
            fh.write(f"{pid}\t{block}\t{int(is_bridge)}\n")


def read_truth(path: str) -> dict[str, tuple[int, bool]]:
    out: dict[str, tuple[int, bool]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            pid, block, bridge = line.rstrip("\n").split("\t")
            out[pid] = (int(block), bool(int(bridge)))
    return out
