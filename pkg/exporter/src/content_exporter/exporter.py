"""Drive an encoder over a corpus file and emit the embedding file format:
header ``dim=<d>``, then one ``<id>\\t<v1> <v2> ...`` row per paper, in
corpus order, values written with repr for exact round-trips."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .corpusio import read_corpus_records
from .encoders import make_encoder

log = logging.getLogger("content_exporter")


@dataclass
class ExportJob:
    corpus_path: str
    encoder: str
    out_path: str
    batch_size: int = 32
    max_length: int = 512
    warnings: list[str] = field(default_factory=list)


def export_content_vectors(job: ExportJob) -> str:
    """Encode every paper and write the embedding file; returns the path.

    Papers with an empty title and abstract are encoded from their id
    string instead and recorded in ``job.warnings``. Each distinct text is
    encoded exactly once, so byte-identical texts always receive
    byte-identical vectors regardless of batch composition.
    """
    if job.batch_size < 1:
        raise ValueError("batch size must be >= 1")
    records = read_corpus_records(job.corpus_path)
    encoder = make_encoder(job.encoder, job.max_length)

    keyed: list[tuple[str, tuple[str, str]]] = []
    for rec in records:
        title, abstract = rec.title, rec.abstract
        if not title.strip() and not abstract.strip():
            job.warnings.append(
                f"paper {rec.id!r} has no title or abstract; encoded its id")
            title, abstract = rec.id, ""
        keyed.append((rec.id, (title, abstract)))

    unique_texts = list(dict.fromkeys(pair for _, pair in keyed))
    vectors: dict[tuple[str, str], np.ndarray] = {}
    for lo in range(0, len(unique_texts), job.batch_size):
        chunk = unique_texts[lo:lo + job.batch_size]
        encoded = encoder.encode_pairs(chunk)
        for pair, vec in zip(chunk, encoded):
            vectors[pair] = vec

    for pid, pair in keyed:
        if not np.any(vectors[pair] != 0.0):
            # dense summary vectors cannot be all-zero; fall back to the id
            job.warnings.append(
                f"paper {pid!r} encoded to a zero vector; used its id instead")
            fallback = encoder.encode_pairs([(pid, "")])[0]
            vectors[pair] = fallback

    for message in job.warnings:
        log.warning("%s", message)

    with open(job.out_path, "w", encoding="utf-8") as fh:
        fh.write(f"dim={encoder.dim}\n")
        for pid, pair in keyed:
            row = " ".join(repr(float(x)) for x in vectors[pair])
            fh.write(f"{pid}\t{row}\n")
    return job.out_path
