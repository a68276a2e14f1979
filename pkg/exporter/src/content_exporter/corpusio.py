"""Reader for the line-delimited corpus format (one JSON record per line
with id, title, abstract, year, references)."""

from __future__ import annotations

import json
from dataclasses import dataclass


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    title: str
    abstract: str


def read_corpus_records(path: str) -> list[CorpusRecord]:
    records = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}:{lineno}: malformed record ({e.msg})")
            for name in ("id", "title", "abstract"):
                if name not in rec:
                    raise ValueError(f"{path}:{lineno}: missing field {name!r}")
            if rec["id"] in seen:
                raise ValueError(f"{path}:{lineno}: duplicate id {rec['id']!r}")
            seen.add(rec["id"])
            records.append(CorpusRecord(rec["id"], rec["title"], rec["abstract"]))
    if not records:
        raise ValueError(f"{path}: corpus file has no records")
    return records
