"""Embedding matrices: one vector per paper id, dense or sparse rows.

File format: a header line ``dim=<d>`` (with ``format=sparse`` appended for
sparse matrices), then one line per paper. Dense rows are
``<id>\\t<v1> <v2> ... <vd>``; sparse rows are ``<id>\\t<index>:<value> ...``
with ascending indices. Values are written with ``repr`` so that
write -> read -> write round-trips byte-identically.
"""

from __future__ import annotations

import numpy as np

_NORM_EPS = 1e-12


class EmbeddingFormatError(ValueError):
    """Raised for malformed or inconsistent embedding files."""


class EmbeddingMatrix:
    """Mapping from paper id to a fixed-dimension real vector.

    Rows are stored either as one dense ndarray or as per-row index->value
    dicts. Zero rows are rejected everywhere: cosine distance against them
    is undefined.
    """

    def __init__(self, method: str, dim: int, ids: list[str],
                 dense: np.ndarray | None = None,
                 sparse_rows: list[dict[int, float]] | None = None):
        if (dense is None) == (sparse_rows is None):
            raise ValueError("exactly one of dense / sparse_rows required")
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate ids in embedding matrix")
        self.method = method
        self.dim = int(dim)
        self.ids = list(ids)
        self._index = {pid: i for i, pid in enumerate(self.ids)}
        self._dense = dense
        self._sparse = sparse_rows
        if dense is not None:
            if dense.shape != (len(ids), dim):
                raise ValueError(f"dense shape {dense.shape} does not match "
                                 f"({len(ids)}, {dim})")

    @property
    def is_sparse(self) -> bool:
        return self._sparse is not None

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, pid: str) -> bool:
        return pid in self._index

    def covers(self, ids) -> bool:
        return all(pid in self._index for pid in ids)

    def missing(self, ids) -> list[str]:
        return [pid for pid in ids if pid not in self._index]

    def vector(self, pid: str) -> np.ndarray:
        i = self._index[pid]
        if self._dense is not None:
            return self._dense[i]
        row = np.zeros(self.dim)
        for j, v in self._sparse[i].items():
            row[j] = v
        return row

    def take(self, ids: list[str]) -> np.ndarray:
        """Dense (len(ids), dim) array of the requested rows, in order."""
        if self._dense is not None:
            rows = [self._index[pid] for pid in ids]
            return self._dense[rows]
        return np.stack([self.vector(pid) for pid in ids])

    def sparse_row(self, pid: str) -> dict[int, float]:
        if self._sparse is None:
            raise ValueError("matrix is dense")
        return self._sparse[self._index[pid]]

    def densified(self) -> "EmbeddingMatrix":
        """Dense copy (no-op for already-dense matrices)."""
        if self._dense is not None:
            return self
        return EmbeddingMatrix(self.method, self.dim, self.ids,
                               dense=self.take(self.ids))

    def l2_normalized(self) -> "EmbeddingMatrix":
        if self._dense is None:
            raise ValueError("normalize sparse rows at construction time")
        norms = np.linalg.norm(self._dense, axis=1, keepdims=True)
        return EmbeddingMatrix(self.method, self.dim, self.ids,
                               dense=self._dense / np.maximum(norms, _NORM_EPS))


def _format_value(v: float) -> str:
    return repr(float(v))


def save_embedding_matrix(matrix: EmbeddingMatrix, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if matrix.is_sparse:
            fh.write(f"dim={matrix.dim} format=sparse\n")
            for pid in matrix.ids:
                row = matrix.sparse_row(pid)
                cells = " ".join(f"{j}:{_format_value(v)}"
                                 for j, v in sorted(row.items()))
                fh.write(f"{pid}\t{cells}\n")
        else:
            fh.write(f"dim={matrix.dim}\n")
            for pid in matrix.ids:
                vec = matrix.vector(pid)
                fh.write(pid + "\t" + " ".join(_format_value(v) for v in vec) + "\n")


def _parse_header(line: str) -> tuple[int, bool]:
    tokens = line.split()
    if not tokens or not tokens[0].startswith("dim="):
        raise EmbeddingFormatError("header must start with dim=<d>")
    try:
        dim = int(tokens[0][4:])
    except ValueError:
        raise EmbeddingFormatError(f"bad dimension in header: {line!r}") from None
    if dim <= 0:
        raise EmbeddingFormatError(f"dimension must be positive, got {dim}")
    sparse = False
    for tok in tokens[1:]:
        if tok == "format=sparse":
            sparse = True
        elif tok == "format=dense":
            pass
        else:
            raise EmbeddingFormatError(f"unknown header token {tok!r}")
    return dim, sparse


def load_embedding_matrix(path: str, corpus=None,
                          method: str = "external") -> EmbeddingMatrix:
    """Read an embedding file; with ``corpus`` given, ids must all resolve.

    Rejects rows whose length disagrees with the declared dimension and rows
    with no nonzero entry.
    """
    ids: list[str] = []
    seen: set[str] = set()
    dense_rows: list[np.ndarray] = []
    sparse_rows: list[dict[int, float]] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header:
            raise EmbeddingFormatError("empty embedding file")
        dim, is_sparse = _parse_header(header.strip())
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            pid, sep, payload = line.partition("\t")
            if not sep:
                raise EmbeddingFormatError(f"line {lineno}: missing id/vector separator")
            if pid in seen:
                raise EmbeddingFormatError(f"line {lineno}: duplicate id {pid!r}")
            if corpus is not None and pid not in corpus.papers:
                raise EmbeddingFormatError(
                    f"line {lineno}: id {pid!r} not present in corpus")
            seen.add(pid)
            ids.append(pid)
            if is_sparse:
                row: dict[int, float] = {}
                for cell in payload.split():
                    idx_s, sep2, val_s = cell.partition(":")
                    if not sep2:
                        raise EmbeddingFormatError(
                            f"line {lineno}: bad sparse cell {cell!r}")
                    try:
                        j, v = int(idx_s), float(val_s)
                    except ValueError:
                        raise EmbeddingFormatError(
                            f"line {lineno}: bad sparse cell {cell!r}") from None
                    if not 0 <= j < dim:
                        raise EmbeddingFormatError(
                            f"line {lineno}: index {j} outside dimension {dim}")
                    row[j] = v
                if not any(v != 0.0 for v in row.values()):
                    raise EmbeddingFormatError(
                        f"zero row for id {pid!r} (line {lineno})")
                sparse_rows.append(row)
            else:
                parts = payload.split()
                if len(parts) != dim:
                    raise EmbeddingFormatError(
                        f"line {lineno}: expected {dim} values, found {len(parts)}")
                try:
                    vec = np.array([float(x) for x in parts])
                except ValueError:
                    raise EmbeddingFormatError(
                        f"line {lineno}: non-numeric value") from None
                if not np.any(vec != 0.0):
                    raise EmbeddingFormatError(
                        f"zero row for id {pid!r} (line {lineno})")
                dense_rows.append(vec)
    if is_sparse:
        return EmbeddingMatrix(method, dim, ids, sparse_rows=sparse_rows)
    if not dense_rows:
        raise EmbeddingFormatError("embedding file has no rows")
    return EmbeddingMatrix(method, dim, ids, dense=np.stack(dense_rows))
