import numpy as np
import pytest

from citerec.matrix import (EmbeddingFormatError, EmbeddingMatrix,
                            load_embedding_matrix, save_embedding_matrix)

from conftest import make_corpus


def test_dense_roundtrip(tmp_path):
    m = EmbeddingMatrix("m", 3, ["A", "B"],
                        dense=np.array([[1.0, 2.0, 3.0], [0.1, 0.2, 0.3]]))
    path = tmp_path / "e.emb"
    save_embedding_matrix(m, str(path))
    again = load_embedding_matrix(str(path))
    assert again.dim == 3
    assert again.ids == ["A", "B"]
    assert np.array_equal(again.take(["A", "B"]), m.take(["A", "B"]))
    # byte-identical second write
    p2 = tmp_path / "e2.emb"
    save_embedding_matrix(again, str(p2))
    assert path.read_bytes() == p2.read_bytes()


def test_sparse_roundtrip(tmp_path):
    m = EmbeddingMatrix("m", 5, ["A", "B"],
                        sparse_rows=[{0: 1.5, 3: -2.0}, {4: 0.25}])
    path = tmp_path / "e.emb"
    save_embedding_matrix(m, str(path))
    header = path.read_text().splitlines()[0]
    assert header == "dim=5 format=sparse"
    again = load_embedding_matrix(str(path))
    assert again.is_sparse
    assert np.array_equal(again.vector("A"), np.array([1.5, 0, 0, -2.0, 0]))


def test_zero_row_rejected(tmp_path):
    path = tmp_path / "e.emb"
    path.write_text("dim=2\nA\t0.0 0.0\n")
    with pytest.raises(EmbeddingFormatError, match="zero row.*'A'"):
        load_embedding_matrix(str(path))


def test_dim_mismatch_rejected(tmp_path):
    path = tmp_path / "e.emb"
    path.write_text("dim=3\nA\t1.0 2.0 3.0\nB\t1.0 2.0\n")
    with pytest.raises(EmbeddingFormatError, match="expected 3 values"):
        load_embedding_matrix(str(path))


def test_unknown_id_strict(tmp_path):
    corpus = make_corpus([("A", 2000, [])])
    path = tmp_path / "e.emb"
    path.write_text("dim=1\nA\t1.0\nZ\t2.0\n")
    with pytest.raises(EmbeddingFormatError, match="'Z' not present"):
        load_embedding_matrix(str(path), corpus=corpus)
    # without a corpus the same file loads fine
    assert len(load_embedding_matrix(str(path))) == 2


def test_duplicate_id_rejected(tmp_path):
    path = tmp_path / "e.emb"
    path.write_text("dim=1\nA\t1.0\nA\t2.0\n")
    with pytest.raises(EmbeddingFormatError, match="duplicate id"):
        load_embedding_matrix(str(path))


def test_bad_header(tmp_path):
    path = tmp_path / "e.emb"
    path.write_text("dimension 3\nA\t1 2 3\n")
    with pytest.raises(EmbeddingFormatError):
        load_embedding_matrix(str(path))


def test_take_order_and_covers():
    m = EmbeddingMatrix("m", 2, ["A", "B", "C"],
                        dense=np.array([[1.0, 0], [2.0, 0], [3.0, 0]]))
    assert m.covers(["C", "A"])
    assert not m.covers(["A", "Z"])
    assert m.missing(["A", "Z"]) == ["Z"]
    taken = m.take(["C", "A"])
    assert taken[0, 0] == 3.0 and taken[1, 0] == 1.0
