"""citerec: offline evaluation of research-paper recommenders.

Builds temporal citation snapshots, derives co-citation relevance ground
truth, trains paper embeddings (TF-IDF, DeepWalk, GraphSAGE-mean, and a
community-split aggregation GNN) plus an MLP pairwise scorer, and reports
relevance together with recommendation novelty and diversity measured in
graph and content embedding spaces.
"""

__version__ = "0.1.0"

from .corpus import (CoCitation, CoCitationIndex, Corpus, CorpusError,
                     GraphSnapshot, Paper, extract_cocitations, load_corpus,
                     load_embedding_matrix, relevant_set, save_corpus,
                     snapshot)
from .matrix import EmbeddingMatrix, EmbeddingFormatError, save_embedding_matrix
from .graphcore import (NeighborPartition, neighborhood_components, neighbors,
                        sample_neighbors, shortest_path_length)
from .synthgen import SynthConfig, generate_corpus

__all__ = [
    "CoCitation", "CoCitationIndex", "Corpus", "CorpusError", "GraphSnapshot",
    "Paper", "extract_cocitations", "load_corpus", "load_embedding_matrix",
    "relevant_set", "save_corpus", "snapshot",
    "EmbeddingMatrix", "EmbeddingFormatError", "save_embedding_matrix",
    "NeighborPartition", "neighborhood_components", "neighbors",
    "sample_neighbors", "shortest_path_length",
    "SynthConfig", "generate_corpus",
    "__version__",
]
