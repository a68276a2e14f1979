"""Paper embedding methods: TF-IDF, DeepWalk, and the two GNN variants."""

from .tfidf import TfidfModel, tfidf_embed, tokenize
from .deepwalk import (DeepWalkConfig, DeepWalkModel, deepwalk_embed,
                       deepwalk_fold_in, random_walks, train_deepwalk)
from .gnn import (GnnConfig, GnnModel, GnnTrainConfig, combsage_aggregate,
                  gnn_infer, gnn_train, load_gnn, sage_aggregate, save_gnn)

__all__ = [
    "TfidfModel", "tfidf_embed", "tokenize",
    "DeepWalkConfig", "DeepWalkModel", "deepwalk_embed", "deepwalk_fold_in",
    "random_walks", "train_deepwalk",
    "GnnConfig", "GnnModel", "GnnTrainConfig", "combsage_aggregate",
    "gnn_infer", "gnn_train", "load_gnn", "sage_aggregate", "save_gnn",
]
