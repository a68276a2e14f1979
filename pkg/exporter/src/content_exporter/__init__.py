"""Standalone content-vector exporter.

Reads a line-delimited corpus file, encodes each paper's concatenated
title and abstract with a pretrained scientific-text encoder (or a
deterministic hashing encoder for offline use), and writes the embedding
file format consumed by the evaluation toolkit. Communicates with the
toolkit through those two file formats only.
"""

__version__ = "0.1.0"

from .exporter import ExportJob, export_content_vectors

__all__ = ["ExportJob", "export_content_vectors", "__version__"]
