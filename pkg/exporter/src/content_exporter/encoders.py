"""Text encoders.

``transformer:<model>`` (or a bare HuggingFace model id) encodes the
title/abstract pair with a pretrained model and takes the final hidden
state of the sequence-summary token; the title is never truncated, the
abstract absorbs any length cut. ``hash:<dim>`` is a deterministic
token-hashing encoder that needs no model files; it exists for offline
pipelines and tests, not for publication-quality vectors.
"""

from __future__ import annotations

import hashlib

import numpy as np

DEFAULT_TRANSFORMER = "allenai/scibert_scivocab_uncased"


class EncoderUnavailable(RuntimeError):
    """The requested encoder cannot be constructed in this environment."""


class HashingEncoder:
    """Sum of per-token pseudo-random unit vectors, L2-normalized.

    Token vectors are seeded from a digest of the token text, so identical
    texts map to identical vectors on every machine and run.
    """

    def __init__(self, dim: int = 256):
        if dim < 8:
            raise ValueError("hash encoder needs dim >= 8")
        self.dim = dim
        self.name = f"hash:{dim}"

    def _token_vector(self, token: str) -> np.ndarray:
        digest = hashlib.sha256(token.encode("utf-8")).digest()
        seed = int.from_bytes(digest[:8], "big")
        rng = np.random.Generator(np.random.PCG64(seed))
        vec = rng.normal(size=self.dim)
        return vec / np.linalg.norm(vec)

    def encode(self, texts: list[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim))
        for i, text in enumerate(texts):
            tokens = text.lower().split()
            if not tokens:
                continue
            acc = np.zeros(self.dim)
            for tok in tokens:
                acc += self._token_vector(tok)
            norm = np.linalg.norm(acc)
            if norm > 0:
                out[i] = acc / norm
        return out

    def encode_pairs(self, pairs: list[tuple[str, str]]) -> np.ndarray:
        return self.encode([f"{a} {b}".strip() for a, b in pairs])


class TransformerEncoder:
    """Pretrained encoder; vectors are the final hidden state of the
    summary ([CLS]) token for the (title, abstract) pair."""

    def __init__(self, model_name: str, max_length: int = 512):
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as e:
            raise EncoderUnavailable(
                f"transformers/torch not installed: {e}") from e
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(model_name)
            self.model = AutoModel.from_pretrained(model_name)
        except Exception as e:
            raise EncoderUnavailable(
                f"cannot load encoder {model_name!r}: {e}") from e
        self.model.eval()
        self._torch = torch
        self.max_length = max_length
        self.dim = int(self.model.config.hidden_size)
        self.name = model_name

    def encode_pairs(self, pairs: list[tuple[str, str]]) -> np.ndarray:
        titles = [a for a, _ in pairs]
        abstracts = [b for _, b in pairs]
        # only_second: the abstract is truncated, the title is kept whole
        batch = self.tokenizer(titles, abstracts, padding=True,
                               truncation="only_second",
                               max_length=self.max_length,
                               return_tensors="pt")
        with self._torch.no_grad():
            out = self.model(**batch)
        return out.last_hidden_state[:, 0, :].numpy().astype(float)


def make_encoder(name: str, max_length: int = 512):
    """``hash:<dim>``, ``transformer:<model>``, ``auto``, or a bare model id."""
    if name.startswith("hash:"):
        return HashingEncoder(int(name.split(":", 1)[1]))
    if name == "hash":
        return HashingEncoder()
    if name == "auto":
        return TransformerEncoder(DEFAULT_TRANSFORMER, max_length)
    if name.startswith("transformer:"):
        return TransformerEncoder(name.split(":", 1)[1], max_length)
    return TransformerEncoder(name, max_length)
