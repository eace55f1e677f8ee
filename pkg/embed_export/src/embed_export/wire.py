"""Writer for the EMB1 per-word embedding wire format.

Layout: magic bytes ``EMB1``; ``uint32`` little-endian dimension; then per
sentence a ``uint32`` word count (0 terminates the stream), a 16-byte
sentence-id hash (MD5 of the UTF-8 id) and the row-major float32
little-endian vectors.
"""

from __future__ import annotations

import hashlib
import struct
from typing import BinaryIO

import numpy as np

EMB_MAGIC = b"EMB1"


def sentence_id_hash(sent_id: str) -> bytes:
    return hashlib.md5(sent_id.encode("utf-8")).digest()


class EmbeddingWriter:
    """Single-writer, append-only EMB1 stream."""

    def __init__(self, stream: BinaryIO, dim: int):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self._stream = stream
        self.dim = dim
        self.written = 0
        stream.write(EMB_MAGIC)
        stream.write(struct.pack("<I", dim))

    def write_sentence(self, sent_id: str, vectors: np.ndarray) -> None:
        vectors = np.ascontiguousarray(vectors, dtype="<f4")
        if vectors.ndim != 2 or vectors.shape[1] != self.dim:
            raise ValueError(f"expected shape (n, {self.dim}), got {vectors.shape}")
        if vectors.shape[0] == 0:
            raise ValueError("a sentence must have at least one word vector")
        self._stream.write(struct.pack("<I", vectors.shape[0]))
        self._stream.write(sentence_id_hash(sent_id))
        self._stream.write(vectors.tobytes())
        self.written += 1

    def close(self) -> None:
        self._stream.write(struct.pack("<I", 0))

    def __enter__(self) -> "EmbeddingWriter":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if exc_type is None:
            self.close()
