"""Text embeddings: deterministic builtin embedder plus a remote client.

The builtin embedder hashes character trigrams into a fixed number of
buckets and L2-normalizes the counts; it is pure, platform-independent,
and fast enough for exact nearest-neighbor search at bank scale. The
remote client speaks the common embeddings-endpoint shape
(model + input list -> data list) so real encoder services plug in.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import httpx
import numpy as np

from . import kernels
from .errors import (
    DimensionMismatch,
    EmptyText,
    ProviderError,
    ShapeMismatch,
    TransportError,
)

DEFAULT_DIMENSION = 512
DEFAULT_TIMEOUT_S = 10.0


class EmbedderKind(str, enum.Enum):
    BUILTIN = "builtin"
    REMOTE = "remote"


@dataclass(frozen=True)
class EmbedderSpec:
    kind: EmbedderKind = EmbedderKind.BUILTIN
    dimension: int = DEFAULT_DIMENSION
    endpoint: str = ""
    model_name: str = ""

    def __post_init__(self):
        if self.dimension < 16:
            raise ValueError(f"embedding dimension {self.dimension} < 16")
        if self.kind is EmbedderKind.REMOTE and not self.endpoint:
            raise ValueError("remote embedder spec requires an endpoint")


def fold(text: str) -> str:
    """Case folding applied before hashing: lowercase and trim."""
    return text.lower().strip()


def embed(text: str, dim: int = DEFAULT_DIMENSION) -> np.ndarray:
    """Unit-norm trigram-hash embedding of `text` (builtin embedder)."""
    folded = fold(text)
    if not folded:
        raise EmptyText("cannot embed empty text")
    counts = kernels.trigram_counts(folded, dim)
    return counts / np.linalg.norm(counts)


def normalize(values: Sequence[float]) -> np.ndarray:
    vec = np.asarray(values, dtype=np.float64)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise ValueError("zero vector cannot be normalized")
    return vec / norm


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two unit vectors, clamped to [-1, 1]."""
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimensions differ: {a.shape} vs {b.shape}")
    return float(np.clip(np.dot(a, b), -1.0, 1.0))


class RemoteEmbedder:
    """HTTP client for a remote embeddings endpoint.

    Wire format: POST {endpoint} with {"model": ..., "input": [texts]};
    the response body carries {"data": [{"index": i, "embedding": [...]}]}
    with one vector per input text, in order. Vectors are re-normalized
    locally before use.
    """

    def __init__(self, spec: EmbedderSpec, timeout_s: float = DEFAULT_TIMEOUT_S, transport=None):
        if spec.kind is not EmbedderKind.REMOTE:
            raise ValueError("RemoteEmbedder requires a remote spec")
        self.spec = spec
        self.timeout_s = timeout_s
        self._transport = transport

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        if not texts:
            raise ValueError("empty batch")
        payload = {"model": self.spec.model_name, "input": list(texts)}
        try:
            with httpx.Client(timeout=self.timeout_s, transport=self._transport) as client:
                response = client.post(self.spec.endpoint, json=payload)
        except httpx.HTTPError as exc:
            raise TransportError(str(exc)) from exc
        if response.status_code != 200:
            raise ProviderError(response.status_code, response.text)
        body = response.json()
        data = body.get("data")
        if not isinstance(data, list) or len(data) != len(texts):
            got = len(data) if isinstance(data, list) else "none"
            raise ShapeMismatch(f"expected {len(texts)} vectors, got {got}")
        vectors = []
        for item in sorted(data, key=lambda d: d.get("index", 0)):
            values = item.get("embedding")
            if not isinstance(values, list) or len(values) != self.spec.dimension:
                raise ShapeMismatch(
                    f"expected dimension {self.spec.dimension}, got {len(values) if isinstance(values, list) else 'none'}"
                )
            vectors.append(normalize(values))
        return vectors


def remote_embed(
    texts: Sequence[str],
    spec: EmbedderSpec,
    timeout_s: float = DEFAULT_TIMEOUT_S,
    transport=None,
) -> list[np.ndarray]:
    return RemoteEmbedder(spec, timeout_s=timeout_s, transport=transport).embed_batch(texts)


def embed_with(spec: EmbedderSpec, text: str, timeout_s: float = DEFAULT_TIMEOUT_S, transport=None) -> np.ndarray:
    """Embed one text under either embedder kind."""
    if spec.kind is EmbedderKind.BUILTIN:
        return embed(text, spec.dimension)
    return remote_embed([text], spec, timeout_s=timeout_s, transport=transport)[0]


def embed_texts(
    spec: EmbedderSpec,
    texts: Sequence[str],
    timeout_s: float = DEFAULT_TIMEOUT_S,
    transport=None,
) -> list[np.ndarray]:
    """Embed a batch under either embedder kind (remote goes as one request)."""
    if not texts:
        return []
    if spec.kind is EmbedderKind.BUILTIN:
        return [embed(t, spec.dimension) for t in texts]
    return remote_embed(texts, spec, timeout_s=timeout_s, transport=transport)
