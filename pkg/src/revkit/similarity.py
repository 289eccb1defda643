"""String similarity measures on a 0-100 scale (100 = perfect match).

Three measures feed the pre-alignment algorithm: character edit distance
("lev"), token-sort edit distance ("fuzzy") and embedding cosine ("sem").
The default embedding provider is a deterministic character-trigram
hasher, so tests and offline runs need no model downloads; any external
provider can be plugged in through the same interface.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import numpy as np


def levenshtein_distance(a: str, b: str) -> int:
    """Minimum number of single-character edits turning ``a`` into ``b``."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a):
        current = [i + 1]
        for j, cb in enumerate(b):
            current.append(
                min(previous[j + 1] + 1, current[j] + 1, previous[j] + (ca != cb))
            )
        previous = current
    return previous[-1]


def lev_similarity(a: str, b: str) -> float:
    """(1 - distance / max length) * 100; two empty strings match perfectly."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 100.0
    return (1.0 - levenshtein_distance(a, b) / longest) * 100.0


def token_sort(text: str) -> str:
    return " ".join(sorted(text.split()))


def fuzzy_similarity(a: str, b: str) -> float:
    """Token-sort ratio: edit similarity after lexicographic token reorder."""
    return lev_similarity(token_sort(a), token_sort(b))


class EmbeddingProvider(Protocol):
    """Maps a string to a fixed-dimension real vector."""

    def embed(self, text: str) -> np.ndarray: ...


@dataclass(frozen=True)
class TrigramEmbedder:
    """Deterministic bag-of-character-trigrams embedding via crc32 hashing."""

    dim: int = 256

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        padded = f"  {text.lower()} "
        for i in range(len(padded) - 2):
            trigram = padded[i : i + 3]
            vec[zlib.crc32(trigram.encode("utf-8")) % self.dim] += 1.0
        return vec


@dataclass(frozen=True)
class FixtureEmbedder:
    """Test fixture returning preset vectors per exact string."""

    vectors: tuple[tuple[str, tuple[float, ...]], ...]
    fallback_dim: int = 4

    def embed(self, text: str) -> np.ndarray:
        for key, vec in self.vectors:
            if key == text:
                return np.asarray(vec, dtype=np.float64)
        return np.zeros(self.fallback_dim, dtype=np.float64)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def sem_similarity(a: str, b: str, embedder: EmbeddingProvider) -> float:
    """max(0, cosine of embeddings) * 100."""
    return max(0.0, cosine(embedder.embed(a), embedder.embed(b))) * 100.0


@dataclass(frozen=True)
class SimilarityMeasure:
    name: str
    score: Callable[[str, str], float]


def default_measures(embedder: EmbeddingProvider | None = None) -> list[SimilarityMeasure]:
    embedder = embedder or TrigramEmbedder()
    return [
        SimilarityMeasure("lev", lev_similarity),
        SimilarityMeasure("fuzzy", fuzzy_similarity),
        SimilarityMeasure("sem", lambda a, b: sem_similarity(a, b, embedder)),
    ]


def measures_by_name(
    names: Sequence[str], embedder: EmbeddingProvider | None = None
) -> list[SimilarityMeasure]:
    available = {m.name: m for m in default_measures(embedder)}
    try:
        return [available[name] for name in names]
    except KeyError as exc:
        raise ValueError(f"unknown similarity measure: {exc}") from None
