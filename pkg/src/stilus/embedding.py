"""Embedding providers, the matrix container, and the EMB1 file format.

Three providers turn text units into fixed-dimension vectors:

* ``hash``    — built-in, deterministic character n-gram signed hashing.
                A test-scale stand-in for a contextual model.
* ``file``    — vectors precomputed into an EMB1 file, looked up by unit id.
* ``sidecar`` — a child process speaking newline-delimited JSON on its
                standard streams (see the wire protocol below).

EMB1 file layout (little-endian):
    magic "EMB1" | u32 row count | u32 dim | count*dim float32 row-major
    | per row: u16 id length + UTF-8 unit id bytes

Unit ids serialize as "<doc_id>#<unit_index>"; the last '#' separates the
numeric index. Ids without a parsable index load as (id, 0).

Sidecar wire protocol: requests {"id": str, "text": str} one per line on
stdin; responses {"id": str, "vector": [...]} one per line on stdout, in
request order. Any stdout line starting with '#' is a log line and is
skipped.
"""

import json
import shlex
import struct
import subprocess
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, LoadError, ProviderError, ValidationError
from .preprocess import Sentence

__all__ = [
    "ProviderConfig",
    "EmbeddingMatrix",
    "hash_embed",
    "embed_sentences",
    "embed_documents",
    "write_embeddings",
    "load_embeddings",
]

_MAGIC = b"EMB1"
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1

DEFAULT_DIM = 768


@dataclass(frozen=True)
class ProviderConfig:
    """How vectors are produced. dim must match what the provider emits."""

    kind: str  # "hash" | "file" | "sidecar"
    dim: int = DEFAULT_DIM
    ngram: int = 3  # hash provider window, in characters
    path: str | None = None  # file provider: EMB1 path
    command: tuple[str, ...] = ()  # sidecar provider: argv

    def __post_init__(self):
        if self.kind not in ("hash", "file", "sidecar"):
            raise ValidationError(f"unknown provider kind {self.kind!r}")
        if self.dim < 1:
            raise ValidationError("provider dim must be positive")
        if self.kind == "hash" and self.dim < 2:
            raise ValidationError("hash provider dim must be at least 2")
        if self.kind == "hash" and self.ngram < 1:
            raise ValidationError("hash provider ngram must be at least 1")
        if self.kind == "file" and not self.path:
            raise ValidationError("file provider requires a path")
        if self.kind == "sidecar" and not self.command:
            raise ValidationError("sidecar provider requires a command")


@dataclass
class EmbeddingMatrix:
    """n x dim matrix with one (doc_id, unit_index) identity per row."""

    vectors: np.ndarray
    unit_ids: tuple[tuple[str, int], ...]

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2:
            raise ValidationError("embedding matrix must be 2-D")
        if self.vectors.shape[1] < 1:
            raise ValidationError("embedding dim must be positive")
        if len(self.unit_ids) != self.vectors.shape[0]:
            raise ValidationError(
                f"unit id count {len(self.unit_ids)} does not match row count {self.vectors.shape[0]}"
            )
        if self.vectors.size and not np.isfinite(self.vectors).all():
            raise ValidationError("embedding matrix contains non-finite values")
        self.unit_ids = tuple((str(d), int(i)) for d, i in self.unit_ids)
        if any(i < 0 for _, i in self.unit_ids):
            raise ValidationError("unit indices must be non-negative")

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.vectors.shape[0]


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & _MASK64
    return h


def hash_embed(
    text: str,
    dim: int,
    ngram: int,
    _cache: dict[str, tuple[int, float]] | None = None,
) -> np.ndarray:
    """Signed character n-gram hashing into a unit vector.

    A window of ngram characters slides over the text (a shorter non-empty
    text is one gram; the empty text has none). Each gram hashes with
    FNV-1a 64 over its UTF-8 bytes; the low hash bit picks the sign and
    the remaining bits pick the component (h >> 1) mod dim. The result is
    L2-normalized; an all-zero accumulation stays the zero vector.

    _cache memoizes gram -> (component, sign) across calls that share a
    batch; it never changes the result.
    """
    if dim < 2:
        raise ValidationError("dim must be at least 2")
    if ngram < 1:
        raise ValidationError("ngram must be at least 1")

    vec = np.zeros(dim, dtype=np.float64)
    if not text:
        return vec
    if len(text) < ngram:
        grams = (text,)
    else:
        grams = (text[i : i + ngram] for i in range(len(text) - ngram + 1))

    cache = _cache if _cache is not None else {}
    for gram in grams:
        hit = cache.get(gram)
        if hit is None:
            h = _fnv1a64(gram.encode("utf-8"))
            hit = ((h >> 1) % dim, 1.0 if (h & 1) == 0 else -1.0)
            cache[gram] = hit
        vec[hit[0]] += hit[1]

    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec /= norm
    return vec


def _normalized_mean(rows: np.ndarray) -> np.ndarray:
    pooled = rows.mean(axis=0)
    norm = float(np.linalg.norm(pooled))
    if norm > 0.0:
        pooled = pooled / norm
    return pooled


class _FileTable:
    """EMB1-backed lookup table keyed by (doc_id, unit_index)."""

    def __init__(self, config: ProviderConfig):
        matrix = load_embeddings(config.path)
        if matrix.dim != config.dim:
            raise FormatError(
                f"embedding file {config.path} has dim {matrix.dim}, provider configured for {config.dim}"
            )
        self._rows = {uid: matrix.vectors[i] for i, uid in enumerate(matrix.unit_ids)}
        self._path = config.path

    def lookup(self, doc_id: str, index: int) -> np.ndarray:
        row = self._rows.get((doc_id, index))
        if row is None:
            raise ProviderError(
                f"embedding file {self._path} has no vector for unit {doc_id}#{index}"
            )
        return row


class _Sidecar:
    """One child process; one request in flight at a time."""

    def __init__(self, config: ProviderConfig):
        self._dim = config.dim
        self._command = list(config.command)
        try:
            self._proc = subprocess.Popen(
                self._command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
            )
        except OSError as exc:
            raise ProviderError(f"failed to launch sidecar {shlex.join(self._command)}: {exc}") from exc

    def request(self, unit_id: str, text: str, flight: str) -> np.ndarray:
        """flight names the unit in error messages, e.g. 'sentence 3'."""
        payload = json.dumps({"id": unit_id, "text": text}, ensure_ascii=False)
        try:
            self._proc.stdin.write(payload + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ProviderError(f"sidecar pipe closed with {flight} in flight: {exc}") from exc
        while True:
            line = self._proc.stdout.readline()
            if line == "":
                raise ProviderError(f"sidecar exited with {flight} in flight")
            line = line.strip()
            if not line or line.startswith("#"):
                continue  # log line
            break
        try:
            response = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProviderError(f"sidecar sent invalid JSON for {flight}: {exc}") from exc
        if not isinstance(response, dict) or "id" not in response or "vector" not in response:
            raise ProviderError(f"sidecar response for {flight} lacks id/vector fields")
        if response["id"] != unit_id:
            raise ProviderError(
                f"sidecar answered out of order: expected id {unit_id!r}, got {response['id']!r} ({flight})"
            )
        vector = np.asarray(response["vector"], dtype=np.float64)
        if vector.ndim != 1 or vector.shape[0] != self._dim:
            raise FormatError(
                f"sidecar returned dim {vector.shape[0] if vector.ndim == 1 else vector.shape} "
                f"for {flight}, expected {self._dim}"
            )
        if not np.isfinite(vector).all():
            raise FormatError(f"sidecar returned non-finite components for {flight}")
        return vector

    def close(self):
        proc = self._proc
        try:
            if proc.stdin:
                proc.stdin.close()
            proc.wait(timeout=10)
        except Exception:
            proc.kill()
            proc.wait()


def embed_sentences(provider: ProviderConfig, sentences: list[Sentence]) -> EmbeddingMatrix:
    """One row per sentence, in input order."""
    unit_ids = tuple((s.doc_id, s.index) for s in sentences)
    rows = np.zeros((len(sentences), provider.dim), dtype=np.float64)

    if provider.kind == "hash":
        cache: dict[str, tuple[int, float]] = {}
        for i, sent in enumerate(sentences):
            rows[i] = hash_embed(sent.text, provider.dim, provider.ngram, _cache=cache)
    elif provider.kind == "file":
        table = _FileTable(provider)
        for i, sent in enumerate(sentences):
            rows[i] = table.lookup(sent.doc_id, sent.index)
    else:
        sidecar = _Sidecar(provider)
        try:
            for i, sent in enumerate(sentences):
                rows[i] = sidecar.request(
                    f"{sent.doc_id}#{sent.index}", sent.text, flight=f"sentence {i}"
                )
        finally:
            sidecar.close()

    return EmbeddingMatrix(vectors=rows, unit_ids=unit_ids)


def embed_documents(
    provider: ProviderConfig, docs: list[tuple[str, list[Sentence]]]
) -> EmbeddingMatrix:
    """One row per document, identified as (doc_id, 0).

    Built-in providers (hash, file) pool: the document vector is the
    arithmetic mean of its sentence vectors, L2-normalized (the zero mean
    stays zero). A sidecar receives each document's full text as a single
    request and may produce the vector however it likes.
    """
    for doc_id, sentences in docs:
        if not sentences:
            raise ValidationError(f"document {doc_id!r} has no sentences to embed")

    unit_ids = tuple((doc_id, 0) for doc_id, _ in docs)
    rows = np.zeros((len(docs), provider.dim), dtype=np.float64)

    if provider.kind == "hash":
        cache: dict[str, tuple[int, float]] = {}
        for i, (_, sentences) in enumerate(docs):
            sent_rows = np.array(
                [hash_embed(s.text, provider.dim, provider.ngram, _cache=cache) for s in sentences]
            )
            rows[i] = _normalized_mean(sent_rows)
    elif provider.kind == "file":
        table = _FileTable(provider)
        for i, (doc_id, sentences) in enumerate(docs):
            sent_rows = np.array([table.lookup(doc_id, s.index) for s in sentences])
            rows[i] = _normalized_mean(sent_rows)
    else:
        sidecar = _Sidecar(provider)
        try:
            for i, (doc_id, sentences) in enumerate(docs):
                rows[i] = sidecar.request(
                    f"{doc_id}#0",
                    " ".join(s.text for s in sentences),
                    flight=f"document {i} ({doc_id})",
                )
        finally:
            sidecar.close()

    return EmbeddingMatrix(vectors=rows, unit_ids=unit_ids)


def write_embeddings(matrix: EmbeddingMatrix, path: str | Path) -> None:
    """Serialize to EMB1. Values are stored as float32."""
    out = bytearray()
    out += _MAGIC
    out += struct.pack("<II", len(matrix), matrix.dim)
    out += matrix.vectors.astype("<f4").tobytes(order="C")
    for doc_id, index in matrix.unit_ids:
        encoded = f"{doc_id}#{index}".encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise ValidationError(f"unit id too long to serialize: {doc_id!r}")
        out += struct.pack("<H", len(encoded))
        out += encoded
    Path(path).write_bytes(bytes(out))


def _parse_unit_id(raw: str) -> tuple[str, int]:
    doc_id, sep, suffix = raw.rpartition("#")
    if sep and suffix.isdigit():
        return doc_id, int(suffix)
    return raw, 0


def load_embeddings(path: str | Path) -> EmbeddingMatrix:
    """Read an EMB1 file back into a matrix; exact for float32 payloads."""
    path = Path(path)
    if not path.is_file():
        raise LoadError(f"embedding file not found: {path}")
    blob = path.read_bytes()
    if len(blob) < 12:
        raise FormatError(f"{path}: truncated header")
    if blob[:4] != _MAGIC:
        raise FormatError(f"{path}: bad magic {blob[:4]!r}, expected {_MAGIC!r}")
    count, dim = struct.unpack_from("<II", blob, 4)
    if dim < 1:
        raise FormatError(f"{path}: dim must be positive, got {dim}")
    offset = 12
    payload = count * dim * 4
    if len(blob) - offset < payload:
        raise FormatError(
            f"{path}: payload holds {(len(blob) - offset) // 4} floats, header implies {count * dim}"
        )
    vectors = (
        np.frombuffer(blob, dtype="<f4", count=count * dim, offset=offset)
        .reshape(count, dim)
        .astype(np.float64)
    )
    offset += payload

    unit_ids: list[tuple[str, int]] = []
    for row in range(count):
        if len(blob) - offset < 2:
            raise FormatError(f"{path}: truncated unit id section at row {row}")
        (id_len,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        if len(blob) - offset < id_len:
            raise FormatError(f"{path}: truncated unit id at row {row}")
        try:
            raw = blob[offset : offset + id_len].decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"{path}: unit id at row {row} is not UTF-8: {exc}") from exc
        unit_ids.append(_parse_unit_id(raw))
        offset += id_len
    if offset != len(blob):
        raise FormatError(f"{path}: {len(blob) - offset} trailing bytes after unit ids")

    return EmbeddingMatrix(vectors=vectors, unit_ids=tuple(unit_ids))
