"""Shared builders for synthetic corpora used across the test suite.

Synthetic authors write in mutually disjoint alphabets, so their character
n-gram supports never overlap and their embeddings are near-orthogonal.
The letter pool spans several lowercase Unicode ranges to supply enough
disjoint alphabets for two dozen authors.
"""

import json
from pathlib import Path

import numpy as np

_LETTER_POOL = (
    [chr(c) for c in range(0x61, 0x7B)]  # latin a-z
    + [chr(c) for c in range(0x3B1, 0x3CA)]  # greek alpha..omega
    + [chr(c) for c in range(0x430, 0x450)]  # cyrillic a..ya
    + [chr(c) for c in range(0x561, 0x587)]  # armenian ayb..feh
)

ALPHABET_SIZE = 5
MAX_AUTHORS = len(_LETTER_POOL) // ALPHABET_SIZE


def alphabet(author_index: int) -> str:
    """Five letters no other author uses."""
    if author_index >= MAX_AUTHORS:
        raise ValueError(f"only {MAX_AUTHORS} disjoint alphabets available")
    start = author_index * ALPHABET_SIZE
    return "".join(_LETTER_POOL[start : start + ALPHABET_SIZE])


def author_sentences(
    author_index: int,
    count: int,
    rng: np.random.Generator,
    words_per_sentence: int = 8,
) -> list[str]:
    """Random pseudo-words drawn from the author's alphabet."""
    letters = list(alphabet(author_index))
    sentences = []
    for _ in range(count):
        words = [
            "".join(rng.choice(letters, size=int(rng.integers(3, 9))))
            for _ in range(words_per_sentence)
        ]
        sentences.append(" ".join(words) + ".")
    return sentences


def cored_sentences(
    author_index: int,
    count: int,
    rng: np.random.Generator,
    core_words: int = 10,
    unique_words: int = 1,
    unique_len: int = 3,
) -> list[str]:
    """Sentences sharing a fixed per-author core, so the author's vectors
    form one tight blob; unique suffix words control the blob's spread."""
    letters = list(alphabet(author_index))
    core = " ".join(
        "".join(rng.choice(letters, size=int(rng.integers(4, 8)))) for _ in range(core_words)
    )
    sentences = []
    for _ in range(count):
        extras = " ".join(
            "".join(rng.choice(letters, size=unique_len)) for _ in range(unique_words)
        )
        sentences.append(f"{core} {extras}.")
    return sentences


def clustered_corpus(
    directory: Path,
    authors: int = 5,
    sentences_each: int = 40,
    seed: int = 0,
) -> Path:
    """Disjoint-alphabet authors whose sentences share a per-author core,
    giving one tight, near-orthogonal blob per author."""
    rng = np.random.default_rng(seed)
    docs = []
    for a in range(authors):
        text = " ".join(cored_sentences(a, sentences_each, rng))
        docs.append((f"a{a}", f"author{a}", f"Opus of author{a}", text))
    return write_corpus(directory, docs)


def write_corpus(directory: Path, docs: list[tuple[str, str, str, str]]) -> Path:
    """Write (doc_id, author_name, title, text) rows and return the manifest path."""
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for doc_id, author_name, title, text in docs:
        (directory / f"{doc_id}.txt").write_text(text, encoding="utf-8")
        entries.append(
            {
                "doc_id": doc_id,
                "author_name": author_name,
                "title": title,
                "text_path": f"{doc_id}.txt",
            }
        )
    manifest = directory / "manifest.json"
    manifest.write_text(json.dumps(entries, ensure_ascii=False, indent=1), encoding="utf-8")
    return manifest


def disjoint_corpus(
    directory: Path,
    authors: int = 5,
    sentences_each: int = 40,
    docs_per_author: int = 1,
    seed: int = 0,
) -> Path:
    """Corpus of disjoint-alphabet authors; returns the manifest path."""
    rng = np.random.default_rng(seed)
    docs = []
    for a in range(authors):
        sentences = author_sentences(a, sentences_each, rng)
        chunk = max(1, len(sentences) // docs_per_author)
        for d in range(docs_per_author):
            part = sentences[d * chunk :] if d == docs_per_author - 1 else sentences[d * chunk : (d + 1) * chunk]
            docs.append((f"a{a}d{d}", f"author{a}", f"Opus {d} of author{a}", " ".join(part)))
    return write_corpus(directory, docs)


def attribution_corpus(
    directory: Path,
    authors: int = 22,
    sentences_each: int = 40,
    seed: int = 0,
) -> Path:
    """Corpus whose last author ("copyist") duplicates the text of the
    second-to-last ("origin") verbatim under its own label.

    Every normal author repeats a single sentence, so each forms a
    zero-spread point in embedding space that k-means++ covers exactly
    once. The origin alternates between two long sentence variants that
    differ in one short word; origin plus copyist therefore occupy two
    near-identical point locations, the spare centroid lands on the
    second of them at any seed, and the two mapped centroids stay nearly
    parallel while every other author pair stays near-orthogonal.
    """
    rng = np.random.default_rng(seed)
    docs = []
    for a in range(authors - 2):
        letters = list(alphabet(a))
        core = " ".join(
            "".join(rng.choice(letters, size=int(rng.integers(4, 8)))) for _ in range(10)
        )
        text = " ".join([f"{core}."] * sentences_each)
        docs.append((f"a{a}", f"author{a}", f"Opus of author{a}", text))

    letters = list(alphabet(authors - 2))
    core = " ".join("".join(rng.choice(letters, size=6)) for _ in range(75))
    tail_a = "".join(letters[:2]) + letters[0]
    tail_b = "".join(letters[:2]) + letters[1]
    variants = [f"{core} {tail_a}.", f"{core} {tail_b}."]
    origin_text = " ".join(variants[i % 2] for i in range(sentences_each))
    docs.append(("origin0", "origin", "Origin opus", origin_text))
    docs.append(("copy0", "copyist", "Copied opus", origin_text))
    return write_corpus(directory, docs)


def hash_config(
    manifest: Path,
    out: Path,
    dim: int = 256,
    ngram: int = 3,
    seed: int = 42,
    granularity: str = "sentence",
    threshold: float = 0.7,
    **extra,
) -> Path:
    """Write a RunConfig JSON next to the output dir and return its path."""
    payload = {
        "manifest": str(manifest),
        "provider": {"kind": "hash", "dim": dim, "ngram": ngram},
        "granularity": granularity,
        "k": "auto",
        "seed": seed,
        "threshold": threshold,
        "out": str(out),
    }
    payload.update(extra)
    path = out.parent / f"{out.name}_config.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=1), encoding="utf-8")
    return path
