"""Cleaning rules and sentence segmentation for raw corpus text.

Two cleaning modes exist: whole-document analysis strips punctuation
entirely, sentence-level analysis keeps the six marks that carry stylistic
signal ({. , ! ? ; :}). Digits are always removed; an optional lexicon
drops tokens outside a known word list.
"""

import string
import unicodedata
from dataclasses import dataclass
from enum import Enum

__all__ = ["CleanMode", "Sentence", "segment_sentences", "clean"]


class CleanMode(Enum):
    DOCUMENT = "document"
    SENTENCE = "sentence"


@dataclass(frozen=True)
class Sentence:
    """One embeddable unit of a document.

    index is the unit's position in the document's segmented sentence
    list. Units dropped later (e.g. cleaned to emptiness) do not renumber
    their successors, so (doc_id, index) stays a stable identity.
    """

    doc_id: str
    index: int
    text: str


# Strong stops; semicolons included because many editions use them as
# full stops. No abbreviation handling: "Kal." splits like a sentence end.
_TERMINATORS = frozenset(".!?;")

# Punctuation retained by sentence-mode cleaning.
_SENTENCE_KEEP = frozenset(".,!?;:")
_SENTENCE_KEEP_STR = "".join(sorted(_SENTENCE_KEEP))

_ASCII_PUNCT = frozenset(string.punctuation)


def _is_punct(ch: str) -> bool:
    # ASCII punctuation class plus Unicode general category P
    # (typographic quotes, dashes etc. in digitized editions).
    return ch in _ASCII_PUNCT or unicodedata.category(ch).startswith("P")


def segment_sentences(raw_text: str) -> list[str]:
    """Split text into sentence strings on the terminators {. ! ? ;}.

    The terminator stays at the end of its segment. Segments are
    whitespace-trimmed and empty ones dropped. A trailing chunk with no
    terminator is kept so unpunctuated text still yields a unit.
    """
    segments: list[str] = []
    start = 0
    for i, ch in enumerate(raw_text):
        if ch in _TERMINATORS:
            seg = raw_text[start : i + 1].strip()
            if seg:
                segments.append(seg)
            start = i + 1
    tail = raw_text[start:].strip()
    if tail:
        segments.append(tail)
    return segments


def clean(text: str, mode: CleanMode, lexicon: set[str] | None = None) -> str:
    """Normalize one text unit for embedding.

    Applies, in order: lowercasing; digit removal; punctuation removal
    (document mode removes all of it, sentence mode keeps {. , ! ? ; :});
    lexicon filtering when a lexicon is given; whitespace collapsing.

    Lexicon lookup ignores retained punctuation at token edges, so
    "vale." passes against the entry "vale" while keeping its stop. The
    function is idempotent for any fixed (mode, lexicon).
    """
    kept_chars: list[str] = []
    for ch in text.lower():
        if ch.isdigit():
            continue
        if _is_punct(ch) and (mode is CleanMode.DOCUMENT or ch not in _SENTENCE_KEEP):
            continue
        kept_chars.append(ch)

    tokens = "".join(kept_chars).split()
    if lexicon is not None:
        filtered = []
        for tok in tokens:
            core = tok.strip(_SENTENCE_KEEP_STR) if mode is CleanMode.SENTENCE else tok
            if core and core in lexicon:
                filtered.append(tok)
        tokens = filtered
    return " ".join(tokens)
