/**
 * Sentence segmentation and sentence-mode cleaning, mirroring the
 * toolkit's published preprocessing rules so exported unit ids line up
 * with what the toolkit requests:
 *
 * - segments split on {. ! ? ;}, terminator retained, trimmed, empties
 *   dropped, a trailing unterminated chunk kept;
 * - cleaning lowercases, removes digits, keeps only {. , ! ? ; :} among
 *   punctuation, and collapses whitespace;
 * - a unit's index is its position in the segmented list, and units that
 *   clean to the empty string are dropped without renumbering.
 */

const TERMINATORS = new Set([".", "!", "?", ";"]);
const SENTENCE_KEEP = new Set([".", ",", "!", "?", ";", ":"]);
// ASCII punctuation class; the Unicode P categories are matched separately
// (several ASCII marks like + < = > are category S, not P).
const ASCII_PUNCT = new Set("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~");
const UNICODE_PUNCT = /\p{P}/u;
const DIGIT = /\p{Nd}/u;

function isPunct(ch: string): boolean {
  return ASCII_PUNCT.has(ch) || UNICODE_PUNCT.test(ch);
}

export function segmentSentences(rawText: string): string[] {
  const segments: string[] = [];
  let current: string[] = [];
  for (const ch of rawText) {
    current.push(ch);
    if (TERMINATORS.has(ch)) {
      const segment = current.join("").trim();
      if (segment) {
        segments.push(segment);
      }
      current = [];
    }
  }
  const tail = current.join("").trim();
  if (tail) {
    segments.push(tail);
  }
  return segments;
}

export function cleanSentence(text: string): string {
  const kept: string[] = [];
  for (const ch of text.toLowerCase()) {
    if (DIGIT.test(ch)) {
      continue;
    }
    if (isPunct(ch) && !SENTENCE_KEEP.has(ch)) {
      continue;
    }
    kept.push(ch);
  }
  return kept.join("").split(/\s+/u).filter(Boolean).join(" ");
}

export interface Unit {
  docId: string;
  index: number;
  text: string;
}

/** Segment a document and clean each sentence, dropping emptied units. */
export function documentUnits(docId: string, rawText: string): Unit[] {
  const units: Unit[] = [];
  segmentSentences(rawText).forEach((segment, index) => {
    const cleaned = cleanSentence(segment);
    if (cleaned) {
      units.push({ docId, index, text: cleaned });
    }
  });
  return units;
}
