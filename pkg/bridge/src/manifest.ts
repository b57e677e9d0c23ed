/**
 * Corpus manifest: a JSON array of entries with keys exactly
 * {doc_id, author_name, title, text_path}. Relative text paths resolve
 * against the manifest's directory; text decodes as UTF-8 with invalid
 * bytes replaced. An empty array is allowed here (the export of an empty
 * manifest is an empty EMB1 file).
 */

import fs from "node:fs";
import path from "node:path";

export interface ManifestEntry {
  doc_id: string;
  author_name: string;
  title: string;
  text_path: string;
}

const KEYS = ["doc_id", "author_name", "title", "text_path"] as const;

export function loadManifest(manifestPath: string): ManifestEntry[] {
  const raw = fs.readFileSync(manifestPath, "utf8");
  const parsed: unknown = JSON.parse(raw);
  if (!Array.isArray(parsed)) {
    throw new Error(`manifest ${manifestPath} must be a JSON array`);
  }
  const seen = new Set<string>();
  return parsed.map((entry, position) => {
    if (typeof entry !== "object" || entry === null) {
      throw new Error(`manifest entry ${position} is not an object`);
    }
    const keys = Object.keys(entry).sort();
    if (keys.join(",") !== [...KEYS].sort().join(",")) {
      throw new Error(`manifest entry ${position} must have keys exactly {${KEYS.join(", ")}}`);
    }
    const typed = entry as Record<string, unknown>;
    for (const key of KEYS) {
      if (typeof typed[key] !== "string") {
        throw new Error(`manifest entry ${position}: ${key} must be a string`);
      }
    }
    const docId = typed.doc_id as string;
    if (seen.has(docId)) {
      throw new Error(`duplicate doc_id ${JSON.stringify(docId)}`);
    }
    seen.add(docId);
    return entry as unknown as ManifestEntry;
  });
}

export function readDocumentText(entry: ManifestEntry, manifestPath: string): string {
  const base = path.dirname(manifestPath);
  const target = path.isAbsolute(entry.text_path)
    ? entry.text_path
    : path.join(base, entry.text_path);
  return fs.readFileSync(target).toString("utf8");
}
