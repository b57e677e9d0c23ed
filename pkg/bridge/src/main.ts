#!/usr/bin/env node
/**
 * embed-bridge: sidecar embedding process.
 *
 *   embed-bridge serve  [--backend hash|transformers] [--model <id>] [--dim N]
 *   embed-bridge export --manifest <path> --out <path>
 *                       [--backend hash|transformers] [--model <id>] [--dim N]
 *
 * serve speaks the NDJSON request/response protocol on stdin/stdout;
 * export reads a corpus manifest, segments and cleans each document into
 * sentence units, embeds them, and writes an EMB1 file whose unit ids are
 * "<doc_id>#<segment_index>".
 *
 * Exit codes: 0 success, 1 on any failure (a '#'-prefixed diagnostic is
 * printed before exiting).
 */

import fs from "node:fs";
import { parseArgs } from "node:util";

import { createEmbedder } from "./backends.js";
import { encodeEmb1, Emb1Row } from "./emb1.js";
import { loadManifest, readDocumentText } from "./manifest.js";
import { log, serve } from "./protocol.js";
import { documentUnits } from "./text.js";

function usage(): string {
  return [
    "usage: embed-bridge serve  [--backend hash|transformers] [--model <id>] [--dim N]",
    "       embed-bridge export --manifest <path> --out <path> [--backend ...] [--model <id>] [--dim N]",
  ].join("\n");
}

async function main(): Promise<number> {
  const { values, positionals } = parseArgs({
    options: {
      backend: { type: "string", default: "hash" },
      model: { type: "string" },
      dim: { type: "string", default: "768" },
      manifest: { type: "string" },
      out: { type: "string" },
      help: { type: "boolean", default: false },
    },
    allowPositionals: true,
  });

  if (values.help || positionals.length === 0) {
    console.log(usage());
    return values.help ? 0 : 1;
  }

  const command = positionals[0];
  const dim = Number.parseInt(values.dim as string, 10);
  if (!Number.isFinite(dim) || dim < 1) {
    log(process.stdout, `invalid --dim ${values.dim}`);
    return 1;
  }

  if (command === "serve") {
    const embedder = await createEmbedder(values.backend as string, dim, values.model);
    await serve(embedder, process.stdin, process.stdout);
    return 0;
  }

  if (command === "export") {
    if (!values.manifest || !values.out) {
      log(process.stdout, "export requires --manifest and --out");
      return 1;
    }
    const embedder = await createEmbedder(values.backend as string, dim, values.model);
    log(process.stderr, `export backend=${embedder.name} dim=${embedder.dim}`);
    const entries = loadManifest(values.manifest);
    const rows: Emb1Row[] = [];
    for (const entry of entries) {
      const text = readDocumentText(entry, values.manifest);
      for (const unit of documentUnits(entry.doc_id, text)) {
        rows.push({
          id: `${unit.docId}#${unit.index}`,
          vector: await embedder.embed(unit.text),
        });
      }
    }
    fs.writeFileSync(values.out, encodeEmb1(rows, dim));
    log(process.stderr, `wrote ${rows.length} vectors to ${values.out}`);
    return 0;
  }

  log(process.stdout, `unknown command ${JSON.stringify(command)}`);
  console.log(usage());
  return 1;
}

main()
  .then((code) => {
    process.exitCode = code;
  })
  .catch((err) => {
    // '#'-prefixed diagnostic, then a nonzero exit
    log(process.stdout, `fatal: ${err instanceof Error ? err.message : String(err)}`);
    process.exitCode = 1;
  });
