/**
 * NDJSON stdio protocol loop.
 *
 * Requests arrive one per line as {"id": string, "text": string};
 * responses leave one per line as {"id": string, "vector": [...]}, in
 * request order, one request in flight at a time. Lines starting with
 * '#' on stdout are log lines for the consumer to skip.
 */

import readline from "node:readline";

import { Embedder } from "./backends.js";

export interface BridgeRequest {
  id: string;
  text: string;
}

export function log(out: NodeJS.WritableStream, message: string): void {
  out.write(`# ${message}\n`);
}

function parseRequest(line: string): BridgeRequest {
  let payload: unknown;
  try {
    payload = JSON.parse(line);
  } catch (err) {
    throw new Error(`request is not valid JSON: ${String(err)}`);
  }
  if (
    typeof payload !== "object" ||
    payload === null ||
    typeof (payload as BridgeRequest).id !== "string" ||
    typeof (payload as BridgeRequest).text !== "string"
  ) {
    throw new Error('request must be {"id": string, "text": string}');
  }
  return payload as BridgeRequest;
}

export async function serve(
  embedder: Embedder,
  input: NodeJS.ReadableStream,
  out: NodeJS.WritableStream
): Promise<void> {
  log(out, `bridge ready backend=${embedder.name} dim=${embedder.dim}`);
  const lines = readline.createInterface({ input, crlfDelay: Infinity });
  for await (const line of lines) {
    const trimmed = line.trim();
    if (!trimmed) {
      continue;
    }
    const request = parseRequest(trimmed);
    const vector = await embedder.embed(request.text);
    out.write(JSON.stringify({ id: request.id, vector }) + "\n");
  }
}
