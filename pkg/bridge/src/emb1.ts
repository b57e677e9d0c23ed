/**
 * EMB1 binary embedding interchange format (little-endian):
 *
 *   magic "EMB1" | u32 row count | u32 dim
 *   | count*dim float32, row-major
 *   | per row: u16 byte length + UTF-8 unit id
 *
 * Unit ids follow the "<doc_id>#<unit_index>" convention.
 */

const MAGIC = Buffer.from("EMB1", "ascii");

export interface Emb1Row {
  id: string;
  vector: ArrayLike<number>;
}

export function encodeEmb1(rows: Emb1Row[], dim: number): Buffer {
  if (dim < 1) {
    throw new Error(`dim must be positive, got ${dim}`);
  }
  const ids: Buffer[] = [];
  for (const row of rows) {
    if (row.vector.length !== dim) {
      throw new Error(`row ${row.id} has ${row.vector.length} components, expected ${dim}`);
    }
    const encoded = Buffer.from(row.id, "utf8");
    if (encoded.length > 0xffff) {
      throw new Error(`unit id too long to serialize: ${row.id.slice(0, 40)}...`);
    }
    ids.push(encoded);
  }

  const idBytes = ids.reduce((total, b) => total + 2 + b.length, 0);
  const out = Buffer.alloc(12 + rows.length * dim * 4 + idBytes);
  MAGIC.copy(out, 0);
  out.writeUInt32LE(rows.length, 4);
  out.writeUInt32LE(dim, 8);

  let offset = 12;
  for (const row of rows) {
    for (let i = 0; i < dim; i++) {
      out.writeFloatLE(row.vector[i], offset);
      offset += 4;
    }
  }
  for (const encoded of ids) {
    out.writeUInt16LE(encoded.length, offset);
    offset += 2;
    encoded.copy(out, offset);
    offset += encoded.length;
  }
  return out;
}

export function decodeEmb1(buf: Buffer): { dim: number; rows: { id: string; vector: Float32Array }[] } {
  if (buf.length < 12) {
    throw new Error("truncated header");
  }
  if (!buf.subarray(0, 4).equals(MAGIC)) {
    throw new Error(`bad magic ${JSON.stringify(buf.subarray(0, 4).toString("latin1"))}`);
  }
  const count = buf.readUInt32LE(4);
  const dim = buf.readUInt32LE(8);
  let offset = 12;
  if (buf.length - offset < count * dim * 4) {
    throw new Error("truncated float payload");
  }
  const rows: { id: string; vector: Float32Array }[] = [];
  const vectors: Float32Array[] = [];
  for (let r = 0; r < count; r++) {
    const vector = new Float32Array(dim);
    for (let i = 0; i < dim; i++) {
      vector[i] = buf.readFloatLE(offset);
      offset += 4;
    }
    vectors.push(vector);
  }
  for (let r = 0; r < count; r++) {
    if (buf.length - offset < 2) {
      throw new Error(`truncated unit id section at row ${r}`);
    }
    const length = buf.readUInt16LE(offset);
    offset += 2;
    if (buf.length - offset < length) {
      throw new Error(`truncated unit id at row ${r}`);
    }
    const id = buf.subarray(offset, offset + length).toString("utf8");
    offset += length;
    rows.push({ id, vector: vectors[r] });
  }
  if (offset !== buf.length) {
    throw new Error(`${buf.length - offset} trailing bytes after unit ids`);
  }
  return { dim, rows };
}
