/**
 * Embedding backends.
 *
 * "hash" is the built-in deterministic backend: signed character-trigram
 * FNV-1a hashing, L2-normalized. It matches the toolkit's built-in hash
 * provider bit-for-bit and exists so the protocol and export machinery
 * can be exercised without model weights.
 *
 * "transformers" wraps any feature-extraction model served by
 * @xenova/transformers (install it separately; pass a Latin checkpoint id
 * for the intended use). Token vectors are mean-pooled and normalized.
 */

export interface Embedder {
  readonly name: string;
  readonly dim: number;
  embed(text: string): Promise<number[]>;
}

const FNV_OFFSET = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;
const MASK64 = (1n << 64n) - 1n;
const NGRAM = 3;

function fnv1a64(bytes: Buffer): bigint {
  let hash = FNV_OFFSET;
  for (const byte of bytes) {
    hash ^= BigInt(byte);
    hash = (hash * FNV_PRIME) & MASK64;
  }
  return hash;
}

export function hashEmbedder(dim: number): Embedder {
  if (dim < 2) {
    throw new Error(`hash backend needs dim >= 2, got ${dim}`);
  }
  const cache = new Map<string, [number, number]>();
  return {
    name: `hash(dim=${dim}, ngram=${NGRAM})`,
    dim,
    async embed(text: string): Promise<number[]> {
      const vector = new Array<number>(dim).fill(0);
      const chars = Array.from(text);
      if (chars.length > 0) {
        const grams: string[] = [];
        if (chars.length < NGRAM) {
          grams.push(chars.join(""));
        } else {
          for (let i = 0; i + NGRAM <= chars.length; i++) {
            grams.push(chars.slice(i, i + NGRAM).join(""));
          }
        }
        for (const gram of grams) {
          let hit = cache.get(gram);
          if (hit === undefined) {
            const hash = fnv1a64(Buffer.from(gram, "utf8"));
            hit = [Number((hash >> 1n) % BigInt(dim)), (hash & 1n) === 0n ? 1 : -1];
            cache.set(gram, hit);
          }
          vector[hit[0]] += hit[1];
        }
        const norm = Math.sqrt(vector.reduce((acc, x) => acc + x * x, 0));
        if (norm > 0) {
          for (let i = 0; i < dim; i++) {
            vector[i] /= norm;
          }
        }
      }
      return vector;
    },
  };
}

export async function transformersEmbedder(modelId: string, dim: number): Promise<Embedder> {
  const moduleName = "@xenova/transformers";
  let pipeline: (task: string, model: string) => Promise<(text: string, options: object) => Promise<{ data: Float32Array }>>;
  try {
    const mod = await import(moduleName);
    pipeline = mod.pipeline;
  } catch (err) {
    throw new Error(
      `cannot load ${moduleName} (install it to use the transformers backend): ${String(err)}`
    );
  }
  const extractor = await pipeline("feature-extraction", modelId);
  return {
    name: `transformers(${modelId})`,
    dim,
    async embed(text: string): Promise<number[]> {
      const output = await extractor(text.length > 0 ? text : " ", {
        pooling: "mean",
        normalize: true,
      });
      const vector = Array.from(output.data);
      if (vector.length !== dim) {
        throw new Error(`model produced dim ${vector.length}, expected ${dim}`);
      }
      return vector;
    },
  };
}

export async function createEmbedder(backend: string, dim: number, modelId?: string): Promise<Embedder> {
  if (backend === "hash") {
    return hashEmbedder(dim);
  }
  if (backend === "transformers") {
    if (!modelId) {
      throw new Error("the transformers backend requires --model <id>");
    }
    return transformersEmbedder(modelId, dim);
  }
  throw new Error(`unknown backend ${JSON.stringify(backend)}; expected hash or transformers`);
}
