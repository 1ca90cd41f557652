import { FheSparseError } from "./errors.js";
import type {
  BenchSuiteConfig,
  BenchSuiteResult,
  EngineInfo,
  EngineOptions,
  MatmulResult,
  MatrixInfo,
  MatrixLayout,
  SchemeName,
} from "./types.js";

/** Matrices cross the boundary as plain row-major number arrays; all
 * numeric work happens inside the service, never in this client. */
export type Matrix = number[][];

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const res = await fetch(base + path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!res.ok) {
    let category = "http";
    let detail = `${res.status} ${res.statusText}`;
    try {
      const body = (await res.json()) as { error?: string; detail?: string };
      if (body.error) category = body.error;
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the HTTP fallback
    }
    throw new FheSparseError(category, detail, res.status);
  }
  return (await res.json()) as T;
}

/** Opaque reference to an encrypted matrix held by the service. */
export class MatrixHandle {
  constructor(
    readonly engine: EngineHandle,
    readonly info: MatrixInfo,
  ) {}

  get id(): string {
    return this.info.matrixId;
  }

  decrypt(): Promise<Matrix> {
    return this.engine.decryptMatrix(this);
  }
}

/** One engine session (keys plus matrix store) owned by the service. */
export class EngineHandle {
  constructor(
    private readonly base: string,
    readonly info: EngineInfo,
  ) {}

  get id(): string {
    return this.info.engineId;
  }

  async encryptMatrix(
    values: Matrix,
    layout: MatrixLayout = "dense",
    chunkSize = 1,
  ): Promise<MatrixHandle> {
    const raw = await request<Record<string, unknown>>(
      this.base,
      `/engines/${this.id}/matrices`,
      { method: "POST", body: JSON.stringify({ values, layout, chunk_size: chunkSize }) },
    );
    return new MatrixHandle(this, toMatrixInfo(raw));
  }

  async matmul(
    lhs: MatrixHandle,
    rhs: MatrixHandle,
    scheme: SchemeName,
    threads = 1,
  ): Promise<MatmulResult & { handle: MatrixHandle }> {
    const raw = await request<{
      matrix: Record<string, unknown>;
      runtime_s: number;
      op_counts: Record<string, number>;
    }>(this.base, `/engines/${this.id}/matmul`, {
      method: "POST",
      body: JSON.stringify({ lhs_id: lhs.id, rhs_id: rhs.id, scheme, threads }),
    });
    const info = toMatrixInfo(raw.matrix);
    return {
      matrix: info,
      runtimeS: raw.runtime_s,
      opCounts: raw.op_counts,
      handle: new MatrixHandle(this, info),
    };
  }

  async decryptMatrix(handle: MatrixHandle): Promise<Matrix> {
    const raw = await request<{ values: Matrix }>(
      this.base,
      `/engines/${this.id}/matrices/${handle.id}/decrypt`,
      { method: "POST" },
    );
    return raw.values;
  }

  async drop(): Promise<void> {
    await request(this.base, `/engines/${this.id}`, { method: "DELETE" });
  }
}

function toMatrixInfo(raw: Record<string, unknown>): MatrixInfo {
  return {
    matrixId: raw.matrix_id as string,
    rows: raw.rows as number,
    cols: raw.cols as number,
    layout: raw.layout as string,
    chunkSize: raw.chunk_size as number,
    chunkCount: raw.chunk_count as number,
    ciphertextBytes: raw.ciphertext_bytes as number,
    metadataBytes: raw.metadata_bytes as number,
  };
}

export class FheSparseClient {
  constructor(private readonly base: string) {}

  async health(): Promise<{ status: string; version: string }> {
    return request(this.base, "/health");
  }

  async createEngine(opts: EngineOptions = {}): Promise<EngineHandle> {
    const body: Record<string, unknown> = { engine: opts.engine ?? "model" };
    if (opts.polyModulusDegree !== undefined) body.poly_modulus_degree = opts.polyModulusDegree;
    if (opts.coeffModulusBits !== undefined) body.coeff_modulus_bits = opts.coeffModulusBits;
    if (opts.initialScale !== undefined) body.initial_scale = opts.initialScale;
    if (opts.seed !== undefined) body.seed = opts.seed;
    if (opts.noiseStd !== undefined) body.noise_std = opts.noiseStd;
    const raw = await request<Record<string, unknown>>(this.base, "/engines", {
      method: "POST",
      body: JSON.stringify(body),
    });
    return new EngineHandle(this.base, {
      engineId: raw.engine_id as string,
      engine: raw.engine as string,
      slotCount: raw.slot_count as number,
      maxLevel: raw.max_level as number,
    });
  }

  /** Seeded Gaussian operand pair generated by the service (shared with the
   * core CLI for fixed-seed comparisons). */
  async generateOperands(
    size: number,
    sparsity = 0,
    seed = 0,
  ): Promise<{ lhs: Matrix; rhs: Matrix }> {
    return request(this.base, "/operands", {
      method: "POST",
      body: JSON.stringify({ size, sparsity, seed }),
    });
  }

  async runSuite(config: BenchSuiteConfig = {}): Promise<BenchSuiteResult> {
    const body: Record<string, unknown> = {};
    if (config.sizes) body.sizes = config.sizes;
    if (config.sparsities) body.sparsities = config.sparsities;
    if (config.schemes) body.schemes = config.schemes;
    if (config.threadCounts) body.thread_counts = config.threadCounts;
    if (config.chunkSize !== undefined) body.chunk_size = config.chunkSize;
    if (config.engine) body.engine = config.engine;
    if (config.noiseStd !== undefined) body.noise_std = config.noiseStd;
    if (config.repeats !== undefined) body.repeats = config.repeats;
    if (config.seed !== undefined) body.seed = config.seed;
    if (config.epsilon !== undefined) body.epsilon = config.epsilon;
    const raw = await request<{
      records: BenchSuiteResult["records"];
      csv: string;
      all_passed: boolean;
    }>(this.base, "/bench", { method: "POST", body: JSON.stringify(body) });
    return { records: raw.records, csv: raw.csv, allPassed: raw.all_passed };
  }
}
