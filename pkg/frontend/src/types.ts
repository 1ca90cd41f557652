export type EngineKind = "model" | "ckks";

export type MatrixLayout = "dense" | "binary_mask" | "csr" | "ellpack";

export type SchemeName = "dense" | "naive" | "csr" | "ellpack";

export interface EngineOptions {
  engine?: EngineKind;
  polyModulusDegree?: number;
  coeffModulusBits?: number[];
  initialScale?: number;
  seed?: number;
  noiseStd?: number;
}

export interface EngineInfo {
  engineId: string;
  engine: string;
  slotCount: number;
  maxLevel: number;
}

export interface MatrixInfo {
  matrixId: string;
  rows: number;
  cols: number;
  layout: string;
  chunkSize: number;
  chunkCount: number;
  ciphertextBytes: number;
  metadataBytes: number;
}

export interface MatmulResult {
  matrix: MatrixInfo;
  runtimeS: number;
  opCounts: Record<string, number>;
}

export interface BenchSuiteConfig {
  sizes?: number[];
  sparsities?: number[];
  schemes?: SchemeName[];
  threadCounts?: number[];
  chunkSize?: number;
  engine?: EngineKind;
  noiseStd?: number;
  repeats?: number;
  seed?: number;
  epsilon?: number;
}

export interface BenchRecord {
  scheme: string;
  size: number;
  sparsity: number;
  threads: number;
  chunk_size: number;
  engine: string;
  repeat: number;
  runtime_s: number;
  ct_bytes: number;
  meta_bytes: number;
  mean_err: number;
  max_err: number;
  passed: boolean;
  op_counts: Record<string, number>;
}

export interface BenchSuiteResult {
  records: BenchRecord[];
  csv: string;
  allPassed: boolean;
}
