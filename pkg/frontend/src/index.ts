export { EngineHandle, FheSparseClient, MatrixHandle, type Matrix } from "./client.js";
export { FheSparseError } from "./errors.js";
export type {
  BenchRecord,
  BenchSuiteConfig,
  BenchSuiteResult,
  EngineInfo,
  EngineKind,
  EngineOptions,
  MatmulResult,
  MatrixInfo,
  MatrixLayout,
  SchemeName,
} from "./types.js";
