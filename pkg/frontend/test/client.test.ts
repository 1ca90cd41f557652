import { execFile } from "node:child_process";
import { promisify } from "node:util";
import { describe, expect, inject, it } from "vitest";

import { FheSparseClient, FheSparseError } from "../src/index.js";

const run = promisify(execFile);
const baseUrl = () => inject("baseUrl" as never) as string;

async function coreCliMatmul(args: string[]): Promise<number[][]> {
  const { stdout } = await run("python3", ["-m", "fhesparse.cli", "matmul", ...args]);
  return JSON.parse(stdout).result as number[][];
}

describe("service health", () => {
  it("responds", async () => {
    const client = new FheSparseClient(baseUrl());
    const health = await client.health();
    expect(health.status).toBe("ok");
  });
});

describe("bindings fidelity", () => {
  it("4x4 matmul matches the core CLI element-for-element on a fixed seed", async () => {
    const seed = 9;
    const expected = await coreCliMatmul([
      "--size", "4",
      "--seed", String(seed),
      "--sparsity", "0.25",
      "--scheme", "csr",
      "--engine", "model",
    ]);

    const client = new FheSparseClient(baseUrl());
    const ops = await client.generateOperands(4, 0.25, seed);
    const engine = await client.createEngine({ engine: "model", seed });
    try {
      const lhs = await engine.encryptMatrix(ops.lhs, "csr");
      const rhs = await engine.encryptMatrix(ops.rhs, "csr");
      const product = await engine.matmul(lhs, rhs, "csr");
      const got = await product.handle.decrypt();
      expect(got.length).toBe(4);
      for (let i = 0; i < 4; i++) {
        for (let j = 0; j < 4; j++) {
          expect(got[i][j]).toBe(expected[i][j]);
        }
      }
    } finally {
      await engine.drop();
    }
  });

  it("every scheme agrees with the CLI on the same operands", async () => {
    const client = new FheSparseClient(baseUrl());
    for (const scheme of ["dense", "naive", "ellpack"] as const) {
      const layout = scheme === "dense" ? "dense" : scheme === "naive" ? "binary_mask" : "ellpack";
      const expected = await coreCliMatmul([
        "--size", "3",
        "--seed", "21",
        "--sparsity", "0.4",
        "--scheme", scheme,
        "--engine", "model",
      ]);
      const ops = await client.generateOperands(3, 0.4, 21);
      const engine = await client.createEngine({ engine: "model", seed: 21 });
      try {
        const lhs = await engine.encryptMatrix(ops.lhs, layout);
        const rhs = await engine.encryptMatrix(ops.rhs, layout);
        const product = await engine.matmul(lhs, rhs, scheme);
        const got = await product.handle.decrypt();
        expect(got).toEqual(expected);
      } finally {
        await engine.drop();
      }
    }
  });

  it("rejects invalid scheme names with the mapped error category", async () => {
    const client = new FheSparseClient(baseUrl());
    const engine = await client.createEngine({ engine: "model" });
    try {
      const m = await engine.encryptMatrix([[1, 2], [3, 4]]);
      await expect(
        engine.matmul(m, m, "cscc" as never),
      ).rejects.toMatchObject({ name: "FheSparseError", category: "parameter" });
    } finally {
      await engine.drop();
    }
  });

  it("maps shape errors", async () => {
    const client = new FheSparseClient(baseUrl());
    const engine = await client.createEngine({ engine: "model" });
    try {
      const a = await engine.encryptMatrix([[1, 2, 3]]);
      const b = await engine.encryptMatrix([[1, 2, 3]]);
      await expect(engine.matmul(a, b, "dense")).rejects.toSatisfy(
        (e: unknown) => e instanceof FheSparseError && e.category === "shape",
      );
    } finally {
      await engine.drop();
    }
  });

  it("reports matrix metadata through encryption info", async () => {
    const client = new FheSparseClient(baseUrl());
    const engine = await client.createEngine({ engine: "model" });
    try {
      const m = await engine.encryptMatrix(
        [
          [1, 0],
          [0, 2],
        ],
        "csr",
        1,
      );
      expect(m.info.chunkCount).toBe(2);
      expect(m.info.ciphertextBytes).toBeGreaterThan(0);
      expect(m.info.metadataBytes).toBe(8 * (3 + 2));
    } finally {
      await engine.drop();
    }
  });

  it("runs a small bench suite through the bindings", async () => {
    const client = new FheSparseClient(baseUrl());
    const result = await client.runSuite({
      sizes: [3],
      sparsities: [0.0, 1.0],
      engine: "model",
      repeats: 1,
      seed: 1,
    });
    expect(result.allPassed).toBe(true);
    expect(result.records.length).toBe(2 * 4);
    expect(result.csv.startsWith("scheme,size,sparsity")).toBe(true);
    for (const record of result.records) {
      expect(record.max_err).toBeLessThan(1e-3);
    }
  });

  it("dropped engines become unreachable", async () => {
    const client = new FheSparseClient(baseUrl());
    const engine = await client.createEngine({ engine: "model" });
    await engine.drop();
    await expect(engine.encryptMatrix([[1]])).rejects.toMatchObject({
      category: "not-found",
      status: 404,
    });
  });
});
