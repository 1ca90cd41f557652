import { spawn, type ChildProcess } from "node:child_process";

let server: ChildProcess | undefined;

async function waitForHealth(base: string, timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${base}/health`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 300));
  }
  throw new Error(`service at ${base} did not become healthy in ${timeoutMs}ms`);
}

export default async function setup({ provide }: { provide: (k: string, v: unknown) => void }) {
  const port = 21000 + Math.floor(Math.random() * 20000);
  const base = `http://127.0.0.1:${port}`;
  server = spawn("python3", ["-m", "fhesparse.cli", "serve", "--port", String(port)], {
    stdio: ["ignore", "inherit", "inherit"],
  });
  await waitForHealth(base, 120_000);
  provide("baseUrl", base);
  return () => {
    server?.kill("SIGTERM");
  };
}
