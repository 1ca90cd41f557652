"""Command-line interface.

``bench`` runs the profiling procedure in-process and writes CSV/JSON;
``matmul`` multiplies two matrices (generated from a seed or loaded from
files), either in-process or against a running service with ``--server``;
``serve`` starts the HTTP service.
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from .bench import BenchConfig, all_passed, emit_report, generate_operands, run_suite
from .ckks.engine import CkksEngine
from .errors import FheError
from .matio import load_matrix, save_matrix
from .matrix import decrypt_matrix, encrypt_matrix
from .model_engine import ModelConfig, ModelEngine
from .schemes import SCHEME_LAYOUT, SchemeId, matmul as run_matmul

SCHEME_NAMES = [s.value for s in SchemeId]


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _make_engine(engine: str, seed: int, noise_std: float):
    if engine == "model":
        return ModelEngine(ModelConfig(noise_std=noise_std, rng_seed=seed))
    return CkksEngine(seed=seed)


@click.group()
def main() -> None:
    """Sparse encrypted matrix multiplication toolkit."""


@main.command()
@click.option("--sizes", default="8", show_default=True, help="Comma-separated square sizes.")
@click.option(
    "--sparsities",
    default="0.0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0",
    show_default=True,
    help="Comma-separated sparsity levels in [0, 1].",
)
@click.option(
    "--schemes",
    default=",".join(SCHEME_NAMES),
    show_default=True,
    help=f"Subset of: {', '.join(SCHEME_NAMES)}.",
)
@click.option("--threads", default="1", show_default=True, help="Comma-separated thread counts.")
@click.option("--chunk-size", default=1, show_default=True, type=int)
@click.option("--engine", default="ckks", show_default=True, type=click.Choice(["model", "ckks"]))
@click.option("--noise-std", default=0.0, show_default=True, type=float)
@click.option("--repeats", default=3, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--epsilon", default=1e-3, show_default=True, type=float)
@click.option("--out", default="bench_results", show_default=True, help="Output base path.")
def bench(sizes, sparsities, schemes, threads, chunk_size, engine, noise_std, repeats, seed, epsilon, out):
    """Run the profiling suite; exit code 0 iff every verification passed."""
    try:
        cfg = BenchConfig(
            sizes=_parse_int_list(sizes),
            sparsities=_parse_float_list(sparsities),
            schemes=tuple(SchemeId(s.strip()) for s in schemes.split(",") if s.strip()),
            thread_counts=_parse_int_list(threads),
            chunk_size=chunk_size,
            engine=engine,
            noise_std=noise_std,
            repeats=repeats,
            seed=seed,
            epsilon=epsilon,
        )
        records = run_suite(cfg)
        csv_path, json_path = emit_report(records, cfg, out)
    except (FheError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    ok = all_passed(records)
    click.echo(f"{len(records)} records -> {csv_path}, {json_path}")
    click.echo("all verifications passed" if ok else "VERIFICATION FAILURES present")
    sys.exit(0 if ok else 1)


@main.command()
@click.option("--lhs", type=click.Path(exists=True), default=None, help="Left operand file.")
@click.option("--rhs", type=click.Path(exists=True), default=None, help="Right operand file.")
@click.option("--size", default=4, show_default=True, type=int, help="Generated operand size.")
@click.option("--sparsity", default=0.0, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--scheme", default="dense", show_default=True, type=click.Choice(SCHEME_NAMES))
@click.option("--engine", default="model", show_default=True, type=click.Choice(["model", "ckks"]))
@click.option("--chunk-size", default=1, show_default=True, type=int)
@click.option("--threads", default=1, show_default=True, type=int)
@click.option("--noise-std", default=0.0, show_default=True, type=float)
@click.option("--out", type=click.Path(), default=None, help="Write result matrix to file.")
@click.option("--server", default=None, help="Delegate to a running service at this base URL.")
def matmul(lhs, rhs, size, sparsity, seed, scheme, engine, chunk_size, threads, noise_std, out, server):
    """Encrypt, multiply and decrypt one pair of matrices; print result as JSON."""
    try:
        if lhs and rhs:
            A, B = load_matrix(lhs), load_matrix(rhs)
        else:
            A, B = generate_operands(size, sparsity, seed)
        if server:
            result = _remote_matmul(server, A, B, scheme, engine, chunk_size, threads, seed, noise_std)
        else:
            eng = _make_engine(engine, seed, noise_std)
            scheme_id = SchemeId(scheme)
            layout = SCHEME_LAYOUT[scheme_id]
            el = encrypt_matrix(A, chunk_size, layout, eng)
            er = encrypt_matrix(B, chunk_size, layout, eng)
            result = decrypt_matrix(run_matmul(el, er, scheme_id, eng, threads=threads), eng)
    except FheError as exc:
        click.echo(f"error [{exc.category}]: {exc}", err=True)
        sys.exit(2)
    if out:
        save_matrix(result, out)
        click.echo(f"result written to {out}")
    else:
        click.echo(json.dumps({"result": np.asarray(result).tolist()}))


def _remote_matmul(base, A, B, scheme, engine, chunk_size, threads, seed, noise_std):
    import httpx

    layout = SCHEME_LAYOUT[SchemeId(scheme)].value
    with httpx.Client(base_url=base, timeout=None) as client:
        eng = client.post(
            "/engines", json={"engine": engine, "seed": seed, "noise_std": noise_std}
        )
        eng.raise_for_status()
        engine_id = eng.json()["engine_id"]
        try:
            ids = []
            for M in (A, B):
                r = client.post(
                    f"/engines/{engine_id}/matrices",
                    json={"values": M.tolist(), "layout": layout, "chunk_size": chunk_size},
                )
                r.raise_for_status()
                ids.append(r.json()["matrix_id"])
            r = client.post(
                f"/engines/{engine_id}/matmul",
                json={"lhs_id": ids[0], "rhs_id": ids[1], "scheme": scheme, "threads": threads},
            )
            r.raise_for_status()
            rid = r.json()["matrix"]["matrix_id"]
            r = client.post(f"/engines/{engine_id}/matrices/{rid}/decrypt")
            r.raise_for_status()
            return np.asarray(r.json()["values"])
        finally:
            client.delete(f"/engines/{engine_id}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8780, show_default=True, type=int)
def serve(host, port):
    """Start the HTTP service."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
