"""CLI behavior through click's runner."""

import json

import numpy as np
from click.testing import CliRunner

from fhesparse.cli import main
from fhesparse.matio import load_matrix, save_matrix


def test_bench_small_model_grid(tmp_path):
    runner = CliRunner()
    out = tmp_path / "res"
    r = runner.invoke(
        main,
        [
            "bench",
            "--sizes", "4",
            "--sparsities", "0.0,0.5,1.0",
            "--engine", "model",
            "--repeats", "1",
            "--seed", "3",
            "--out", str(out),
        ],
    )
    assert r.exit_code == 0, r.output
    assert (tmp_path / "res.csv").exists()
    assert (tmp_path / "res.json").exists()
    assert "all verifications passed" in r.output


def test_matmul_generated_operands_json():
    runner = CliRunner()
    r = runner.invoke(
        main,
        ["matmul", "--size", "3", "--seed", "5", "--sparsity", "0.3", "--scheme", "ellpack", "--engine", "model"],
    )
    assert r.exit_code == 0, r.output
    result = np.array(json.loads(r.output)["result"])
    from fhesparse.bench import generate_operands

    A, B = generate_operands(3, 0.3, 5)
    assert np.max(np.abs(result - A @ B)) < 1e-9


def test_matmul_from_files(tmp_path):
    A = np.array([[1.0, 2.0], [3.0, 4.0]])
    B = np.array([[1.0, 0.0], [0.0, 1.0]])
    save_matrix(A, tmp_path / "a.mat")
    save_matrix(B, tmp_path / "b.csv")
    out = tmp_path / "r.mat"
    runner = CliRunner()
    r = runner.invoke(
        main,
        [
            "matmul",
            "--lhs", str(tmp_path / "a.mat"),
            "--rhs", str(tmp_path / "b.csv"),
            "--engine", "model",
            "--out", str(out),
        ],
    )
    assert r.exit_code == 0, r.output
    assert np.array_equal(load_matrix(out), A)


def test_matmul_shape_error_exit_code(tmp_path):
    A = np.ones((2, 3))
    save_matrix(A, tmp_path / "a.mat")
    save_matrix(A, tmp_path / "b.mat")
    runner = CliRunner()
    r = runner.invoke(
        main,
        ["matmul", "--lhs", str(tmp_path / "a.mat"), "--rhs", str(tmp_path / "b.mat"), "--engine", "model"],
    )
    assert r.exit_code == 2
    assert "shape" in r.output


def test_bench_rejects_bad_scheme():
    runner = CliRunner()
    r = runner.invoke(main, ["bench", "--schemes", "cscc", "--engine", "model"])
    assert r.exit_code == 2
