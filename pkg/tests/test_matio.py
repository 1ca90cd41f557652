"""Matrix file interchange: binary header format and CSV fallback."""

import struct

import numpy as np
import pytest

from fhesparse.errors import CorruptionError
from fhesparse.matio import load_matrix, save_matrix


def test_binary_roundtrip(tmp_path):
    M = np.random.default_rng(0).standard_normal((3, 5))
    p = save_matrix(M, tmp_path / "m.mat")
    assert np.array_equal(load_matrix(p), M)


def test_binary_layout_is_header_plus_row_major_f8(tmp_path):
    M = np.array([[1.0, 2.0], [3.0, 4.0]])
    p = save_matrix(M, tmp_path / "m.mat")
    raw = p.read_bytes()
    assert struct.unpack("<II", raw[:8]) == (2, 2)
    assert np.frombuffer(raw[8:], dtype="<f8").tolist() == [1.0, 2.0, 3.0, 4.0]
    assert len(raw) == 8 + 4 * 8


def test_csv_roundtrip(tmp_path):
    M = np.random.default_rng(1).standard_normal((4, 2))
    p = save_matrix(M, tmp_path / "m.csv")
    assert np.allclose(load_matrix(p), M)


def test_single_row_csv(tmp_path):
    M = np.array([[1.0, 2.0, 3.0]])
    p = save_matrix(M, tmp_path / "row.csv")
    assert load_matrix(p).shape == (1, 3)


def test_truncated_binary_rejected(tmp_path):
    p = tmp_path / "bad.mat"
    p.write_bytes(b"\x02\x00\x00\x00\x02\x00\x00\x00" + b"\x00" * 8)
    with pytest.raises(CorruptionError):
        load_matrix(p)
