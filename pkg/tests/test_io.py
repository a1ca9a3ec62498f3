import json

import numpy as np
import pytest

from fastadjoint import io


@pytest.mark.parametrize("bits", [8, 16])
def test_pgm_round_trip(tmp_path, bits):
    img = np.random.default_rng(0).random((5, 7))
    lo, hi = io.write_pgm(tmp_path / "a.pgm", img, bits)
    back = io.read_pgm(tmp_path / "a.pgm")
    assert back.shape == (5, 7)
    maxval = 2 ** bits - 1
    np.testing.assert_allclose(lo + back * (hi - lo), img, atol=(hi - lo) / maxval)


def test_pgm_header_with_comment(tmp_path):
    raw = b"P5\n# made by hand\n3 2\n255\n" + bytes([0, 51, 255, 10, 20, 30])
    (tmp_path / "c.pgm").write_bytes(raw)
    np.testing.assert_allclose(io.read_pgm(tmp_path / "c.pgm"),
                               np.array([[0, 51, 255], [10, 20, 30]]) / 255)


@pytest.mark.parametrize("raw", [b"P2\n1 1\n255\n0", b"P5\n2 2\n255\n\x00", b"P5\n2"])
def test_pgm_rejects_bad_files(tmp_path, raw):
    (tmp_path / "bad.pgm").write_bytes(raw)
    with pytest.raises(ValueError):
        io.read_pgm(tmp_path / "bad.pgm")


def test_signal_csv_round_trip_is_exact(tmp_path):
    v = np.random.default_rng(1).standard_normal(20)
    io.write_signal_csv(tmp_path / "s.csv", v)
    np.testing.assert_array_equal(io.read_signal_csv(tmp_path / "s.csv"), v)


def test_signal_csv_errors(tmp_path):
    (tmp_path / "two.csv").write_text("1,2\n")
    with pytest.raises(ValueError, match="one column"):
        io.read_signal_csv(tmp_path / "two.csv")
    (tmp_path / "word.csv").write_text("1\nabc\n")
    with pytest.raises(ValueError, match="not a number"):
        io.read_signal_csv(tmp_path / "word.csv")
    (tmp_path / "empty.csv").write_text("")
    with pytest.raises(ValueError):
        io.read_signal_csv(tmp_path / "empty.csv")


def test_json_is_versioned_and_sorted(tmp_path):
    io.write_json(tmp_path / "r.json", {"b": np.float64(0.1), "a": [np.int64(2), float("nan")],
                                        "arr": np.arange(2)})
    text = (tmp_path / "r.json").read_text()
    data = json.loads(text)
    assert data == {"schema": 1, "a": [2, None], "arr": [0, 1], "b": 0.1}
    assert text.index('"a"') < text.index('"b"') < text.index('"schema"')


def test_table_csv_blanks_missing(tmp_path):
    io.write_table_csv(tmp_path / "t.csv", ["k", "v", "w"], [[0, 0.5, None], [1, float("nan"), 2.0]])
    assert (tmp_path / "t.csv").read_text() == "k,v,w\n0,0.5,\n1,,2.0\n"
