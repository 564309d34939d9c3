import json

import numpy as np
from numpy.testing import assert_allclose

from purilab.io import (
    TOLERANCES,
    metadata,
    read_csv,
    unitary_from_json,
    unitary_to_json,
    write_csv,
    write_json,
    write_svg_scatter,
)


def test_csv_round_trip(tmp_path):
    meta = metadata({"p_w": 0.75}, 9)
    rows = [{"a": 0.1, "b": 1, "c": True}, {"a": float("nan"), "b": 2, "c": False}]
    path = tmp_path / "x.csv"
    write_csv(path, meta, ["a", "b", "c"], rows)
    got_meta, got = read_csv(path)
    assert got_meta["seed"] == "9"
    assert got_meta["config"] == {"p_w": 0.75}
    assert got_meta["tolerances"] == TOLERANCES
    assert float(got[0]["a"]) == 0.1
    assert got[1]["a"] == "nan"
    assert got[0]["c"] == "true"


def test_floats_survive_exactly(tmp_path):
    x = 1.0 / 3.0
    path = tmp_path / "x.csv"
    write_csv(path, metadata({}, 0), ["x"], [{"x": x}])
    assert float(read_csv(path)[1][0]["x"]) == x


def test_json_and_unitary_round_trip(tmp_path):
    u = np.exp(0.3j) * np.eye(4)
    path = tmp_path / "x.json"
    write_json(path, metadata({}, 1), {"u": unitary_to_json(u), "v": np.float64(np.nan)})
    data = json.loads(path.read_text())
    assert data["metadata"]["version"]
    assert data["v"] is None
    assert_allclose(unitary_from_json(data["u"]), u)


def test_svg_carries_metadata(tmp_path):
    path = tmp_path / "x.svg"
    write_svg_scatter(path, metadata({"scale": 0.1}, 3), [("pts", [0.6, 0.7], [0.5, 0.8])],
                      "P", "F", curves=[("c", [0.6, 0.7], [0.55, 0.85])], vlines=[0.65])
    text = path.read_text()
    assert text.startswith("<svg") or text.startswith("<?xml")
    assert '"scale": 0.1' in text
    assert text.count("<circle") == 2
    assert "<polyline" in text
