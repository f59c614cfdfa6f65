import json
import math

import numpy as np
import pytest

from carrier_lab import generators, io
from carrier_lab.errors import FormatVersionMismatch, MissingPositions, SchemaViolation


def test_tri3_round_trip(tri3):
    text = io.dumps_graph(tri3)
    assert io.dumps_graph(io.loads_graph(text)) == text
    assert io.dumps_graph(io.loads_graph(text).to_graph()) == text


def test_packing_round_trip(k4):
    _, p = k4
    text = io.dumps_packing(p)
    q = io.loads_packing(text)
    assert io.dumps_packing(q) == text
    assert np.array_equal(q.radius, p.radius)


def test_combinatorial_file_round_trip():
    t = generators.generate_hyperbolic(7, 2)
    doc = io.loads_graph(io.dumps_graph(t))
    assert doc.positions is None
    assert doc.to_triangulation().boundary == t.boundary
    with pytest.raises(MissingPositions):
        doc.to_graph()


def test_wrong_format_tag(tri3):
    d = json.loads(io.dumps_graph(tri3))
    d["format"] = "carrier-graph/2"
    with pytest.raises(FormatVersionMismatch):
        io.loads_graph(json.dumps(d))


def test_schema_errors(tri3):
    d = json.loads(io.dumps_graph(tri3))
    d["edges"][0]["u"] = 99
    with pytest.raises(SchemaViolation):
        io.loads_graph(json.dumps(d))
    with pytest.raises(SchemaViolation):
        io.loads_graph("{not json")
    d = json.loads(io.dumps_graph(tri3))
    del d["vertices"][0]["x"]
    with pytest.raises(SchemaViolation):
        io.loads_graph(json.dumps(d))


def test_missing_weight_defaults_with_warning(tri3):
    d = json.loads(io.dumps_graph(tri3))
    del d["edges"][1]["w"]
    with pytest.warns(UserWarning):
        doc = io.loads_graph(json.dumps(d))
    assert doc.edges[1][2] == 1.0


def test_sparse_ids_become_dense():
    text = json.dumps({"format": io.GRAPH_FORMAT,
                       "vertices": [{"id": 10, "x": 0.0, "y": 0.0}, {"id": 30, "x": 1.0, "y": 0.0},
                                    {"id": 20, "x": 0.5, "y": 0.8}],
                       "edges": [{"u": 10, "v": 30, "w": 1.0}, {"u": 30, "v": 20, "w": 2.0},
                                 {"u": 20, "v": 10, "w": 1.0}]})
    doc = io.loads_graph(text)
    assert doc.edges == [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 2.0)]
    assert np.allclose(doc.positions[1], (0.5, 0.8))


def test_floats_keep_full_precision():
    assert float(io.fmt(math.pi)) == math.pi
    assert io.fmt(3) == "3.0"
    with pytest.raises(SchemaViolation):
        io.fmt(math.nan)


def test_report_handles_numpy_and_nonfinite():
    text = io.dumps_report({"a": np.float64(1.5), "b": np.arange(3), "c": math.inf, "d": np.bool_(True)})
    assert json.loads(text) == {"a": 1.5, "b": [0, 1, 2], "c": "inf", "d": True}


def test_csv(tmp_path):
    io.write_csv(tmp_path / "x.csv", ["a", "b"], [(1, 0.1), (2, 1 / 3)])
    assert (tmp_path / "x.csv").read_text() == "a,b\n1,0.1\n2,0.3333333333333333\n"
