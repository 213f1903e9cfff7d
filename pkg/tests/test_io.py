import json

import pytest
from hypothesis import given

from conftest import small_graphs
from crsf.graph import box_graph, grid_graph
from crsf.io import (graph_from_dict, graph_to_dict, load_graph, load_model, model_from_dict,
                     save_json)
from crsf.models import CycleWeightModel as M, ModelError, w_minus


@given(small_graphs())
def test_graph_round_trip(g):
    h = graph_from_dict(json.loads(json.dumps(graph_to_dict(g))))
    assert h.vertices == g.vertices
    assert h.edges == g.edges


def test_coords_round_trip(tmp_path):
    for g in (grid_graph(2, 3), box_graph((0, 0), (2, 1), self_loops=True)):
        save_json(graph_to_dict(g), tmp_path / "g.json")
        h = load_graph(tmp_path / "g.json")
        assert h.edges == g.edges
        assert h.coords == g.coords


def test_model_files(tmp_path):
    g = box_graph((0, 0), (1, 1), self_loops=True)
    doc = {"family": "vertex_rooting", "params": {"q": {"[0, 0]": 0.5, "[1, 1]": 0.25}}}
    save_json(doc, tmp_path / "m.json")
    m = load_model(tmp_path / "m.json", g)
    assert m.params["q"] == {(0, 0): 0.5, (1, 1): 0.25}
    wm = model_from_dict({"family": "w_minus", "params": {"base": {"family": "plaquette",
                                                                    "params": {"alpha": 0.5}},
                                                          "boundary": [[0, 0]]}}, g)
    assert wm == w_minus(M.plaquette(0.5), g, {(0, 0)})
    t = model_from_dict({"family": "explicit_table",
                         "params": {"table": [[[0, 1, 2], 0.5], [[0, 1], 0.25, ["a", "b"]]]}})
    assert t.params["table"] == {(0, 1, 2): 0.5}


def test_malformed_documents():
    with pytest.raises(ValueError):
        graph_from_dict({"vertices": [0]})
    with pytest.raises(ValueError):
        model_from_dict({"params": {}})
    with pytest.raises(ModelError):
        model_from_dict({"family": "nope"})
