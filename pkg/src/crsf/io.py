"""JSON graph and weight-model files.

Graph file::

    {"vertices": [0, 1, ...], "edges": [[id, u, v], ...], "coords": {"0": [x, y]}}

Lattice vertices may be written as ``[x, y]`` pairs; they load as tuples.
Model file::

    {"family": "plaquette", "params": {"alpha": 0.5}}

with ``q`` maps keyed by the vertex as written in the graph file, and
``table`` rows ``[vertices, weight]`` or ``[vertices, weight, edges]``.
"""

from __future__ import annotations

import json
from pathlib import Path

from .graph import Multigraph
from .models import CycleWeightModel, ModelError, w_minus


def _vid(v):
    return tuple(_vid(t) for t in v) if isinstance(v, list) else v


def _plain(v):
    return [_plain(t) for t in v] if isinstance(v, tuple) else v


def _key(v) -> str:
    return json.dumps(_plain(v))


def graph_from_dict(d: dict) -> Multigraph:
    try:
        verts = [_vid(v) for v in d["vertices"]]
        edges = [(_vid(e), _vid(u), _vid(v)) for e, u, v in d["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed graph document: {exc}") from None
    coords = None
    if "coords" in d:
        lookup = {_key(v): v for v in verts}
        coords = {lookup[k]: tuple(c) for k, c in d["coords"].items()}
    elif verts and all(isinstance(v, tuple) and len(v) == 2 for v in verts):
        coords = {v: v for v in verts}
    return Multigraph(verts, edges, coords=coords)


def graph_to_dict(g: Multigraph) -> dict:
    out = {"vertices": [_plain(v) for v in g.vertices],
           "edges": [[_plain(e), _plain(u), _plain(v)] for e, u, v in g.edges]}
    if g.coords is not None and not all(g.coords[v] == v for v in g.vertices):
        out["coords"] = {_key(v): list(c) for v, c in g.coords.items()}
    return out


def model_from_dict(d: dict, g: Multigraph | None = None) -> CycleWeightModel:
    if "family" not in d:
        raise ValueError("model document needs 'family'")
    fam, p = d["family"], d.get("params", {})
    lookup = {_key(v): v for v in g.vertices} if g is not None else {}

    def vertex(k):
        if k in lookup:
            return lookup[k]
        try:
            return _vid(json.loads(k))
        except json.JSONDecodeError:
            return k

    if fam == "zero":
        return CycleWeightModel.zero()
    if fam == "plaquette":
        return CycleWeightModel.plaquette(p["alpha"])
    if fam == "length_decay":
        return CycleWeightModel.length_decay(p["kappa"])
    if fam == "vertex_rooting":
        q = p["q"]
        if isinstance(q, dict):
            q = {vertex(k): float(w) for k, w in q.items()}
        return CycleWeightModel.vertex_rooting(q)
    if fam == "explicit_table":
        plain, edged = {}, {}
        for row in p.get("table", []):
            verts = [_vid(v) for v in row[0]]
            if len(row) > 2:
                edged[(tuple(verts), tuple(_vid(e) for e in row[2]))] = row[1]
            else:
                plain[tuple(verts)] = row[1]
        return CycleWeightModel.table(plain, edged)
    if fam == "w_minus":
        base = model_from_dict(p["base"], g)
        return w_minus(base, g, [_vid(v) for v in p.get("boundary", [])])
    raise ModelError(f"unknown family {fam!r}")


def load_json(path) -> dict:
    with open(Path(path)) as fh:
        return json.load(fh)


def load_graph(path) -> Multigraph:
    return graph_from_dict(load_json(path))


def load_model(path, g: Multigraph | None = None) -> CycleWeightModel:
    return model_from_dict(load_json(path), g)


def save_json(obj, path) -> None:
    with open(Path(path), "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")
