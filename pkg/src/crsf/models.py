"""Cycle weight models and their encoding for the sampling kernels."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .graph import CycleClass, LatticeView, Multigraph, OrientedCycle

FAMILIES = ("zero", "plaquette", "length_decay", "vertex_rooting", "explicit_table", "w_minus")


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class CycleWeightModel:
    """Nonnegative weight on oriented simple cycles.

    ``family`` is one of ``zero``, ``plaquette`` (``alpha`` on each oriented
    elementary square), ``length_decay`` (``exp(-kappa * len)``),
    ``vertex_rooting`` (``q`` on self-loops; a number or a vertex map),
    ``explicit_table`` (canonical vertex tuple, or ``(vertices, edges)``
    pair, to weight) and ``w_minus`` (a base model with heavy classes and
    cycles through ``boundary`` zeroed).
    """

    family: str
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ModelError(f"unknown family {self.family!r}")
        p = self.params
        if self.family == "plaquette" and not p.get("alpha", -1) >= 0:
            raise ModelError("plaquette needs alpha >= 0")
        if self.family == "length_decay" and "kappa" not in p:
            raise ModelError("length_decay needs kappa")
        if self.family == "vertex_rooting":
            q = p.get("q")
            vals = q.values() if isinstance(q, Mapping) else [q]
            if any(v is None or v < 0 for v in vals):
                raise ModelError("vertex_rooting needs q >= 0")
        if self.family == "explicit_table":
            if any(w < 0 for w in p.get("table", {}).values()):
                raise ModelError("table weights must be nonnegative")
            if any(w < 0 for w in p.get("edge_table", {}).values()):
                raise ModelError("table weights must be nonnegative")

    # -- constructors ---------------------------------------------------------
    @classmethod
    def zero(cls):
        return cls("zero", {})

    @classmethod
    def plaquette(cls, alpha: float):
        return cls("plaquette", {"alpha": float(alpha)})

    @classmethod
    def length_decay(cls, kappa: float):
        return cls("length_decay", {"kappa": float(kappa)})

    @classmethod
    def vertex_rooting(cls, q):
        return cls("vertex_rooting", {"q": q if isinstance(q, Mapping) else float(q)})

    @classmethod
    def table(cls, entries: Mapping, edge_entries: Mapping | None = None):
        """``entries`` maps vertex sequences to weights (any rotation); the
        optional ``edge_entries`` maps ``(vertices, edges)`` pairs to weights
        and takes precedence, which is how parallel edges are told apart."""
        table = {_canon_verts(k): float(w) for k, w in entries.items()}
        etable = {}
        for (verts, edges), w in (edge_entries or {}).items():
            c = OrientedCycle.make(verts, edges)
            etable[(c.vertices, c.edges)] = float(w)
        return cls("explicit_table", {"table": table, "edge_table": etable})

    # -- weights --------------------------------------------------------------
    def weight(self, cycle: OrientedCycle, graph=None) -> float:
        f, p = self.family, self.params
        L = len(cycle)
        if f == "zero":
            return 0.0
        if f == "plaquette":
            if L != 4:
                return 0.0
            if isinstance(graph, LatticeView):
                pts = list(cycle.vertices)
            elif graph is None or graph.coords is None:
                raise ModelError("plaquette weights need vertex coordinates")
            else:
                pts = [graph.coords[v] for v in cycle.vertices]
            return p["alpha"] if _is_unit_square(pts) else 0.0
        if f == "length_decay":
            return math.exp(-p["kappa"] * L)
        if f == "vertex_rooting":
            if L != 1:
                return 0.0
            q = p["q"]
            return float(q.get(cycle.vertices[0], 0.0)) if isinstance(q, Mapping) else q
        if f == "explicit_table":
            w = p["edge_table"].get((cycle.vertices, cycle.edges))
            if w is None:
                w = p["table"].get(cycle.vertices, 0.0)
            return w
        # w_minus
        base: CycleWeightModel = p["base"]
        if set(cycle.vertices) & p["boundary"]:
            return 0.0
        rev = cycle.reverse()
        if base.weight(cycle, graph) > 1 or base.weight(rev, graph) > 1:
            return 0.0
        return base.weight(cycle, graph)

    def class_weight(self, cls: CycleClass, graph=None) -> float:
        """w(gamma) + w(gamma^-1); a self-loop counts its single
        orientation twice."""
        a, b = cls.orientations()
        return self.weight(a, graph) + self.weight(b, graph)

    def is_positive_class(self, cls: CycleClass, graph=None) -> bool:
        """A class is heavy when either orientation weighs more than 1."""
        a, b = cls.orientations()
        return self.weight(a, graph) > 1 or self.weight(b, graph) > 1

    def max_weight(self) -> float:
        f, p = self.family, self.params
        if f == "zero":
            return 0.0
        if f == "plaquette":
            return p["alpha"]
        if f == "length_decay":
            return math.exp(-p["kappa"])
        if f == "vertex_rooting":
            q = p["q"]
            return max(q.values(), default=0.0) if isinstance(q, Mapping) else q
        if f == "explicit_table":
            return max(list(p["table"].values()) + list(p["edge_table"].values()), default=0.0)
        return min(1.0, p["base"].max_weight())

    @property
    def bounded(self) -> bool:
        """Range flag: all weights <= 1, so the random-walk sampler applies."""
        if self.family == "w_minus":
            return True
        return self.max_weight() <= 1.0

    def scaled(self, c: float) -> "CycleWeightModel":
        """The model c*w."""
        return _Scaled(self, c)

    def to_json(self) -> dict:
        f, p = self.family, self.params
        if f == "explicit_table":
            rows = [[_plain(k), w] for k, w in p["table"].items()]
            rows += [[_plain(k[0]), w, _plain(k[1])] for k, w in p["edge_table"].items()]
            return {"family": f, "params": {"table": rows}}
        if f == "vertex_rooting" and isinstance(p["q"], Mapping):
            return {"family": f, "params": {"q": {json.dumps(_plain(k)): v for k, v in p["q"].items()}}}
        if f == "w_minus":
            return {"family": f, "params": {"base": p["base"].to_json(),
                                            "boundary": [_plain(v) for v in sorted(p["boundary"], key=repr)]}}
        return {"family": f, "params": dict(p)}


class _Scaled(CycleWeightModel):
    """c * base, used for covariance checks."""

    def __init__(self, base: CycleWeightModel, c: float):
        object.__setattr__(self, "family", "explicit_table")
        object.__setattr__(self, "params", {"table": {}, "edge_table": {}})
        object.__setattr__(self, "_base", base)
        object.__setattr__(self, "_c", float(c))

    def weight(self, cycle, graph=None):
        return self._c * self._base.weight(cycle, graph)

    def max_weight(self):
        return self._c * self._base.max_weight()


def _plain(v):
    return [_plain(t) for t in v] if isinstance(v, tuple) else v


def _canon_verts(verts) -> tuple:
    verts = tuple(verts)
    r = min(range(len(verts)), key=lambda i: verts[i])
    return verts[r:] + verts[:r]


def _is_unit_square(pts) -> bool:
    xs = sorted({x for x, _ in pts})
    ys = sorted({y for _, y in pts})
    if len(xs) != 2 or len(ys) != 2 or xs[1] - xs[0] != 1 or ys[1] - ys[0] != 1:
        return False
    return len(set(map(tuple, pts))) == 4


def w_minus(model: CycleWeightModel, g: Multigraph | None = None, W=()) -> CycleWeightModel:
    """Equal to ``model`` on light cycles avoiding ``W``; zero on heavy
    classes (either orientation > 1) and on cycles through ``W``."""
    if model.family == "w_minus":
        base, bnd = model.params["base"], set(model.params["boundary"]) | set(W)
        return CycleWeightModel("w_minus", {"base": base, "boundary": frozenset(bnd)})
    return CycleWeightModel("w_minus", {"base": model, "boundary": frozenset(W)})


# -- kernel encodings ---------------------------------------------------------

@dataclass
class KernelModel:
    """Flat description of a model for the compiled/fallback kernels.

    Weight of a closed loop of length L: a backtrack along one edge is 0;
    otherwise ``callback`` if set; else ``selfloop_w[v]`` for L == 1;
    ``len_w[L]`` inside the table; ``exp(-kappa L)`` beyond it when
    ``kappa`` is not NaN; 0 otherwise.
    """

    len_w: np.ndarray
    kappa: float
    selfloop_w: np.ndarray
    callback: Callable | None = None


LEN_TABLE = 64


def encode_finite(model: CycleWeightModel, g: Multigraph) -> KernelModel:
    if not model.bounded:
        raise ModelError("sampler needs a model bounded by one; use w_minus / conditioned sampling")
    len_w = np.zeros(LEN_TABLE)
    selfloop_w = np.zeros(g.n)
    kappa = math.nan
    f, p = model.family, model.params
    simple = type(model) is CycleWeightModel
    if simple and f == "zero":
        pass
    elif simple and f == "length_decay":
        kappa = p["kappa"]
        len_w[1:] = np.exp(-kappa * np.arange(1, LEN_TABLE))
        selfloop_w[:] = math.exp(-kappa)
    elif simple and f == "vertex_rooting":
        q = p["q"]
        for i, v in enumerate(g.vertices):
            selfloop_w[i] = q.get(v, 0.0) if isinstance(q, Mapping) else q
    elif simple and f == "plaquette" and g.is_lattice_embedded():
        len_w[4] = p["alpha"]
    else:
        return KernelModel(len_w, kappa, selfloop_w, _finite_callback(model, g))
    return KernelModel(len_w, kappa, selfloop_w, None)


def _finite_callback(model: CycleWeightModel, g: Multigraph):
    cache: dict = {}
    verts, edges = g.vertices, g.edges

    def cb(vidx, eidx):
        key = (tuple(vidx), tuple(eidx))
        w = cache.get(key)
        if w is None:
            c = OrientedCycle.make([verts[i] for i in vidx], [edges[k][0] for k in eidx])
            w = cache[key] = float(model.weight(c, g))
        return w

    return cb


def encode_lattice(model: CycleWeightModel, lattice: LatticeView) -> tuple[np.ndarray, float, float]:
    """(len_w, kappa, self-loop weight) for the Z^2 kernels."""
    if not model.bounded:
        raise ModelError("sampler needs a model bounded by one")
    f, p = model.family, model.params
    len_w = np.zeros(LEN_TABLE)
    kappa = math.nan
    q = 0.0
    if type(model) is not CycleWeightModel:
        raise ModelError("lattice kernels support zero/plaquette/length_decay/vertex_rooting")
    if f == "zero":
        pass
    elif f == "plaquette":
        len_w[4] = p["alpha"]
    elif f == "length_decay":
        kappa = p["kappa"]
        len_w[1:] = np.exp(-kappa * np.arange(1, LEN_TABLE))
        q = math.exp(-kappa)
    elif f == "vertex_rooting":
        if isinstance(p["q"], Mapping):
            raise ModelError("lattice vertex_rooting needs a constant q")
        q = p["q"]
    else:
        raise ModelError(f"family {f!r} is not supported on the lattice")
    if q > 0 and not lattice.self_loops:
        q = 0.0
    len_w[1] = q
    return len_w, kappa, q
