"""Boltzmann weights on enumerated ensembles and the conditioning identity."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..graph import CycleClass, Multigraph
from ..models import CycleWeightModel, w_minus
from .configs import DEFAULT_EDGE_CAP, EnsembleTable, enumerate_ecrsf


class MeasureUndefined(ValueError):
    pass


@dataclass
class ExactDistribution:
    """Probabilities over configurations keyed by their edge sets."""

    configs: list
    weights: list
    Z: float
    probs: np.ndarray

    def as_dict(self) -> dict:
        return {c.edges: float(p) for c, p in zip(self.configs, self.probs)}

    def prob(self, edges) -> float:
        return self.as_dict().get(frozenset(edges), 0.0)

    def edge_marginal(self, e) -> float:
        return float(sum(p for c, p in zip(self.configs, self.probs) if e in c.edges))


def config_weight(cfg, model: CycleWeightModel, g: Multigraph, exact: bool = False):
    """Product of class weights over the cycles of ``cfg`` (1 when there are none)."""
    w = Fraction(1) if exact else 1.0
    for cls in cfg.cycles:
        cw = model.class_weight(cls, g)
        w *= Fraction(cw) if exact else cw
    return w


def boltzmann(table: EnsembleTable, model: CycleWeightModel, exact: bool = False) -> ExactDistribution:
    g = table.graph
    weights = [config_weight(c, model, g, exact) for c in table.configs]
    Z = sum(weights, Fraction(0) if exact else 0.0)
    if Z <= 0:
        raise MeasureUndefined("measure undefined: partition function is 0")
    probs = [w / Z for w in weights]
    if not exact:
        probs = np.array(probs, dtype=float)
    return ExactDistribution(list(table.configs), weights, Z, probs)


# -- conditioning on heavy cycles ------------------------------------------------

@dataclass(frozen=True)
class ConditioningSpec:
    """Heavy cycle classes ``C``, their vertex set ``A`` and the light model."""

    C: frozenset
    A: frozenset
    model_minus: CycleWeightModel

    @classmethod
    def build(cls, C, model: CycleWeightModel, W=()) -> "ConditioningSpec":
        C = frozenset(C)
        A = frozenset(v for c in C for v in c.vertices)
        seen: set = set()
        for c in C:
            if seen & c.vertices:
                raise ValueError("conditioning cycles must be vertex-disjoint")
            seen |= c.vertices
        if A & frozenset(W):
            raise ValueError("conditioning cycles must avoid W")
        return cls(C, A, w_minus(model, None, frozenset(W) | A))


def heavy_cycles(cfg, model: CycleWeightModel, g: Multigraph) -> frozenset:
    return frozenset(c for c in cfg.cycles if model.is_positive_class(c, g))


def conditional_distribution(table: EnsembleTable, model: CycleWeightModel,
                             spec: ConditioningSpec, exact: bool = False) -> dict:
    """Law of F minus C given that the heavy cycles of F are exactly C, read
    straight from the table.  Keys are edge sets of F minus C."""
    g = table.graph
    c_edges = frozenset(e for c in spec.C for e in c.edges)
    num: dict = {}
    for cfg in table.configs:
        if heavy_cycles(cfg, model, g) != spec.C:
            continue
        num[cfg.edges - c_edges] = config_weight(cfg, model, g, exact)
    total = sum(num.values(), Fraction(0) if exact else 0.0)
    if total <= 0:
        raise MeasureUndefined("conditioning event has probability 0")
    return {k: v / total for k, v in num.items()}


def realizable_conditions(table: EnsembleTable, model: CycleWeightModel) -> list[frozenset]:
    g = table.graph
    found = {heavy_cycles(c, model, g) for c in table.configs}
    return sorted(found, key=lambda s: (len(s), sorted(repr(c.rep) for c in s)))


def verify_conditioning(g: Multigraph, model: CycleWeightModel, W=(), exact: bool = False,
                        cap: int = DEFAULT_EDGE_CAP) -> float:
    """Largest gap between the conditional law given C_+(F) = C and the
    wired light measure on W u A, over every realizable C."""
    W = frozenset(W)
    table = enumerate_ecrsf(g, W, cap)
    worst = Fraction(0) if exact else 0.0
    for C in realizable_conditions(table, model):
        spec = ConditioningSpec.build(C, model, W)
        try:
            lhs = conditional_distribution(table, model, spec, exact)
        except MeasureUndefined:
            continue
        rhs = boltzmann(enumerate_ecrsf(g, W | spec.A, cap), spec.model_minus, exact)
        rmap = dict(zip((c.edges for c in rhs.configs), rhs.probs))
        for k in set(lhs) | set(rmap):
            gap = abs(lhs.get(k, 0) - rmap.get(k, 0))
            if gap > worst:
                worst = gap
    return float(worst)


def class_on(classes, verts) -> CycleClass:
    """Pick the class among ``classes`` whose vertex set is ``verts``."""
    verts = frozenset(verts)
    hits = [c for c in classes if c.vertices == verts]
    if len(hits) != 1:
        raise ValueError(f"{len(hits)} cycle classes on {sorted(verts)}")
    return hits[0]
