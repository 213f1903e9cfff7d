"""Command line entry point.

Every subcommand accepts ``--config run.json``, whose keys are the long
flag names with dashes replaced by underscores; flags given on the command
line override the file.  Each run writes its primary output to ``--out``
(CSV), optional plot data to ``--plotdata`` (JSON with x/y/lo/hi series)
and a manifest (config hash, seed, versions, wall time, step and
exhaustion counts) next to the CSV or to ``--manifest``.

Exit codes: 0 success, 2 invalid configuration, 3 too many step-cap
exhaustions, 4 a checked property failed.
"""

from __future__ import annotations

import argparse
import ast
import csv
import hashlib
import io
import json
import math
import os
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

from . import _backend
from .errors import SamplerConfigError, StepCapExceeded
from .exact import (EnumerationRefused, MeasureUndefined, boltzmann, class_on, enumerate_crsf,
                    enumerate_ecrsf, verify_conditioning)
from .exhaustion import AssumptionViolation, ExhaustionSpec, OrderingSpec, check_assumptions
from .graph import GraphError, LatticeView, Multigraph, enumerate_cycle_classes
from .io import graph_from_dict, load_json, model_from_dict
from .models import CycleWeightModel, ModelError
from .parallel import default_workers
from .sampler import (SamplerParams, sample_conditioned_batch, sample_finite_batch,
                      sample_window_batch, termination_problem, window_edges)
from .stats import (compare_boundary_conditions, component_size_distribution,
                    correlation_series, estimate_connection, fit_exponential, rooting_tail,
                    wilson_interval)

EXIT_OK, EXIT_INVALID, EXIT_EXHAUSTED, EXIT_CHECK = 0, 2, 3, 4
ESTIMATORS = ("tail", "connect", "correlation", "components", "converge")
LATTICES = {"z2": False, "z2+loops": True}


class ConfigError(ValueError):
    """Raised with the list of validation messages."""

    def __init__(self, errors):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass
class ExperimentConfig:
    command: str
    graph: str | None = None
    lattice: str | None = None
    model: object = None
    boundary: object = None
    ordering: object = None
    window: object = None
    condition: object = None
    estimator: str | None = None
    replicas: int = 10_000
    seed: int = 0
    cap: int = 10 ** 8
    workers: int | None = None
    step: int = 3
    n_max: int = 8
    target: object = None
    distances: object = None
    half_widths: object = None
    size_cap: int = 10 ** 5
    exact: bool = False
    edge_cap: int = 24
    tol: float = 1e-12
    max_exhausted: float = 0.01
    out: str | None = None
    plotdata: str | None = None
    manifest: str | None = None
    samples: str | None = None

    def hash(self) -> str:
        keep = {k: v for k, v in asdict(self).items()
                if k not in ("out", "plotdata", "manifest", "samples", "workers")}
        blob = json.dumps(keep, sort_keys=True, default=repr)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class RunManifest:
    config_hash: str
    seed: int
    versions: dict
    wall_time: float
    steps: int = 0
    exhausted: int = 0
    replicas: int = 0
    notes: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)


# -- parsing helpers ------------------------------------------------------------------

def _literal(text):
    if not isinstance(text, str):
        return text
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def _vertex(v):
    return tuple(_vertex(t) for t in v) if isinstance(v, (list, tuple)) else v


def parse_vertices(value, graph=None, lattice: bool = False) -> list:
    """A vertex list from a CLI string such as ``"(0,0),(1,0)"`` or
    ``"0,3"``, or from a JSON list.  A value that is itself a vertex is
    read as a one-element list."""
    if value is None:
        return []
    v = _literal(value)
    if lattice:
        if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(c, int) for c in v):
            return [tuple(v)]
        return [_vertex(u) for u in v]
    if graph is not None:
        if _vertex(v) in graph.index:
            return [_vertex(v)]
    if isinstance(v, (list, tuple)):
        return [_vertex(u) for u in v]
    return [v]


def parse_ints(value) -> list[int]:
    if value is None:
        return []
    if isinstance(value, str) and ":" in value:
        a, b = value.split(":", 1)
        return list(range(int(a), int(b) + 1))
    v = _literal(value)
    return [int(x) for x in (v if isinstance(v, (list, tuple)) else [v])]


def parse_model(value, g=None) -> CycleWeightModel:
    """A model file path, an inline JSON document, or ``family:value``
    shorthand (``plaquette:0.5``, ``length_decay:1``, ``vertex_rooting:1``,
    ``zero``)."""
    if isinstance(value, dict):
        return model_from_dict(value, g)
    text = str(value)
    if os.path.exists(text):
        return model_from_dict(load_json(text), g)
    if text.lstrip().startswith("{"):
        return model_from_dict(json.loads(text), g)
    fam, _, arg = text.partition(":")
    keys = {"plaquette": "alpha", "length_decay": "kappa", "vertex_rooting": "q"}
    if fam == "zero":
        return CycleWeightModel.zero()
    if fam in keys and arg:
        return model_from_dict({"family": fam, "params": {keys[fam]: float(arg)}}, g)
    raise ModelError(f"cannot read model {text!r}: not a file, JSON or family:value")


# -- argument parser ------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, sampling: bool = True):
    p.add_argument("--config", help="JSON config; flags override its keys")
    p.add_argument("--graph", help="graph JSON file")
    p.add_argument("--lattice", choices=sorted(LATTICES), help="infinite lattice instead of a graph")
    p.add_argument("--model", help="model JSON file, inline JSON or family:value")
    p.add_argument("--boundary", help="wired set W, e.g. '0,3' or '(0,0),(1,0)'")
    p.add_argument("--out", help="primary CSV output")
    p.add_argument("--plotdata", help="JSON x/y/CI series")
    p.add_argument("--manifest", help="manifest path (default: next to --out, else stderr)")
    if sampling:
        p.add_argument("--ordering", help="vertex processing order (head of the order)")
        p.add_argument("--window", help="window vertices")
        p.add_argument("--replicas", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--cap", type=int, help="step cap per replica")
        p.add_argument("--workers", type=int, help="worker processes (default $CRSF_WORKERS or 1)")
        p.add_argument("--max-exhausted", type=float,
                       help="tolerated fraction of step-cap exhaustions (exit 3 above)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crsf", description="Cycle-rooted spanning forests")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="exact law of CRSFs (or ECRSFs with --boundary)")
    _common(p, sampling=False)
    p.add_argument("--exact", action="store_true", default=None, help="rational arithmetic")
    p.add_argument("--edge-cap", type=int)

    p = sub.add_parser("verify-conditioning", help="check the heavy-cycle conditioning identity")
    _common(p, sampling=False)
    p.add_argument("--exact", action="store_true", default=None)
    p.add_argument("--edge-cap", type=int)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("sample", help="edge frequencies from the sampler")
    _common(p)
    p.add_argument("--condition", help="heavy cycles to condition on, as vertex lists")
    p.add_argument("--samples", help="per-replica CSV of edge indicators")

    p = sub.add_parser("stats", help="Monte Carlo estimators")
    p.add_argument("estimator", choices=ESTIMATORS)
    _common(p)
    p.add_argument("--step", type=int, help="exhaustion step s (balls of radius s*n)")
    p.add_argument("--n-max", type=int)
    p.add_argument("--target", help="connect: vertices y for P(x <-> y); x is the window head")
    p.add_argument("--distances", help="correlation: list or a:b range")
    p.add_argument("--half-widths", help="converge: box half-widths")
    p.add_argument("--size-cap", type=int)

    p = sub.add_parser("converge", help="free / wired / infinite-volume window laws")
    _common(p)
    p.add_argument("--half-widths")

    p = sub.add_parser("check-assumptions", help="certify the loop assumption")
    _common(p, sampling=False)
    p.add_argument("--step", type=int)
    p.add_argument("--n-max", type=int, help="probe depth")
    return ap


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    base = {}
    if getattr(args, "config", None):
        base = load_json(args.config)
        if not isinstance(base, dict):
            raise ConfigError(["config: top level must be an object"])
    names = {f for f in ExperimentConfig.__dataclass_fields__}
    unknown = sorted(set(base) - names)
    if unknown:
        raise ConfigError([f"config.{k}: unknown key" for k in unknown])
    merged = dict(base)
    for k, v in vars(args).items():
        if k in names and v is not None:
            merged[k] = v
    if args.command == "converge":
        merged["command"], merged["estimator"] = "stats", "converge"
    else:
        merged["command"] = args.command
    return ExperimentConfig(**merged)


# -- validation -----------------------------------------------------------------------

@dataclass
class Resolved:
    graph: Multigraph | LatticeView
    model: CycleWeightModel
    W: list
    window: list
    ordering: list
    lattice: bool


def _resolve(cfg: ExperimentConfig, errors: list):
    g = None
    lattice = False
    if cfg.graph and cfg.lattice:
        errors.append("graph/lattice: give one, not both")
    elif cfg.lattice:
        if cfg.lattice not in LATTICES:
            errors.append(f"lattice: unknown lattice {cfg.lattice!r}")
        else:
            g, lattice = LatticeView(self_loops=LATTICES[cfg.lattice]), True
    elif cfg.graph:
        if not os.path.exists(cfg.graph):
            errors.append(f"graph: file not found: {cfg.graph}")
        else:
            try:
                g = graph_from_dict(load_json(cfg.graph))
            except (ValueError, GraphError, json.JSONDecodeError) as exc:
                errors.append(f"graph: {exc}")
    else:
        errors.append("graph/lattice: one is required")
    model = None
    if cfg.model is None:
        errors.append("model: required")
    else:
        try:
            model = parse_model(cfg.model, None if lattice else g)
        except (ModelError, ValueError, KeyError, TypeError) as exc:
            errors.append(f"model: {exc}")
    W, window, ordering = [], [], []
    if g is not None:
        for name in ("boundary", "window", "ordering"):
            try:
                vs = parse_vertices(getattr(cfg, name), None if lattice else g, lattice)
            except (ValueError, TypeError) as exc:
                errors.append(f"{name}: {exc}")
                continue
            if not lattice:
                bad = [v for v in vs if v not in g.index]
                if bad:
                    errors.append(f"{name}: not vertices of the graph: {bad}")
            elif any(not (isinstance(v, tuple) and len(v) == 2) for v in vs):
                errors.append(f"{name}: lattice vertices are (x, y) pairs")
            {"boundary": W, "window": window, "ordering": ordering}[name].extend(vs)
    return g, model, W, window, ordering, lattice


def validate(cfg: ExperimentConfig) -> list[str]:
    """Every problem with ``cfg``, as ``field: message`` strings."""
    errors = []
    g, model, W, window, ordering, lattice = _resolve(cfg, errors)
    cmd = cfg.command
    for name in ("replicas", "cap", "step", "n_max", "size_cap", "edge_cap"):
        if getattr(cfg, name) is not None and int(getattr(cfg, name)) <= 0:
            errors.append(f"{name}: must be positive")
    if cfg.workers is not None and cfg.workers <= 0:
        errors.append("workers: must be positive")
    if not 0 <= cfg.max_exhausted <= 1:
        errors.append("max_exhausted: must be a fraction in [0, 1]")
    if cmd == "stats" and cfg.estimator not in ESTIMATORS:
        errors.append(f"estimator: one of {', '.join(ESTIMATORS)}")
    if g is None or model is None:
        return errors
    if cmd in ("enumerate", "verify-conditioning"):
        if lattice:
            errors.append(f"lattice: {cmd} needs a finite graph")
        return errors
    samples = cmd in ("sample", "stats")
    if samples and not model.bounded and not (cmd == "sample" and cfg.condition):
        errors.append("model: weights above 1 cannot be sampled directly; use a w_minus "
                      "model or sample --condition with the heavy cycles")
    if cmd == "sample" and not lattice and model.bounded and not cfg.condition:
        problem = termination_problem(g, model, W)
        if problem:
            errors.append(f"model: {problem}")
    if cmd == "sample" and cfg.condition and lattice:
        errors.append("condition: conditioned sampling needs a finite graph")
    if cmd == "sample" and lattice and not window:
        errors.append("window: the lattice sampler needs a finite window")
    if cmd == "stats":
        est = cfg.estimator
        if not lattice:
            errors.append(f"lattice: stats {est} runs on the infinite lattice")
        if est == "connect" and not cfg.target:
            errors.append("target: connect needs --target")
        if est == "correlation" and not parse_ints(cfg.distances):
            errors.append("distances: correlation needs --distances")
        if est == "converge":
            if not parse_ints(cfg.half_widths):
                errors.append("half_widths: converge needs --half-widths")
            if not window:
                errors.append("window: converge needs --window")
    infinite = lattice and cmd in ("stats", "sample", "check-assumptions")
    if infinite and model.bounded and cmd != "check-assumptions":
        prof = check_assumptions(g, model, ExhaustionSpec(cfg.step), probe_depth=2)
        if isinstance(prof, AssumptionViolation):
            errors.append(f"model: loop assumption fails ({prof}); the infinite-volume "
                          "sampler does not terminate a.s.")
    return errors


def resolve(cfg: ExperimentConfig) -> Resolved:
    errors = validate(cfg)
    if errors:
        raise ConfigError(errors)
    g, model, W, window, ordering, lattice = _resolve(cfg, [])
    return Resolved(g, model, W, window, ordering, lattice)


# -- outputs --------------------------------------------------------------------------

def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (np.integer,)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return repr(x) if math.isfinite(x) else str(x)
    return str(x)


def write_csv(path, header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    text = buf.getvalue()
    if path:
        Path(path).write_text(text)
    return text


def _plot(series) -> dict:
    out = []
    for name, x, y, lo, hi in series:
        out.append({"name": name, "x": [_num(v) for v in x], "y": [_num(v) for v in y],
                    "lo": [_num(v) for v in lo], "hi": [_num(v) for v in hi]})
    return {"series": out}


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else None


def versions() -> dict:
    out = {"python": platform.python_version(), "backend": _backend.BACKEND}
    for pkg in ("artifact", "numpy", "scipy", "statsmodels"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = "unknown"
    return out


def _edge_name(e) -> str:
    return json.dumps(_plain(e))


def _plain(v):
    return [_plain(t) for t in v] if isinstance(v, tuple) else v


def _params(cfg: ExperimentConfig) -> SamplerParams:
    return SamplerParams(cfg.seed, cfg.cap, cfg.replicas, cfg.workers or default_workers())


# -- commands -------------------------------------------------------------------------

def cmd_enumerate(cfg, r: Resolved, man: RunManifest):
    if r.W:
        table = enumerate_ecrsf(r.graph, r.W, cfg.edge_cap)
    else:
        table = enumerate_crsf(r.graph, cfg.edge_cap)
    dist = boltzmann(table, r.model, exact=cfg.exact)
    rows = []
    for i, (c, w, p) in enumerate(zip(dist.configs, dist.weights, dist.probs)):
        edges = ";".join(sorted(_edge_name(e) for e in c.edges))
        rows.append((i, edges, len(c.cycles), str(w) if cfg.exact else float(w),
                     str(p) if cfg.exact else float(p)))
    text = write_csv(cfg.out, ["config", "edges", "cycles", "weight", "probability"], rows)
    if not cfg.out:
        sys.stdout.write(text)
    print(f"configurations: {len(rows)}  Z = {dist.Z}", file=sys.stderr)
    man.notes.update({"configurations": len(rows), "Z": str(dist.Z), "flavor": table.flavor})
    return EXIT_OK


def cmd_verify(cfg, r: Resolved, man: RunManifest):
    gap = verify_conditioning(r.graph, r.model, r.W, exact=cfg.exact, cap=cfg.edge_cap)
    ok = gap <= cfg.tol
    print(f"max discrepancy {gap:.3e} (tolerance {cfg.tol:.1e}): {'ok' if ok else 'FAILED'}")
    man.notes.update({"max_discrepancy": gap, "tolerance": cfg.tol})
    if cfg.out:
        write_csv(cfg.out, ["max_discrepancy", "tolerance", "ok"], [(float(gap), cfg.tol, ok)])
    return EXIT_OK if ok else EXIT_CHECK


def _conditioned(cfg, r):
    cycles = _literal(cfg.condition)
    if cycles and not isinstance(cycles[0], (list, tuple)) or (
            cycles and r.graph.index.get(_vertex(cycles[0])) is not None):
        cycles = [cycles]
    longest = max(len(c) for c in cycles)
    classes = enumerate_cycle_classes(r.graph, longest)
    return [class_on(classes, [_vertex(v) for v in c]) for c in cycles]


def cmd_sample(cfg, r: Resolved, man: RunManifest):
    params = _params(cfg)
    if r.lattice:
        b = sample_window_batch(r.graph, r.model, r.window, params)
        edges = window_edges(b.window)
        ind = b.edge_indicators(edges)
        steps, exh = b.steps, b.exhausted
    else:
        ordering = OrderingSpec(tuple(r.ordering)) if r.ordering else None
        if cfg.condition:
            C = _conditioned(cfg, r)
            b = sample_conditioned_batch(r.graph, r.W, C, r.model, ordering, params)
        else:
            b = sample_finite_batch(r.graph, r.model, r.W, ordering, params)
        if r.window:
            edges = [e for e, u, v in r.graph.edges if u in r.window and v in r.window]
        else:
            edges = [e for e, _, _ in r.graph.edges]
        ind = np.stack([b.edge_indicator(e) for e in edges], axis=1) if edges else \
            np.zeros((int(b.ok.sum()), 0), bool)
        steps, exh = b.steps, b.exhausted
    n = ind.shape[0]
    counts = ind.sum(axis=0)
    lo, hi = wilson_interval(counts, np.full(len(edges), n))
    rows = [(_edge_name(e), int(c), c / n if n else math.nan, float(a), float(z))
            for e, c, a, z in zip(edges, counts, lo, hi)]
    text = write_csv(cfg.out, ["edge", "count", "frequency", "lo", "hi"], rows)
    if not cfg.out:
        sys.stdout.write(text)
    if cfg.samples:
        ok_idx = np.flatnonzero(np.asarray(exh) == 0)
        write_csv(cfg.samples, ["replica"] + [_edge_name(e) for e in edges],
                  ([int(i)] + [int(x) for x in row] for i, row in zip(ok_idx, ind)))
    if cfg.plotdata:
        _save(cfg.plotdata, _plot([("edge frequency", range(len(edges)), counts / max(n, 1),
                                    lo, hi)]))
    man.steps, man.exhausted = int(np.sum(steps)), int(np.sum(np.asarray(exh) != 0))
    return None


def _save(path, obj):
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def cmd_stats(cfg, r: Resolved, man: RunManifest):
    params = _params(cfg)
    est = cfg.estimator
    x = r.window[0] if r.window else (0, 0)
    fit = None
    if est == "tail":
        curve = rooting_tail(r.graph, r.model, x, cfg.n_max, params, ExhaustionSpec(cfg.step))
        rows = list(curve.rows())
        header = ["n", "p", "lo", "hi"]
        series = [("P(T_n < T_r)", curve.n, curve.p, curve.lo, curve.hi)]
        man.exhausted = curve.exhausted
        try:
            fit = fit_exponential(curve, n_min=1)
        except ValueError as exc:
            man.notes["fit"] = str(exc)
    elif est == "connect":
        targets = parse_vertices(cfg.target, lattice=True)
        rows, ps, ses = [], [], []
        for i, y in enumerate(targets):
            p = SamplerParams(params.seed + i, params.step_cap, params.replicas, params.workers)
            res = estimate_connection(r.graph, r.model, x, y, p, cfg.size_cap)
            rows.append((_edge_name(x), _edge_name(y), res.estimate, res.se, res.replicas))
            ps.append(res.estimate)
            ses.append(res.se)
            man.exhausted += res.exhausted
        header = ["x", "y", "p", "se", "replicas"]
        ps, ses = np.array(ps), np.array(ses)
        series = [("P(x <-> y)", range(len(ps)), ps, ps - 1.96 * ses, ps + 1.96 * ses)]
    elif est == "correlation":
        ms = parse_ints(cfg.distances)
        ser = correlation_series(r.graph, r.model, ms, params)
        rows = [(m, c.cov, c.se, c.p1, c.p2, c.replicas) for m, c in ser]
        header = ["m", "cov", "se", "p1", "p2", "replicas"]
        mag = np.array([abs(c.cov) for _, c in ser])
        se = np.array([c.se for _, c in ser])
        series = [("|cov|", ms, mag, mag - 1.96 * se, mag + 1.96 * se)]
        man.exhausted = sum(c.exhausted for _, c in ser)
        man.notes["distance"] = "graph distance between the parallel edges"
        try:
            fit = fit_exponential(mag, np.array(ms, float), lower=mag - 2 * se, min_points=2)
        except ValueError as exc:
            man.notes["fit"] = str(exc)
    elif est == "components":
        st = component_size_distribution(r.graph, r.model, x, params, cfg.size_cap, check=False)
        grid, surv = st.survival()
        rows = [(int(s), int(st.histogram.get(int(s), 0)), float(p)) for s, p in zip(grid, surv)]
        header = ["size", "count", "survival"]
        n = len(st.sizes)
        lo, hi = wilson_interval(np.rint(surv * n), np.full(len(surv), n))
        series = [("P(|cc| >= s)", grid, surv, lo, hi)]
        man.exhausted = st.exhausted
    else:
        hws = parse_ints(cfg.half_widths)
        out = compare_boundary_conditions(hws, r.model, r.window, params, r.graph)
        rows = [(c.half_width, c.tv_free_wired, c.tv_free_inf, c.tv_wired_inf, c.se) for c in out]
        header = ["half_width", "tv_free_wired", "tv_free_inf", "tv_wired_inf", "se"]
        tv = np.array([c.tv_wired_inf for c in out])
        se = np.array([c.se for c in out])
        series = [("TV(wired, infinite)", hws, tv, tv - 1.96 * se, tv + 1.96 * se),
                  ("TV(free, infinite)", hws, [c.tv_free_inf for c in out],
                   [c.tv_free_inf - 1.96 * c.se for c in out],
                   [c.tv_free_inf + 1.96 * c.se for c in out])]
    text = write_csv(cfg.out, header, rows)
    if not cfg.out:
        sys.stdout.write(text)
    if fit is not None:
        man.notes["fit"] = {"rate": fit.rate, "r2": fit.r2, "points": fit.points,
                            "n_min": fit.n_min, "n_max": fit.n_max, "at_boundary": fit.at_boundary}
        print(f"fitted decay rate {fit.rate:.4f} (R^2 {fit.r2:.3f}, {fit.points} points)",
              file=sys.stderr)
    if cfg.plotdata:
        _save(cfg.plotdata, _plot(series))
    return None


def cmd_check(cfg, r: Resolved, man: RunManifest):
    ex = ExhaustionSpec(cfg.step)
    if not r.lattice:
        print("check-assumptions: finite graphs need an explicit exhaustion; "
              "use the Python API (ExhaustionSpec.explicit)", file=sys.stderr)
        return EXIT_INVALID
    prof = check_assumptions(r.graph, r.model, ex, probe_depth=min(cfg.n_max, 6))
    if isinstance(prof, AssumptionViolation):
        print(f"assumption violated: {prof}")
        man.notes["violation"] = str(prof)
        return EXIT_CHECK
    fields = ("alpha", "beta", "delta", "M", "M_prime", "C", "d", "loop_family")
    vals = {k: getattr(prof, k) for k in fields}
    for k, v in vals.items():
        print(f"{k:12s} {v}")
    if cfg.out:
        write_csv(cfg.out, list(fields), [[vals[k] for k in fields]])
    man.notes.update({k: (v if isinstance(v, str) else float(v)) for k, v in vals.items()})
    return EXIT_OK


COMMANDS = {"enumerate": cmd_enumerate, "verify-conditioning": cmd_verify,
            "sample": cmd_sample, "stats": cmd_stats, "check-assumptions": cmd_check}


def run(cfg: ExperimentConfig) -> int:
    """Validate, dispatch and write the manifest; returns the exit status."""
    errors = validate(cfg)
    if errors:
        for e in errors:
            print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    r = resolve(cfg)
    man = RunManifest(cfg.hash(), cfg.seed, versions(), 0.0,
                      replicas=cfg.replicas if cfg.command in ("sample", "stats") else 0,
                      config={k: v for k, v in asdict(cfg).items()})
    t0 = time.perf_counter()
    try:
        status = COMMANDS[cfg.command](cfg, r, man)
    except (EnumerationRefused, MeasureUndefined, SamplerConfigError, ValueError) as exc:
        print(f"error ({cfg.command}): {exc}", file=sys.stderr)
        return EXIT_INVALID
    except StepCapExceeded as exc:
        print(f"error ({cfg.command}): {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    man.wall_time = time.perf_counter() - t0
    if status is None:
        status = EXIT_OK
        if man.replicas and man.exhausted > cfg.max_exhausted * man.replicas:
            print(f"{man.exhausted} of {man.replicas} replicas hit the step cap", file=sys.stderr)
            status = EXIT_EXHAUSTED
    _write_manifest(cfg, man)
    return status


def _write_manifest(cfg, man: RunManifest):
    doc = json.dumps(asdict(man), indent=1, sort_keys=True, default=repr) + "\n"
    path = cfg.manifest or (cfg.out + ".manifest.json" if cfg.out else None)
    if path:
        Path(path).write_text(doc)
    else:
        sys.stderr.write(doc)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
