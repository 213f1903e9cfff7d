"""Time the compiled kernels against the pure-Python fallback.

Both backends consume the same random streams, so each workload also
checks that they return identical arrays.

    python3 benchmarks/bench_kernels.py [--replicas N] [--repeat K]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from crsf import _fallback
from crsf.graph import LatticeView, grid_graph
from crsf.models import CycleWeightModel, encode_finite, encode_lattice

try:
    from crsf import _kernels
except ImportError:  # extension not built
    _kernels = None


def _finite(kern, g, km, W, replicas):
    boundary = np.zeros(g.n, dtype=np.uint8)
    for w in W:
        boundary[g.index[w]] = 1
    order = np.arange(g.n, dtype=np.int64)
    return kern.finite_batch(g.adj_start, g.adj_target, g.adj_edge, km.len_w, km.kappa,
                             km.selfloop_w, km.callback, order, boundary, g.n, 1, 0, replicas,
                             10 ** 8)


def workloads(replicas: int):
    g = grid_graph(4, 4)
    km = encode_finite(CycleWeightModel.length_decay(0.3), g)
    lat = LatticeView()
    lw, kappa, q = encode_lattice(CycleWeightModel.plaquette(0.5), lat)
    window = [(0, 0), (1, 0), (0, 1), (1, 1)]
    return {
        "finite 4x4 grid, wired corner": lambda k: _finite(k, g, km, [15], replicas),
        "finite 4x4 grid, free": lambda k: _finite(k, g, km, [], replicas),
        "Z^2 window (2x2)": lambda k: k.lattice_window_batch(lw, kappa, q, False, window, 1, 0,
                                                            replicas, 10 ** 8, 0),
        "Z^2 rooting tail": lambda k: k.lattice_rooting_batch(lw, kappa, q, False, 1, 0,
                                                              replicas, 10 ** 8, 24),
        "Z^2 component exploration": lambda k: k.lattice_explore_batch(
            lw, kappa, q, False, (0, 0), None, 1, 0, max(replicas // 10, 1), 10 ** 8, 10 ** 5),
    }


def _time(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b) -> bool:
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return len(a) == len(b) and all(np.array_equal(np.asarray(x), np.asarray(y))
                                    for x, y in zip(a, b))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--replicas", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`")
        return 1
    print(f"{'workload':32s} {'python s':>10s} {'cython s':>10s} {'speedup':>9s}  match")
    for name, run in workloads(args.replicas).items():
        tp, op = _time(lambda: run(_fallback), 1)
        tc, oc = _time(lambda: run(_kernels), args.repeat)
        print(f"{name:32s} {tp:10.3f} {tc:10.4f} {tp / tc:8.1f}x  {_same(op, oc)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
