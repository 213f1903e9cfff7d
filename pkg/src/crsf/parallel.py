"""Replica-parallel execution.  Streams are keyed by replica index, so the
split into chunks never changes the samples."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("CRSF_WORKERS", "1")))
    except ValueError:
        return 1


def chunk_ranges(start: int, count: int, workers: int) -> list[tuple[int, int]]:
    parts = max(1, min(workers, count))
    base, extra = divmod(count, parts)
    out, s = [], start
    for i in range(parts):
        c = base + (i < extra)
        out.append((s, c))
        s += c
    return out


def run_chunks(fn, arg_list: list, workers: int) -> list:
    if workers <= 1 or len(arg_list) <= 1:
        return [fn(*a) for a in arg_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*arg_list)))
