"""Replicate fan-out helper.

Replicates are embarrassingly parallel and individually seeded, so results
are identical for any worker count; outputs are collected in replicate
order to keep every downstream aggregation deterministic.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


def parallel_map(fn, payloads, workers: int = 1) -> list:
    payloads = list(payloads)
    if workers <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    chunk = max(1, len(payloads) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, payloads, chunksize=chunk))
