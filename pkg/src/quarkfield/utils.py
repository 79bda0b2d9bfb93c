"""Small shared helpers: multi-index enumeration, factorials, worker cap."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor


def multi_indices(n, order_max):
    """All multi-indices in N_0^n with |beta| <= order_max, graded lexicographic."""
    out = []
    for total in range(order_max + 1):
        out.extend(_fixed_order(n, total))
    return out


def _fixed_order(n, total):
    if n == 1:
        return [(total,)]
    out = []
    for first in range(total, -1, -1):
        for rest in _fixed_order(n - 1, total - first):
            out.append((first,) + rest)
    return out


def multi_factorial(beta):
    """beta! = prod beta_i!"""
    out = 1
    for b in beta:
        out *= math.factorial(b)
    return out


def order(beta):
    return sum(beta)


def thread_cap():
    """Worker cap from QF_THREADS (>=1); defaults to 1 (deterministic timing)."""
    raw = os.environ.get("QF_THREADS", "")
    if not raw:
        return 1
    try:
        cap = int(raw)
    except ValueError:
        return 1
    return max(1, cap)


def parallel_map(fn, items):
    """Map preserving order; threads only when QF_THREADS > 1."""
    items = list(items)
    cap = thread_cap()
    if cap <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=cap) as pool:
        return list(pool.map(fn, items))


def fitted_slope(xs, ys):
    """Least-squares slope of ys against xs."""
    import numpy as np

    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    return float(np.polyfit(xs, ys, 1)[0])
