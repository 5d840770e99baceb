"""Worker-count control for the data-parallel inner loops.

``GROWTHLAB_THREADS`` caps the number of worker threads; unset or ``1``
means serial evaluation.  Reductions are always performed in candidate
order, so serial and threaded runs produce bit-identical results.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

ENV_VAR = "GROWTHLAB_THREADS"


def worker_count() -> int:
    raw = os.environ.get(ENV_VAR, "")
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
    return max(1, n)


def ordered_map(fn: Callable, items: Sequence) -> list:
    """Apply ``fn`` over ``items``, preserving input order in the result."""
    n = worker_count()
    if n <= 1 or len(items) < 2 * n:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def evaluate_points(evaluate: Callable[[np.ndarray], float], points: np.ndarray) -> np.ndarray:
    """Evaluate a scalar oracle at each row of ``points`` (m, d) -> (m,)."""
    values = ordered_map(lambda row: float(evaluate(row)), list(points))
    return np.asarray(values, dtype=float)
