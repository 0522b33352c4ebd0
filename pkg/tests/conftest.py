import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))


def random_instance(rng, n_max=64, d_max=16):
    """A random selection problem: frames, query, and budget/batch sizes."""
    n = int(rng.integers(1, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    frames = rng.normal(size=(n, d)).astype(np.float32)
    zero = np.linalg.norm(frames, axis=1) == 0
    frames[zero] = 1.0
    query = rng.normal(size=d).astype(np.float32)
    if np.linalg.norm(query) == 0:
        query[0] = 1.0
    k = int(rng.integers(1, n + 1))
    b = int(rng.integers(1, n + 1))
    return frames, query, k, b


def results_identical(a, b):
    """Bitwise equality of two SelectionResults, traces included."""
    if a.selected != b.selected or a.d_max != b.d_max or len(a.trace) != len(b.trace):
        return False
    for ra, rb in zip(a.trace, b.trace):
        if (ra.iteration, ra.pool_size, ra.batch) != (rb.iteration, rb.pool_size, rb.batch):
            return False
        ta, tb = ra.table, rb.table
        for fa, fb in (
            (ta.indices, tb.indices),
            (ta.relevance, tb.relevance),
            (ta.diversity, tb.diversity),
            (ta.score, tb.score),
            (ta.substitute, tb.substitute),
        ):
            if fa.dtype != fb.dtype or not np.array_equal(fa, fb):
                return False
    return True
