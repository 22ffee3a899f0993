import numpy as np
import pytest

from fairmclp import Instance


def random_instance(seed, n=None, m=None, d=2, with_candidates=True):
    """Small seeded instance; ``m`` separate candidate sites unless disabled."""
    rng = np.random.default_rng(seed)
    n = n if n is not None else int(rng.integers(3, 11))
    pts = rng.uniform(0, 1, size=(n, d))
    w = rng.uniform(0.05, 1.0, size=n)
    cands = None
    if with_candidates:
        m = m if m is not None else int(rng.integers(3, 9))
        cands = rng.uniform(0, 1, size=(m, d))
    return Instance.from_arrays(pts, w, candidates=cands, name=f"t{seed}")


@pytest.fixture
def make_instance():
    return random_instance
