import numpy as np
import pytest

from lehmer import make_spec


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_spec():
    """Factory for random specs: log-uniform values, optional weights."""

    def _make(rng, n=None, lo=0.1, hi=10.0, weighted=False):
        if n is None:
            n = int(rng.integers(2, 7))
        values = np.exp(rng.uniform(np.log(lo), np.log(hi), n)).tolist()
        weights = rng.uniform(0.5, 2.0, n).tolist() if weighted else None
        return make_spec(values, weights)

    return _make
