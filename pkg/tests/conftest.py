import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240439)


def rel_err(got, want, floor: float = 1.0) -> float:
    """Max relative deviation with an absolute floor near zero."""
    got = np.asarray(got, dtype=np.float64)
    want = np.asarray(want, dtype=np.float64)
    denom = np.maximum(floor, np.abs(want))
    return float(np.max(np.abs(got - want) / denom))
