import numpy as np
import pytest

from kinkscope import NetworkParams


def full_kink_witness(width: int, spread: float = None, domain_radius: float = 1.0):
    """Parameters guaranteed to bend at exactly ``width`` distinct points.

    Biases ``spread * (1..w)`` against all-ones weights put one kink at
    ``-k * spread`` per neuron, all strictly inside the domain.
    """
    if spread is None:
        spread = domain_radius / (2.0 * width)
    return NetworkParams(
        width=width,
        first_weights=np.ones(width),
        first_biases=spread * np.arange(1, width + 1, dtype=float),
        out_weights=np.ones(width),
        out_bias=0.0,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
