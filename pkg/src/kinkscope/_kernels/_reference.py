"""Pure-numpy kink-counting kernels (fallback backend).

Semantics contract shared bit for bit with the compiled backend: neuron ``j``
of row ``i`` contributes the candidate ``x = -biases[i, j] / weights[i, j]``;
zero weights vanish on their own because IEEE division yields ``inf``/``nan``,
which fail every ``|x| < radius`` test (``radius = inf`` keeps exactly the
finite candidates); surviving candidates are sorted and runs of consecutive
values within ``tol`` collapse onto the first element of the run.
"""

import numpy as np


def _candidate_matrix(biases, weights, radius):
    biases = np.ascontiguousarray(biases, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if biases.ndim != 2 or biases.shape != weights.shape:
        raise ValueError("biases and weights must be equal-shape 2-D arrays")
    with np.errstate(divide="ignore", invalid="ignore"):
        x = -biases / weights
        inside = np.abs(x) < radius
        xs = np.sort(np.where(inside, x, np.inf), axis=1)
    return xs


def count_kinks_batch(biases, weights, radius, tol):
    """Per-row number of distinct kink positions strictly inside the domain.

    Returns an int64 array of length ``biases.shape[0]``.
    """
    xs = _candidate_matrix(biases, weights, radius)
    with np.errstate(invalid="ignore"):
        gaps = np.diff(xs, axis=1)
        merged = (gaps <= tol) & np.isfinite(gaps)
    return (np.isfinite(xs).sum(axis=1) - merged.sum(axis=1)).astype(np.int64)


def collect_kinks_batch(biases, weights, radius, tol):
    """Like :func:`count_kinks_batch`, also returning the kink positions.

    Positions come back as one flat float64 array, row-major (row by row,
    ascending within each row); its length equals ``counts.sum()``.
    """
    xs = _candidate_matrix(biases, weights, radius)
    keep = np.isfinite(xs)
    with np.errstate(invalid="ignore"):
        gaps = np.diff(xs, axis=1)
        keep[:, 1:] &= ~((gaps <= tol) & np.isfinite(gaps))
    counts = keep.sum(axis=1).astype(np.int64)
    return counts, xs[keep]
