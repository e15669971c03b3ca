"""Shared test utilities."""

import numpy as np


def local_maxima(values, prominence_frac=0.1):
    """Indices of interior local maxima above a fraction of the global max."""
    v = np.asarray(values, dtype=float)
    floor = v.max() * prominence_frac
    out = []
    for i in range(1, len(v) - 1):
        if v[i] > v[i - 1] and v[i] >= v[i + 1] and v[i] > floor:
            out.append(i)
    return out


def local_maxima_2d(matrix, prominence_frac=0.1):
    """(i, j) positions of interior local maxima of a 2D field."""
    m = np.asarray(matrix, dtype=float)
    floor = m.max() * prominence_frac
    out = []
    for i in range(1, m.shape[0] - 1):
        for j in range(1, m.shape[1] - 1):
            patch = m[i - 1:i + 2, j - 1:j + 2].copy()
            centre = patch[1, 1]
            patch[1, 1] = -np.inf
            if centre > patch.max() and centre > floor:
                out.append((i, j))
    return out
