"""Pure numpy DTW kernels, used when the compiled extension is unavailable.

The accumulated-cost recurrence is filled one anti-diagonal at a time so every
cell sees exactly the same floating point operations as the compiled loop.
"""

import numpy as np


def dtw_accumulate(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n, m = len(a), len(b)
    P = np.full((n + 1, m + 1), np.inf)
    P[0, 0] = 0.0
    for s in range(n + m - 1):
        i = np.arange(max(0, s - m + 1), min(n - 1, s) + 1)
        j = s - i
        best = np.minimum(np.minimum(P[i, j], P[i, j + 1]), P[i + 1, j])
        P[i + 1, j + 1] = np.abs(a[i] - b[j]) + best
    return P


def dtw_distance(a, b):
    P = dtw_accumulate(a, b)
    return float(P[-1, -1])


def dtw_path(a, b):
    P = dtw_accumulate(a, b)
    i, j = P.shape[0] - 1, P.shape[1] - 1
    path = [(i - 1, j - 1)]
    while i > 1 or j > 1:
        d, u, l = P[i - 1, j - 1], P[i - 1, j], P[i, j - 1]
        if d <= u and d <= l:
            i -= 1
            j -= 1
        elif u <= l:
            i -= 1
        else:
            j -= 1
        path.append((i - 1, j - 1))
    return float(P[-1, -1]), np.array(path[::-1], dtype=np.int64)
