"""Independent brute-force oracles shared by the test modules."""

import itertools

import numpy as np


def brute_one_sample_d(values, cdf):
    """max |F_n - F| at each observation and just to its left, counting directly."""
    values = np.asarray(values, dtype=float)
    n = values.size
    probes = np.concatenate([values, np.nextafter(values, -np.inf)])
    fn = (values[None, :] <= probes[:, None]).sum(axis=1) / n
    f = np.array([float(cdf(pt)) for pt in probes])
    return float(np.max(np.abs(fn - f)))


def brute_two_sample_d(a, b):
    """max |F_a - F_b| over pooled points and midpoints between them."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    pts = np.unique(np.concatenate([a, b]))
    probes = np.concatenate([pts, (pts[1:] + pts[:-1]) / 2, [pts[0] - 1.0]])
    best = 0.0
    for x in probes:
        fa = np.count_nonzero(a <= x) / a.size
        fb = np.count_nonzero(b <= x) / b.size
        best = max(best, abs(fa - fb))
    return best


def enumerate_perm_pvalue(a, b):
    """Permutation p-value by listing every split of the pooled values."""
    pooled = np.concatenate([np.asarray(a, float), np.asarray(b, float)])
    na = len(a)
    d_obs = brute_two_sample_d(a, b)
    hits = total = 0
    for idx in itertools.combinations(range(pooled.size), na):
        mask = np.zeros(pooled.size, dtype=bool)
        mask[list(idx)] = True
        d = brute_two_sample_d(pooled[mask], pooled[~mask])
        hits += d >= d_obs - 1e-12
        total += 1
    return hits / total
