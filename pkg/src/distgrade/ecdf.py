"""Empirical distribution functions and sup-distance statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import EmptySample, NonFiniteValue


class Sample:
    """Finite observations of one variable, stored sorted ascending.

    Construction validates the input: an empty sequence raises
    ``EmptySample`` and the first NaN or infinity raises
    ``NonFiniteValue`` carrying its position in the *input* order.
    """

    __slots__ = ("_values",)

    def __init__(self, raw):
        arr = np.array(raw, dtype=float).ravel()
        if arr.size == 0:
            raise EmptySample()
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            raise NonFiniteValue(int(bad[0]))
        arr.sort(kind="stable")
        arr.flags.writeable = False
        self._values = arr

    @property
    def values(self):
        return self._values

    @property
    def n(self):
        return int(self._values.size)

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self._values.tolist())

    def __eq__(self, other):
        if not isinstance(other, Sample):
            return NotImplemented
        return np.array_equal(self._values, other._values)

    def __hash__(self):
        return hash(self._values.tobytes())

    def __repr__(self):
        return f"Sample(n={self.n}, values={self._values.tolist()!r})"

    def affine(self, scale, shift):
        """Sample of ``scale * x + shift`` for every observation."""
        return Sample(scale * self._values + shift)


def make_sample(raw):
    return Sample(raw)


@dataclass(frozen=True)
class KsStatistic:
    """Two-sided statistic ``d`` with its one-sided parts.

    For one-sample tests ``d_plus = sup(F_n - F)`` and
    ``d_minus = sup(F - F_n)``; for two-sample tests the roles of ``F_n`` and
    ``F`` are taken by the first and second sample's ECDFs.
    """

    d: float
    d_plus: float
    d_minus: float

    def __post_init__(self):
        for name in ("d", "d_plus", "d_minus"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.d != max(self.d_plus, self.d_minus):
            raise ValueError("d must equal max(d_plus, d_minus)")


def ecdf_eval(sample, x):
    """Right-continuous ECDF: fraction of observations ``<= x``.

    ``x`` may be a scalar or an array.
    """
    counts = np.searchsorted(sample.values, x, side="right")
    out = counts / sample.n
    if np.ndim(out) == 0:
        return float(out)
    return out


def _cdf_at(cdf, xs):
    try:
        f = np.asarray(cdf(xs), dtype=float)
    except TypeError:
        f = None
    if f is None or f.shape != xs.shape:
        f = np.array([cdf(float(v)) for v in xs], dtype=float)
    return f


def one_sample_gaps(sample, cdf):
    """Per-order-statistic gaps ``(i/n - F(x_(i)), F(x_(i)) - (i-1)/n)``."""
    x = sample.values
    n = sample.n
    f = _cdf_at(cdf, x)
    i = np.arange(1, n + 1)
    return i / n - f, f - (i - 1) / n


def sup_distance_one_sample(sample, cdf):
    """``sup_x |F_n(x) - F(x)|`` for a continuous, nondecreasing ``cdf``.

    ``F_n`` only jumps at observations, so the supremum is attained at an
    order statistic or immediately to its left; evaluating both sides of each
    jump is exact.  Tied observations need no special handling: the largest
    index of a tie block dominates the upper gap and the smallest the lower.

    Parameters
    ----------
    sample : Sample
    cdf : callable
        Theoretical CDF.  Called once with the sorted observation array; if it
        does not vectorize it is called element by element.

    Returns
    -------
    KsStatistic
    """
    upper, lower = one_sample_gaps(sample, cdf)
    d_plus = float(min(1.0, max(0.0, upper.max())))
    d_minus = float(min(1.0, max(0.0, lower.max())))
    return KsStatistic(max(d_plus, d_minus), d_plus, d_minus)


def sup_distance_two_sample(a, b):
    """``max |F_a(x) - F_b(x)|`` over the merged observation points.

    Both ECDFs are step functions that only change at observations, so the
    distinct pooled values are the only candidates.  ``d_plus`` is the largest
    positive excursion of ``F_a - F_b`` and ``d_minus`` the largest negative
    one, so swapping the arguments swaps them.
    """
    pts = np.union1d(a.values, b.values)
    diff = ecdf_eval(a, pts) - ecdf_eval(b, pts)
    d_plus = float(max(0.0, diff.max()))
    d_minus = float(max(0.0, (-diff).max()))
    return KsStatistic(max(d_plus, d_minus), d_plus, d_minus)
