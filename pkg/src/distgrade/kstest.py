"""One-sample normality and two-sample Kolmogorov-Smirnov tests.

The decision rule is the usual one: the null hypothesis is rejected when the
p-value is strictly below the significance level.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import distributions as dist
from .distributions import NormalParams, normal_cdf
from .ecdf import KsStatistic, Sample, sup_distance_one_sample, sup_distance_two_sample
from .exceptions import DegenerateSample, ExactMethodUnavailable

DEFAULT_ALPHA = 0.05
EXACT_TWO_SAMPLE_MAX_PRODUCT = 10_000

REJECTED_TEXT = "The null hypothesis is rejected"
NOT_REJECTED_TEXT = "The null hypothesis is not rejected"


class EstimatedParametersWarning(UserWarning):
    """Classic KS p-values are too large when mu and sigma come from the sample."""


class Verdict(enum.Enum):
    REJECT_NULL = "reject"
    FAIL_TO_REJECT_NULL = "fail_to_reject"

    @property
    def conclusion(self):
        if self is Verdict.REJECT_NULL:
            return REJECTED_TEXT
        return NOT_REJECTED_TEXT


class TestKind(enum.Enum):
    __test__ = False

    NORMALITY_ONE_SAMPLE = "normality"
    TWO_SAMPLE_COMPARE = "two-sample"


@dataclass(frozen=True)
class PMethod:
    """How a p-value is obtained: ``exact``, ``asymptotic`` or ``montecarlo``."""

    kind: str = "exact"
    reps: Optional[int] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("exact", "asymptotic", "montecarlo"):
            raise ValueError(f"unknown p-value method {self.kind!r}")
        if self.kind == "montecarlo":
            if self.reps is None or self.seed is None:
                raise ValueError("montecarlo needs reps and seed")
            if int(self.reps) != self.reps or self.reps < dist.MIN_MC_REPS:
                raise ValueError(f"montecarlo reps must be >= {dist.MIN_MC_REPS}")
            dist._check_seed(self.seed)
        elif self.reps is not None or self.seed is not None:
            raise ValueError(f"{self.kind} method takes no reps/seed")

    @classmethod
    def exact(cls):
        return cls("exact")

    @classmethod
    def asymptotic(cls):
        return cls("asymptotic")

    @classmethod
    def monte_carlo(cls, reps, seed):
        return cls("montecarlo", int(reps), int(seed))

    @property
    def label(self):
        if self.kind == "montecarlo":
            return f"montecarlo(reps={self.reps},seed={self.seed})"
        return self.kind


@dataclass(frozen=True)
class TestResult:
    """One row of a grading report.

    For two-sample comparisons ``n`` is the size of the first (baseline)
    sample, ``n_b`` the size of the second, and ``normal_params`` is None.
    """

    __test__ = False

    variable: str
    scenario: str
    test_kind: TestKind
    n: int
    statistic: KsStatistic
    p_value: float
    alpha: float
    verdict: Verdict
    p_method: PMethod
    params_estimated: bool
    normal_params: Optional[NormalParams] = None
    n_b: Optional[int] = None


def check_alpha(alpha):
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def decide(p, alpha=DEFAULT_ALPHA):
    """Reject exactly when ``p < alpha``; ``p == alpha`` is not a rejection."""
    if p < check_alpha(alpha):
        return Verdict.REJECT_NULL
    return Verdict.FAIL_TO_REJECT_NULL


def estimate_normal(sample):
    """Sample mean and ``n - 1`` standard deviation."""
    if sample.n < 2:
        raise DegenerateSample("need at least 2 observations to estimate sigma")
    x = sample.values
    if x[0] == x[-1]:
        raise DegenerateSample("all observations are equal")
    # rescale so squared deviations neither underflow nor overflow
    scale = float(np.max(np.abs(x)))
    y = x / scale
    mu = scale * float(np.mean(y))
    sigma = scale * float(np.std(y, ddof=1))
    if not (np.isfinite(mu) and np.isfinite(sigma) and sigma > 0):
        raise DegenerateSample("spread of the observations is not representable")
    return NormalParams(mu, sigma)


def one_sample_pvalue(d, n, method, params_estimated=False):
    """p-value of an observed one-sample statistic ``d`` for sample size ``n``."""
    if method.kind == "exact":
        return dist.exact_dn_sf(n, d)
    if method.kind == "asymptotic":
        return dist.asymptotic_pvalue(n, d)
    est = dist.mc_null_pvalue(n, d, method.reps, method.seed, params_estimated)
    return est.p_hat


def ks_normality_test(
    sample,
    params=None,
    alpha=DEFAULT_ALPHA,
    method=None,
    *,
    variable="",
    scenario="",
    allow_fallback=False,
):
    """Test whether ``sample`` is drawn from a normal distribution.

    Parameters
    ----------
    sample : Sample
    params : NormalParams, optional
        Hypothesised distribution.  When omitted it is estimated from the
        sample and the result carries ``params_estimated=True``.  Exact and
        asymptotic p-values then ignore the estimation step (and so tend to
        be too large); a Monte Carlo method re-estimates in every replicate.
    alpha : float
    method : PMethod, optional
        Defaults to ``PMethod.exact()``.
    allow_fallback : bool
        With an exact method and ``n`` above the exact cap, use the
        asymptotic method instead of raising ``ExactMethodUnavailable``.

    Raises
    ------
    DegenerateSample
        ``params`` omitted and the sample has fewer than 2 distinct values.
    ExactMethodUnavailable
    """
    alpha = check_alpha(alpha)
    method = method or PMethod.exact()
    estimated = params is None
    if estimated:
        params = estimate_normal(sample)
        if method.kind != "montecarlo":
            warnings.warn(
                "normal parameters estimated from the sample; "
                f"{method.kind} KS p-values are conservative, use a Monte Carlo "
                "method for the estimated-parameter null",
                EstimatedParametersWarning,
                stacklevel=2,
            )

    stat = sup_distance_one_sample(sample, lambda x: normal_cdf(x, params))
    if method.kind == "exact" and sample.n > dist.EXACT_MAX_N and allow_fallback:
        method = PMethod.asymptotic()
    p = one_sample_pvalue(stat.d, sample.n, method, estimated)
    return TestResult(
        variable=variable,
        scenario=scenario,
        test_kind=TestKind.NORMALITY_ONE_SAMPLE,
        n=sample.n,
        statistic=stat,
        p_value=p,
        alpha=alpha,
        verdict=decide(p, alpha),
        p_method=method,
        params_estimated=estimated,
        normal_params=params,
    )


def _block_ends(pooled_sorted):
    """1-based prefix lengths after which the pooled value changes."""
    z = pooled_sorted
    ends = np.flatnonzero(z[1:] != z[:-1]) + 1
    return np.append(ends, z.size)


def _gap_threshold(d, na, nb):
    # D * na * nb is an integer for any attainable D; tolerate rounding in d
    return max(0, math.ceil(d * na * nb - 1e-7))


def _exact_two_sample_sf(d, a, b):
    """Exact permutation ``P(D >= d)`` by counting label arrangements.

    Every assignment of ``na`` of the pooled observations to the first sample
    is equally likely under the null.  A dynamic program over the pooled
    order counts the arrangements whose ECDF gap stays below ``d`` at every
    point where the pooled value changes (gaps inside a run of ties are
    never observed).  Counts are exact integers.
    """
    na, nb = a.n, b.n
    if na * nb > EXACT_TWO_SAMPLE_MAX_PRODUCT:
        raise ExactMethodUnavailable(
            f"exact two-sample distribution is limited to n_a*n_b <= "
            f"{EXACT_TWO_SAMPLE_MAX_PRODUCT} (got {na}*{nb}); use the asymptotic method"
        )
    thresh = _gap_threshold(d, na, nb)
    if thresh == 0:
        return 1.0
    pooled = np.concatenate([a.values, b.values])
    pooled.sort()
    is_end = np.zeros(pooled.size + 1, dtype=bool)
    is_end[_block_ends(pooled)] = True

    i = np.arange(na + 1)
    ways = np.zeros(na + 1, dtype=object)
    ways[0] = 1
    for t in range(1, pooled.size + 1):
        nxt = ways.copy()
        nxt[1:] += ways[:-1]
        ways = nxt
        if is_end[t]:
            j = t - i
            outside = (np.abs(i * nb - j * na) >= thresh) | (j < 0) | (j > nb)
            ways[outside] = 0
    inside = int(ways[na])
    total = math.comb(na + nb, na)
    return float(Fraction(total - inside, total))


def _perm_two_sample_pvalue(d, a, b, reps, seed):
    na, nb = a.n, b.n
    thresh = _gap_threshold(d, na, nb)
    pooled = np.concatenate([a.values, b.values])
    pooled.sort()
    ends = _block_ends(pooled)
    t = ends.astype(np.int64)
    labels = np.zeros(na + nb, dtype=np.int64)
    labels[:na] = 1

    rng = dist.make_rng(seed)
    hits = 0
    done = 0
    while done < reps:
        rows = min(4096, reps - done)
        perm = rng.permuted(np.broadcast_to(labels, (rows, labels.size)), axis=1)
        i = np.cumsum(perm, axis=1)[:, ends - 1]
        gap = np.abs(i * nb - (t - i) * na).max(axis=1)
        hits += int(np.count_nonzero(gap >= thresh))
        done += rows
    return hits / reps


def two_sample_pvalue(d, a, b, method):
    """p-value of the two-sample statistic ``d`` observed for samples ``a``, ``b``.

    ``exact`` is the permutation distribution counted exactly (ties in the
    pooled data are respected) and is limited to ``n_a * n_b <= 10_000``.
    ``asymptotic`` is ``Q(sqrt(n_a n_b / (n_a + n_b)) d)``.  ``montecarlo``
    draws random relabelings of the pooled data.
    """
    if method.kind == "exact":
        return _exact_two_sample_sf(d, a, b)
    if method.kind == "asymptotic":
        na, nb = a.n, b.n
        return dist.kolmogorov_q(math.sqrt(na * nb / (na + nb)) * d)
    return _perm_two_sample_pvalue(d, a, b, method.reps, method.seed)


def ks_two_sample_test(
    a,
    b,
    alpha=DEFAULT_ALPHA,
    method=None,
    *,
    variable="",
    scenario="",
    allow_fallback=False,
):
    """Two-sample KS test of ``a`` against ``b``."""
    alpha = check_alpha(alpha)
    method = method or PMethod.exact()
    stat = sup_distance_two_sample(a, b)
    if (
        method.kind == "exact"
        and allow_fallback
        and a.n * b.n > EXACT_TWO_SAMPLE_MAX_PRODUCT
    ):
        method = PMethod.asymptotic()
    p = two_sample_pvalue(stat.d, a, b, method)
    return TestResult(
        variable=variable,
        scenario=scenario,
        test_kind=TestKind.TWO_SAMPLE_COMPARE,
        n=a.n,
        statistic=stat,
        p_value=p,
        alpha=alpha,
        verdict=decide(p, alpha),
        p_method=method,
        params_estimated=False,
        n_b=b.n,
    )


def recompute_pvalue(result, a=None, b=None):
    """Recompute a result's p-value from its statistic and method.

    Two-sample results need the original samples because the exact and
    permutation nulls depend on ties in the pooled data.
    """
    if result.test_kind is TestKind.NORMALITY_ONE_SAMPLE:
        return one_sample_pvalue(
            result.statistic.d, result.n, result.p_method, result.params_estimated
        )
    if a is None or b is None:
        raise ValueError("two-sample recomputation needs both samples")
    return two_sample_pvalue(result.statistic.d, a, b, result.p_method)


__all__ = [
    "DEFAULT_ALPHA",
    "EstimatedParametersWarning",
    "NOT_REJECTED_TEXT",
    "PMethod",
    "REJECTED_TEXT",
    "Sample",
    "TestKind",
    "TestResult",
    "Verdict",
    "check_alpha",
    "decide",
    "estimate_normal",
    "ks_normality_test",
    "ks_two_sample_test",
    "one_sample_pvalue",
    "recompute_pvalue",
    "two_sample_pvalue",
]
