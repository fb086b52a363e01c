"""Null distributions used by the Kolmogorov-Smirnov tests.

Three routes to a p-value for the one-sample statistic are provided:

* ``exact_dn_cdf`` / ``exact_dn_sf``: finite-n law of D_n for a fully
  specified continuous F.  Small and moderate ``n*d**2`` use the
  Durbin matrix method in the Marsaglia-Tsang-Wang formulation; the upper
  tail (``d >= 0.5`` or ``n*d**2 >= 5``) uses the exact one-sided Smirnov
  sum, doubled.  For ``d >= 0.5`` the doubling is exact; for
  ``n*d**2 >= 5`` the neglected two-sided intersection is of order
  ``exp(-8*n*d**2)`` < 1e-17, far below the matrix method's own rounding.
* ``kolmogorov_q``: the limiting survival function of sqrt(n)*D_n.
* ``mc_null_pvalue``: seeded Monte Carlo, optionally re-estimating the normal
  parameters in every replicate (Lilliefors null).

Monte Carlo uses numpy's ``Philox`` bit generator (Random123 Philox-4x64,
counter based).  Its output stream is specified independently of platform,
so a fixed seed reproduces the same estimate everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp, ndtr

from .exceptions import ExactMethodUnavailable

EXACT_MAX_N = 10_000
MIN_MC_REPS = 100

_Q_TERM_TOL = 1e-12
_Q_MAX_TERMS = 100
# below this, the Jacobi-theta dual of the alternating series converges fast
# while the direct series needs thousands of terms
_Q_DUAL_SWITCH = 1.0
_SMIRNOV_TAIL_NDD = 5.0
_MC_CHUNK_ROWS = 8192


@dataclass(frozen=True)
class NormalParams:
    """Location and scale of a normal distribution."""

    mu: float
    sigma: float

    def __post_init__(self):
        mu, sigma = float(self.mu), float(self.sigma)
        if not (math.isfinite(mu) and math.isfinite(sigma)):
            raise ValueError(f"normal parameters must be finite, got mu={mu}, sigma={sigma}")
        if sigma <= 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)


STANDARD_NORMAL = NormalParams(0.0, 1.0)


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    reps: int
    std_err: float
    seed: int


def normal_cdf(x, params=STANDARD_NORMAL):
    """Normal CDF ``Phi((x - mu) / sigma)``.

    Accepts a scalar or an array; scalars come back as ``float``.  Evaluation
    goes through ``scipy.special.ndtr`` (Cephes erf/erfc), accurate to a few
    ulps across the whole real line; far tails saturate to exactly 0 or 1.
    """
    z = (np.asarray(x, dtype=float) - params.mu) / params.sigma
    out = ndtr(z)
    if np.ndim(out) == 0:
        return float(out)
    return out


def kolmogorov_q(lam):
    """Kolmogorov survival function ``Q(lam) = P(K > lam)``.

    ``Q(lam) = 2 * sum_{k>=1} (-1)**(k-1) * exp(-2 k**2 lam**2)``, truncated
    once a term drops below 1e-12 or after 100 terms.  For ``lam < 1`` the
    equivalent theta-function form
    ``1 - sqrt(2 pi)/lam * sum_k exp(-(2k-1)**2 pi**2 / (8 lam**2))`` is
    summed instead, because the alternating series has not converged within
    100 terms there.
    """
    lam = float(lam)
    if math.isnan(lam) or lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if lam == 0.0:
        return 1.0
    if lam < _Q_DUAL_SWITCH:
        c = math.pi**2 / (8.0 * lam * lam)
        total = 0.0
        for k in range(1, _Q_MAX_TERMS + 1):
            term = math.exp(-((2 * k - 1) ** 2) * c)
            total += term
            if term < _Q_TERM_TOL:
                break
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / lam * total))

    total = 0.0
    for k in range(1, _Q_MAX_TERMS + 1):
        term = math.exp(-2.0 * k * k * lam * lam)
        total += term if k % 2 else -term
        if term < _Q_TERM_TOL:
            break
    return min(1.0, max(0.0, 2.0 * total))


def _check_n(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if n > EXACT_MAX_N:
        raise ExactMethodUnavailable(
            f"exact distribution is limited to n <= {EXACT_MAX_N} (got n={n}); "
            "use the asymptotic method"
        )
    return n


def _smirnov_upper(n, d):
    """Exact ``P(D_n^+ >= d)`` by the Smirnov/Birnbaum-Tingey sum."""
    j = np.arange(0, math.floor(n * (1.0 - d)) + 1, dtype=float)
    a = 1.0 - d - j / n
    keep = a > 0
    j, a = j[keep], a[keep]
    if j.size == 0:
        return 0.0
    logc = gammaln(n + 1) - gammaln(j + 1) - gammaln(n - j + 1)
    logt = logc + (n - j) * np.log(a) + (j - 1) * np.log(d + j / n)
    return float(min(1.0, d * math.exp(logsumexp(logt))))


def _matpow_scaled(h, n):
    """Return ``(M, e)`` with ``h**n == M * 2**e``, rescaling to avoid overflow."""
    result = np.eye(h.shape[0])
    res_exp = 0
    base = h.copy()
    base_exp = 0
    while True:
        if n & 1:
            result = result @ base
            res_exp += base_exp
            _, shift = np.frexp(np.max(np.abs(result)))
            result = np.ldexp(result, -int(shift))
            res_exp += int(shift)
        n >>= 1
        if not n:
            return result, res_exp
        base = base @ base
        base_exp *= 2
        _, shift = np.frexp(np.max(np.abs(base)))
        base = np.ldexp(base, -int(shift))
        base_exp += int(shift)


def _durbin_cdf(n, d):
    """``P(D_n < d)`` via the Durbin matrix (Marsaglia, Tsang & Wang 2003)."""
    k = int(n * d) + 1
    m = 2 * k - 1
    h = k - n * d
    i = np.arange(m)
    diff = i[:, None] - i[None, :] + 1
    H = (diff >= 0).astype(float)
    hp = h ** np.arange(1, m + 1)
    H[:, 0] -= hp
    H[m - 1, :] -= hp[::-1]
    if 2 * h - 1 > 0:
        H[m - 1, 0] += (2 * h - 1) ** m
    pos = diff > 0
    H[pos] *= np.exp(-gammaln(diff[pos] + 1))
    Q, e = _matpow_scaled(H, n)
    s = Q[k - 1, k - 1]
    if s <= 0:
        return 0.0
    logp = math.log(s) + e * math.log(2.0) + gammaln(n + 1) - n * math.log(n)
    return min(1.0, math.exp(logp))


def _exact_dn(n, d):
    """Return ``(cdf, sf)`` of D_n at d, each computed on its accurate side."""
    n = _check_n(n)
    d = float(d)
    if math.isnan(d):
        raise ValueError("d must not be NaN")
    if d >= 1.0:
        return 1.0, 0.0
    if d <= 0.5 / n:
        return 0.0, 1.0
    if d >= 0.5 or n * d * d >= _SMIRNOV_TAIL_NDD:
        sf = min(1.0, 2.0 * _smirnov_upper(n, d))
        return 1.0 - sf, sf
    cdf = _durbin_cdf(n, d)
    return cdf, 1.0 - cdf


def exact_dn_cdf(n, d):
    """Exact ``P(D_n <= d)`` under a fully specified continuous null.

    Raises
    ------
    ExactMethodUnavailable
        If ``n`` exceeds ``EXACT_MAX_N``.
    """
    return _exact_dn(n, d)[0]


def exact_dn_sf(n, d):
    """Exact ``P(D_n >= d)``; equals ``1 - exact_dn_cdf(n, d)`` but keeps
    precision in the far upper tail."""
    return _exact_dn(n, d)[1]


def asymptotic_pvalue(n, d):
    return kolmogorov_q(math.sqrt(n) * d)


def ks_d_sorted(u):
    """Two-sided KS distance of rows of sorted CDF values ``u`` from U(0, 1).

    ``u`` has shape ``(..., n)``; returns an array of shape ``(...)``.
    """
    n = u.shape[-1]
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - u, axis=-1)
    d_minus = np.max(u - (i - 1) / n, axis=-1)
    return np.maximum(d_plus, d_minus)


def _check_seed(seed):
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(seed)


def make_rng(seed):
    """Philox-backed generator used for every Monte Carlo path."""
    return np.random.Generator(np.random.Philox(_check_seed(seed)))


def mc_null_pvalue(n, d_obs, reps, seed, estimated_params=False):
    """Monte Carlo estimate of ``P(D_n >= d_obs)`` under the null.

    With ``estimated_params=False`` the null is "sample from a fully
    specified continuous F", so replicates are uniform samples compared with
    the uniform CDF.  With ``estimated_params=True`` each replicate is a
    standard normal sample compared against the normal fitted to that
    replicate (mean, n-1 standard deviation), which is the Lilliefors null.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if isinstance(reps, bool) or int(reps) != reps or reps < MIN_MC_REPS:
        raise ValueError(f"reps must be an integer >= {MIN_MC_REPS}, got {reps!r}")
    reps = int(reps)
    if estimated_params and n < 2:
        raise ValueError("estimated-parameter null needs n >= 2")
    seed = _check_seed(seed)
    d_obs = float(d_obs)

    rng = make_rng(seed)
    hits = 0
    done = 0
    while done < reps:
        rows = min(_MC_CHUNK_ROWS, reps - done)
        if estimated_params:
            z = rng.standard_normal((rows, n))
            z.sort(axis=1)
            mu = z.mean(axis=1, keepdims=True)
            sd = z.std(axis=1, ddof=1, keepdims=True)
            u = ndtr((z - mu) / sd)
        else:
            u = rng.random((rows, n))
            u.sort(axis=1)
        hits += int(np.count_nonzero(ks_d_sorted(u) >= d_obs))
        done += rows

    p_hat = hits / reps
    return McEstimate(
        p_hat=p_hat,
        reps=reps,
        std_err=math.sqrt(p_hat * (1.0 - p_hat) / reps),
        seed=seed,
    )
