"""Finite discrete distributions and the s-divergence family.

``K_s(p||q)`` is evaluated term by term as a Csiszar sum

    K_s(p||q) = sum_i q_i * phi_s(ln(p_i / q_i)),
    phi_s(L)  = (exp(s L) - 1 - s (exp(L) - 1)) / (s (s - 1)),

which equals ``(sum p_i^s q_i^(1-s) - 1) / (s (s - 1))`` whenever both
vectors sum to one, but has non-negative terms, no pole at s = 0 or s = 1 and
no cancellation against the constant ``1``.  Each term is reduced to an order
``sigma <= 1/2`` with the swap identity ``q phi_s(L) = p phi_{1-s}(-L)``, so the
only remaining removable singularity sits at ``sigma = 0`` where
``expm1(sigma L) / sigma`` is evaluated by its own short series.  Terms with a
small log-ratio use the power series ``phi_s(L) = sum_k h_k(s) L^k / k!`` with
``h_k(s) = 1 + s + ... + s^(k-2)``.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    DivergenceOverflow,
    EqualDistributions,
    FunctionDomainError,
    InvalidOrder,
    LengthMismatch,
    NonFiniteEntry,
    NonPositiveEntry,
    NotNormalized,
    OutOfRange,
    TooShort,
    ValidationError,
)

NORMALIZATION_TOL = 1e-9
SUM_TOL = 1e-12

# |ln ratio| and |s ln ratio| below which the per-term power series is used.
SERIES_LOG_RADIUS = 0.5
SERIES_ORDER_RADIUS = 1.0
_SERIES_TERMS = 26
# |y| below which expm1(y)/y comes from its Taylor polynomial.
_EXPM1_SERIES = 1e-5
# log of the largest single weighted term handled in linear space.
_LOG_BIG = 600.0
_LOG_MAX = math.log(sys.float_info.max)
# Largest number of (s, i) cells evaluated at once.
_CHUNK_CELLS = 1 << 21


@dataclass(frozen=True, eq=False)
class Distribution:
    """A strictly positive probability vector summing to one.

    Build instances with :func:`make_distribution`; direct construction
    validates but never rescales.
    """

    probs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.probs, dtype=float).ravel()
        _validate_entries(arr)
        total = float(np.sum(arr))  # pairwise; ample for SUM_TOL
        if abs(total - 1.0) > SUM_TOL:
            raise NotNormalized(f"entries sum to {total!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @property
    def n(self) -> int:
        return self.probs.size

    def __len__(self) -> int:
        return self.probs.size

    def tolist(self) -> list[float]:
        return self.probs.tolist()

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Distribution({self.probs.tolist()!r})"


def _validate_entries(arr: np.ndarray) -> None:
    if arr.size < 2:
        raise TooShort(f"need at least 2 entries, got {arr.size}")
    bad = ~np.isfinite(arr)
    if bad.any():
        raise NonFiniteEntry(f"entry {int(np.argmax(bad))} is not finite")
    nonpos = arr <= 0
    if nonpos.any():
        i = int(np.argmax(nonpos))
        raise NonPositiveEntry(f"entry {i} is {arr[i]!r}; all entries must be > 0")


def make_distribution(values: Sequence[float], renormalize: bool = False) -> Distribution:
    """Validate ``values`` as a member of the open probability simplex.

    Without ``renormalize`` the entries must already sum to one within
    ``NORMALIZATION_TOL``; they are then divided by their (exactly rounded)
    sum in either case.

    >>> make_distribution([1, 1, 2], renormalize=True).tolist()
    [0.25, 0.25, 0.5]
    """
    try:
        arr = np.array(values, dtype=float).ravel()
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"not a sequence of numbers: {exc}") from None
    _validate_entries(arr)
    total = math.fsum(arr.tolist())
    if not renormalize and abs(total - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"entries sum to {total!r} (use renormalize)")
    arr = arr / total
    # push the residual into the largest entry until the rounded sum is 1
    big = int(np.argmax(arr))
    for _ in range(4):
        resid = 1.0 - math.fsum(arr.tolist())
        if resid == 0.0:
            break
        arr[big] += resid
    return Distribution(arr)


def check_order(s) -> float:
    s = float(s)
    if not math.isfinite(s):
        raise InvalidOrder(f"order must be finite, got {s!r}")
    return s


def _pair(p: Distribution, q: Distribution) -> tuple[np.ndarray, np.ndarray]:
    if p.n != q.n:
        raise LengthMismatch(f"lengths differ: {p.n} != {q.n}")
    return p.probs, q.probs


def log_ratio(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise ``ln(a/b)`` for positive arrays.

    Exactly antisymmetric: ``log_ratio(b, a) == -log_ratio(a, b)`` bit for bit,
    and accurate to a few ulps relative even when ``a`` and ``b`` nearly agree.
    """
    a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    with np.errstate(over="ignore"):
        d = (hi - lo) / lo
    mag = np.log1p(d)
    wide = ~np.isfinite(d)
    if wide.any():
        mag[wide] = np.log(hi[wide]) - np.log(lo[wide])
    return np.where(a >= b, mag, -mag)


@dataclass(frozen=True, eq=False)
class LogRatioStats:
    """Log-ratios ``L_i = ln(p_i/q_i)`` and their ``q``-weighted moments."""

    L: np.ndarray
    mu1: float
    mu2: float
    mu3: float
    Lmax: float
    argmax_index: int


def log_ratio_stats(p: Distribution, q: Distribution) -> LogRatioStats:
    pp, qq = _pair(p, q)
    L = log_ratio(pp, qq)
    L.setflags(write=False)
    mu = [math.fsum((qq * L**k).tolist()) for k in (1, 2, 3)]
    i = int(np.argmax(L))
    return LogRatioStats(L, mu[0], mu[1], mu[2], float(L[i]), i)


# ---------------------------------------------------------------------------
# term kernel


def _expm1_over(y: np.ndarray) -> np.ndarray:
    """expm1(y)/y with the removable singularity at y = 0 filled in."""
    small = np.abs(y) < _EXPM1_SERIES
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.expm1(y) / y
    ys = y[small]
    out[small] = 1.0 + ys * (0.5 + ys * (1.0 / 6.0 + ys / 24.0))
    return out


def _phi_series(ell: np.ndarray, sig: np.ndarray) -> np.ndarray:
    c = 0.5 * ell * ell
    h = np.ones_like(ell)
    acc = c.copy()
    for k in range(3, _SERIES_TERMS + 1):
        h = 1.0 + sig * h
        c = c * ell / k
        acc += h * c
    return acc


def _terms(w, o, ell, sigma):
    """Weighted terms ``w * phi_sigma(ell)`` for ``sigma <= 1/2``.

    ``o = w * exp(ell)`` is passed separately so ``o - w`` is formed from the
    data rather than from the rounded log-ratio.
    """
    shape = np.broadcast_shapes(w.shape, sigma.shape)
    sig = np.broadcast_to(sigma, shape)
    y = sig * ell
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        wA = w * ell * _expm1_over(y)
        far = y > 700.0
        if far.any():
            # w * expm1(y) overflows before the product does
            wA[far] = (np.exp(np.log(w[far]) + y[far]) - w[far]) / sig[far]
        out = (wA - (o - w)) / (sig - 1.0)
    series = (np.abs(ell) < SERIES_LOG_RADIUS) & (np.abs(y) < SERIES_ORDER_RADIUS)
    if series.any():
        out[series] = w[series] * _phi_series(ell[series], sig[series])
    rows = sigma.reshape(-1)
    for r in np.flatnonzero(rows == -1.0):
        # s = 2 or s = -1: chi-square form, no transcendental functions
        out[r] = (o[r] - w[r]) ** 2 / (2.0 * o[r])
    for r in np.flatnonzero(rows == 0.5):
        out[r] = 2.0 * (o[r] - w[r]) ** 2 / (np.sqrt(o[r]) + np.sqrt(w[r])) ** 2
    return out


def _ks_rows(p: np.ndarray, q: np.ndarray, L: np.ndarray, s: np.ndarray) -> np.ndarray:
    """K_s(p||q) for every order in ``s`` given the log-ratios ``L = ln(p/q)``."""
    s = np.asarray(s, dtype=float).reshape(-1)
    out = np.empty(s.size)
    step = max(1, _CHUNK_CELLS // max(1, p.size))
    for lo in range(0, s.size, step):
        out[lo:lo + step] = _ks_chunk(p, q, L, s[lo:lo + step])
    return out


def _ks_chunk(p, q, L, s):
    swap = (s > 0.5)[:, None]
    sigma = np.where(s > 0.5, 1.0 - s, s)[:, None]
    w = np.where(swap, p, q)
    o = np.where(swap, q, p)
    ell = np.where(swap, -L, L)
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    peak = np.max(logw + sigma * ell, axis=1)
    out = np.empty(s.size)
    big = peak > _LOG_BIG
    if (~big).any():
        terms = _terms(w[~big], o[~big], ell[~big], sigma[~big])
        out[~big] = [math.fsum(row) for row in terms.tolist()]
    for r in np.flatnonzero(big):
        out[r] = _ks_log_domain(w[r], o[r], ell[r], float(sigma[r, 0]), float(s[r]))
    bad = ~np.isfinite(out)
    if bad.any():
        raise DivergenceOverflow(f"K_s overflows at s={float(s[np.argmax(bad)])!r}")
    return out


def _ks_log_domain(w, o, ell, sig, s_orig):
    # only reachable for sig < 0, where sig (sig - 1) > 0
    lw = np.log(w) + sig * ell
    m = float(lw.max())
    log_big = m + math.log(math.fsum(np.exp(lw - m).tolist()))
    denom = sig * (sig - 1.0)
    log_val = log_big - math.log(denom)
    if log_val > _LOG_MAX:
        raise DivergenceOverflow(
            f"K_s overflows at s={s_orig!r} (log value {log_val:.6g} exceeds {_LOG_MAX:.6g})"
        )
    rest = (-math.fsum(w.tolist()) - sig * math.fsum((o - w).tolist())) / denom
    return math.exp(log_val) + rest


# ---------------------------------------------------------------------------
# public operations


def ks(p: Distribution, q: Distribution, s: float) -> float:
    """Relative divergence of type ``s``, ``K_s(p||q)``.

    ``K_0(p||q) = KL(q||p)`` and ``K_1(p||q) = KL(p||q)``.  Raises
    :class:`DivergenceOverflow` instead of returning ``inf``.

    >>> p = make_distribution([0.5, 0.5]); q = make_distribution([0.25, 0.75])
    >>> ks(p, q, 2)
    0.16666666666666666
    """
    s = check_order(s)
    pp, qq = _pair(p, q)
    return float(_ks_rows(pp, qq, log_ratio(pp, qq), np.array([s]))[0])


def ks_curve(p: Distribution, q: Distribution, s_values: Sequence[float]) -> np.ndarray:
    """``ks`` over many orders, sharing one log-ratio pass."""
    s = np.array([check_order(v) for v in np.ravel(s_values)], dtype=float)
    pp, qq = _pair(p, q)
    return _ks_rows(pp, qq, log_ratio(pp, qq), s)


def ks_terms(p: Distribution, q: Distribution, s: float) -> np.ndarray:
    """The per-component terms whose sum is ``ks(p, q, s)``.

    Only available where no term needs log-domain scaling; raises
    :class:`DivergenceOverflow` otherwise.
    """
    s = check_order(s)
    pp, qq = _pair(p, q)
    L = log_ratio(pp, qq)
    if s > 0.5:
        w, o, ell, sig = pp, qq, -L, 1.0 - s
    else:
        w, o, ell, sig = qq, pp, L, s
    if float(np.max(np.log(w) + sig * ell)) > _LOG_BIG:
        raise DivergenceOverflow(f"terms need log-domain scaling at s={s!r}")
    return _terms(w[None, :], o[None, :], ell[None, :], np.array([[sig]]))[0]


def kl(p: Distribution, q: Distribution) -> float:
    """Kullback-Leibler divergence ``sum p_i ln(p_i/q_i)`` (same path as ``ks(p, q, 1)``)."""
    return ks(p, q, 1.0)


def hellinger_sq(p: Distribution, q: Distribution) -> float:
    """Squared Hellinger distance ``sum (sqrt p_i - sqrt q_i)^2``."""
    pp, qq = _pair(p, q)
    # (sqrt p - sqrt q)^2 rewritten to avoid cancellation for p ~ q
    terms = (pp - qq) ** 2 / (np.sqrt(pp) + np.sqrt(qq)) ** 2
    return math.fsum(terms.tolist())


def chi_sq(p: Distribution, q: Distribution) -> float:
    """Pearson chi-square distance ``sum (p_i - q_i)^2 / q_i``."""
    pp, qq = _pair(p, q)
    return math.fsum(((pp - qq) ** 2 / qq).tolist())


class AlphaFamily(NamedTuple):
    i_alpha: float
    renyi: float
    tsallis: float


def alpha_family(p: Distribution, q: Distribution, alpha: float) -> AlphaFamily:
    """``I_alpha = sum p^a q^(1-a)`` with its Renyi and Tsallis divergences.

    Everything is derived from ``K_alpha`` through
    ``I_alpha = 1 + alpha (alpha - 1) K_alpha``, so ``alpha = 1`` is the KL limit
    for both divergences rather than a special case.
    """
    a = check_order(alpha)
    k = ks(p, q, a)
    x = a * (a - 1.0) * k
    i_alpha = 1.0 + x
    if math.isinf(i_alpha):
        raise DivergenceOverflow(f"I_alpha overflows at alpha={a!r}")
    tsallis = a * k
    if a == 1.0:
        return AlphaFamily(1.0, k, k)
    renyi = math.log1p(x) / (a - 1.0)
    return AlphaFamily(i_alpha, renyi, tsallis)


def csiszar_f(p: Distribution, q: Distribution, f: Callable) -> float:
    """Csiszar f-divergence ``sum q_i f(p_i/q_i)``.

    ``f`` may be any callable; array-aware callables (including
    :class:`~sdivergence.convexity.ScalarFunctionSpec`) are evaluated in one
    vectorized call.
    """
    pp, qq = _pair(p, q)
    ratio = pp / qq
    vals = None
    try:
        with np.errstate(all="ignore"):
            vals = np.asarray(f(ratio), dtype=float)
        if vals.shape != ratio.shape:
            vals = None
    except Exception:
        vals = None
    if vals is None:
        try:
            vals = np.array([float(f(float(x))) for x in ratio])
        except Exception as exc:
            raise FunctionDomainError(f"f failed on a likelihood ratio: {exc}") from None
    if not np.isfinite(vals).all():
        i = int(np.argmax(~np.isfinite(vals)))
        raise FunctionDomainError(f"f({ratio[i]!r}) is not finite")
    return math.fsum((qq * vals).tolist())


def lambda_s(x: Sequence[float], w: Distribution, s: float) -> float:
    """Weighted power-mean gap ``(sum w x^s - (sum w x)^s) / (s (s-1))``.

    With ``m = sum w x`` this is ``m^s K_s(w x / m || w)``, which is how it is
    evaluated; ``s`` in {0, 1} gives the continuous limits.
    """
    s = check_order(s)
    xx = np.array(x, dtype=float).ravel()
    if xx.size != w.n:
        raise LengthMismatch(f"lengths differ: {xx.size} != {w.n}")
    if not np.isfinite(xx).all():
        raise NonFiniteEntry("x has non-finite entries")
    if (xx <= 0).any():
        raise NonPositiveEntry("x must be strictly positive")
    ww = w.probs
    m = math.fsum((ww * xx).tolist())
    ell = log_ratio(xx, np.full_like(xx, m))
    o = ww * xx / m
    k = float(_ks_rows(o, ww, ell, np.array([s]))[0])
    if k == 0.0:
        return 0.0
    log_val = s * math.log(m) + math.log(k)
    if log_val > _LOG_MAX:
        raise DivergenceOverflow(f"lambda_s overflows at s={s!r}")
    return math.exp(s * math.log(m)) * k


def growth_lower_bound(p: Distribution, q: Distribution, s: float) -> float:
    """Lower bound ``(q* (p*/q*)^s - 1) / (s (s-1))`` on ``K_s(p||q)`` for ``s > 1``.

    The starred entries are taken at the index maximizing ``p_i / q_i``.
    """
    s = check_order(s)
    if s <= 1.0:
        raise OutOfRange(f"growth bound needs s > 1, got {s!r}")
    pp, qq = _pair(p, q)
    L = log_ratio(pp, qq)
    i = int(np.argmax(L))
    if L[i] <= 0.0:
        raise EqualDistributions("max p_i/q_i is 1; the bound degenerates")
    expo = math.log(qq[i]) + s * float(L[i])
    if expo > _LOG_MAX:
        raise DivergenceOverflow(f"growth bound overflows at s={s!r}")
    val = math.expm1(expo) / (s * (s - 1.0))
    if math.isinf(val):
        raise DivergenceOverflow(f"growth bound overflows at s={s!r}")
    return val


def unboundedness_witness(p: Distribution, q: Distribution, threshold: float = 1e3,
                          s_max: float = 50.0) -> Optional[float]:
    """An order ``s <= s_max`` with ``K_s(p||q) > threshold``, or ``None`` if p == q.

    Orders in ``(1, s_max]`` are scanned first on a half-unit grid.  When the
    pair is too close for that window, the search walks the negative tail by
    doubling ``|s|``; ``K_s`` is convex in ``s`` and unbounded there too.  An
    overflow while doubling is resolved by bisection back into range.
    """
    pp, qq = _pair(p, q)
    if np.array_equal(pp, qq):
        return None
    grid = np.arange(1.5, s_max + 1e-9, 0.5)
    k = ks_curve(p, q, grid)
    hit = np.flatnonzero(k > threshold)
    if hit.size:
        return float(grid[hit[0]])
    lo, s = 0.0, -1.0
    while True:
        try:
            if ks(p, q, s) > threshold:
                return s
        except DivergenceOverflow:
            # the value is beyond double range at s: bisect towards lo
            for _ in range(200):
                mid = 0.5 * (lo + s)
                try:
                    if ks(p, q, mid) > threshold:
                        return mid
                    lo = mid
                except DivergenceOverflow:
                    s = mid
            raise
        lo, s = s, 2.0 * s
        if not math.isfinite(s):
            raise DivergenceOverflow("no witness found before |s| overflowed")
