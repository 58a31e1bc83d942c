"""Extended-precision reference values for ``K_s``.

Shares nothing with the double-precision kernel: no series, no log-ratio
helper, no compensated sums.  The stored doubles are taken as exact inputs and
the homogeneous form

    (sum p^s q^(1-s) - s sum p - (1-s) sum q) / (s (s-1))

is evaluated in mpmath, with the working precision raised until the digits
lost to cancellation are covered.
"""

from __future__ import annotations

import math
from typing import Sequence

import mpmath
from mpmath import mp

from .core import Distribution, check_order
from .errors import LengthMismatch, ValidationError

MIN_DIGITS = 30


def _kl_terms(a, b, la, lb):
    # a ln(a/b) - a + b, with its cancellation scale
    vals = [x * (lx - ly) - x + y for x, y, lx, ly in zip(a, b, la, lb)]
    scale = mp.fsum(abs(x * (lx - ly)) + x + y for x, y, lx, ly in zip(a, b, la, lb))
    return mp.fsum(vals), scale


def _evaluate(P, Q, lp, lq, s):
    if s == 0:
        return _kl_terms(Q, P, lq, lp)
    if s == 1:
        return _kl_terms(P, Q, lp, lq)
    S = mp.mpf(s)
    powers = [mp.exp(S * a + (1 - S) * b) for a, b in zip(lp, lq)]
    sp, sq = mp.fsum(P), mp.fsum(Q)
    num = mp.fsum(powers) - S * sp - (1 - S) * sq
    scale = mp.fsum(powers) + abs(S) * sp + abs(1 - S) * sq
    return num / (S * (S - 1)), scale / abs(S * (S - 1))


def oracle_ks(p: Distribution, q: Distribution, s: float, precision_digits: int = 50) -> float:
    """``K_s(p||q)`` correct to at least ``precision_digits - 5`` digits, rounded to double."""
    return oracle_ks_curve(p, q, [s], precision_digits)[0]


def oracle_ks_curve(p: Distribution, q: Distribution, s_values: Sequence[float],
                    precision_digits: int = 50) -> list[float]:
    if precision_digits < MIN_DIGITS:
        raise ValidationError(f"oracle needs at least {MIN_DIGITS} digits")
    if p.n != q.n:
        raise LengthMismatch(f"lengths differ: {p.n} != {q.n}")
    s_list = [check_order(s) for s in s_values]
    if p == q:
        return [0.0] * len(s_list)
    out: list = [None] * len(s_list)
    pending = list(range(len(s_list)))
    guard = 20
    while pending:
        if guard > 4000:
            raise ValidationError("oracle cannot resolve K_s: cancellation exceeds 4000 digits")
        retry, need = [], guard
        with mp.workdps(precision_digits + guard):
            P = [mp.mpf(x) for x in p.probs.tolist()]
            Q = [mp.mpf(x) for x in q.probs.tolist()]
            lp = [mp.log(x) for x in P]
            lq = [mp.log(x) for x in Q]
            for i in pending:
                val, scale = _evaluate(P, Q, lp, lq, s_list[i])
                # digits lost to cancellation at this precision
                lost = float(mpmath.log10(scale / abs(val))) if val != 0 else 2.0 * guard
                if lost + 10 <= guard:
                    out[i] = float(val)
                else:
                    retry.append(i)
                    need = max(need, int(lost) + 30)
        pending, guard = retry, max(need, guard + 20)
    return out
