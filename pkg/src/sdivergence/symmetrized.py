"""Sum and product symmetrizations of the s-divergence.

``U_s = K_s(p||q) + K_s(q||p)`` and ``V_s = K_s(p||q) K_s(q||p)``, their
normalized forms ``U*_s = U_s / 2`` and ``V*_s = sqrt(V_s)``, and the Jeffreys
divergence ``J = U_1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Distribution, _ks_rows, _pair, check_order, log_ratio
from .errors import DivergenceOverflow


@dataclass(frozen=True)
class SymmetrizedPoint:
    s: float
    k_pq: float
    k_qp: float
    u: float
    v: float
    u_star: float
    v_star: float

    def as_row(self) -> tuple[float, ...]:
        return (self.s, self.k_pq, self.k_qp, self.u, self.v, self.u_star, self.v_star)


CURVE_COLUMNS = ("s", "k_pq", "k_qp", "u", "v", "u_star", "v_star")


def _point(s: float, k_pq: float, k_qp: float) -> SymmetrizedPoint:
    u = k_pq + k_qp
    v = k_pq * k_qp
    if math.isinf(u) or math.isinf(v):
        raise DivergenceOverflow(f"U_s or V_s overflows at s={s!r}")
    return SymmetrizedPoint(s, k_pq, k_qp, u, v, 0.5 * u, math.sqrt(v))


def symmetrized_curve(p: Distribution, q: Distribution, s_values: Sequence[float]) -> list[SymmetrizedPoint]:
    """Evaluate both directions of ``K_s`` once per order and derive every measure.

    The log-ratios are computed once; the reverse direction reuses them with
    the sign flipped.
    """
    s = np.array([check_order(v) for v in np.ravel(s_values)], dtype=float)
    pp, qq = _pair(p, q)
    L = log_ratio(pp, qq)
    fwd = _ks_rows(pp, qq, L, s)
    rev = _ks_rows(qq, pp, -L, s)
    return [_point(float(si), float(a), float(b)) for si, a, b in zip(s, fwd, rev)]


def symmetrized_point(p: Distribution, q: Distribution, s: float) -> SymmetrizedPoint:
    return symmetrized_curve(p, q, [s])[0]


def u(p: Distribution, q: Distribution, s: float) -> float:
    """``U_s(p, q) = K_s(p||q) + K_s(q||p)``."""
    return symmetrized_point(p, q, s).u


def v(p: Distribution, q: Distribution, s: float) -> float:
    """``V_s(p, q) = K_s(p||q) K_s(q||p)``."""
    return symmetrized_point(p, q, s).v


def u_star(p: Distribution, q: Distribution, s: float) -> float:
    return symmetrized_point(p, q, s).u_star


def v_star(p: Distribution, q: Distribution, s: float) -> float:
    return symmetrized_point(p, q, s).v_star


def jeffreys(p: Distribution, q: Distribution) -> float:
    """Jeffreys divergence ``sum (p_i - q_i) ln(p_i/q_i)``."""
    pp, qq = _pair(p, q)
    return math.fsum(((pp - qq) * log_ratio(pp, qq)).tolist())
