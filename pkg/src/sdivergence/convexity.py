"""Numerical checks for one-dimensional convex functions.

Every residual below is arranged so that it is non-negative for a convex
argument; callers compare against ``-tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import simpson

from .core import Distribution, ks_curve
from .errors import (
    EqualDistributions,
    FunctionDomainError,
    NonConvexTable,
    OrderViolation,
    OutOfRange,
    ValidationError,
)

BUILTIN_KINDS = ("square", "abs", "exp", "xlogx", "neg_entropy")
KINDS = BUILTIN_KINDS + ("log_ks_of_pair", "custom-table")

TABLE_CONVEXITY_TOL = 1e-12


def _xlogx(x):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)


_BUILTINS = {
    "square": (lambda x: x * x, (-math.inf, math.inf)),
    "abs": (np.abs, (-math.inf, math.inf)),
    "exp": (np.exp, (-math.inf, math.inf)),
    "xlogx": (_xlogx, (0.0, math.inf)),
    "neg_entropy": (lambda x: _xlogx(x) + _xlogx(1.0 - x), (0.0, 1.0)),
}


@dataclass(frozen=True, eq=False)
class ScalarFunctionSpec:
    """A named convex function of one variable.

    ``params`` is empty for the built-ins, ``(p, q)`` for ``log_ks_of_pair``
    (``s -> ln K_s(p||q)``) and ``(xs, ys)`` for ``custom-table`` (piecewise
    linear interpolation, rejected unless convex).
    """

    kind: str
    params: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown function kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "log_ks_of_pair":
            p, q = self.params
            if p == q:
                raise EqualDistributions("ln K_s is -inf for identical distributions")
        elif self.kind == "custom-table":
            xs, ys = (np.array(a, dtype=float).ravel() for a in self.params)
            _check_table(xs, ys)
            xs.setflags(write=False)
            ys.setflags(write=False)
            object.__setattr__(self, "params", (xs, ys))

    @classmethod
    def builtin(cls, kind: str) -> "ScalarFunctionSpec":
        if kind not in BUILTIN_KINDS:
            raise ValidationError(f"{kind!r} is not a built-in function")
        return cls(kind)

    @classmethod
    def log_ks_of_pair(cls, p: Distribution, q: Distribution) -> "ScalarFunctionSpec":
        return cls("log_ks_of_pair", (p, q))

    @classmethod
    def table(cls, xs, ys) -> "ScalarFunctionSpec":
        return cls("custom-table", (xs, ys))

    @property
    def domain(self) -> tuple[float, float]:
        if self.kind in _BUILTINS:
            return _BUILTINS[self.kind][1]
        if self.kind == "custom-table":
            xs = self.params[0]
            return float(xs[0]), float(xs[-1])
        return -math.inf, math.inf

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        lo, hi = self.domain
        if np.isnan(arr).any() or (arr < lo).any() or (arr > hi).any():
            raise FunctionDomainError(f"{self.kind}: argument outside [{lo}, {hi}]")
        with np.errstate(over="ignore"):
            if self.kind in _BUILTINS:
                out = np.asarray(_BUILTINS[self.kind][0](arr), dtype=float)
            elif self.kind == "custom-table":
                out = np.interp(arr, *self.params)
            else:
                p, q = self.params
                out = np.log(ks_curve(p, q, arr.ravel())).reshape(arr.shape)
        if not np.isfinite(out).all():
            raise FunctionDomainError(f"{self.kind} is not finite on the given arguments")
        return float(out) if out.ndim == 0 else out

    def __repr__(self) -> str:
        return f"ScalarFunctionSpec({self.kind!r})"


def _check_table(xs: np.ndarray, ys: np.ndarray) -> None:
    if xs.size < 2 or xs.size != ys.size:
        raise ValidationError("table needs at least two (x, y) points of equal count")
    if not (np.isfinite(xs).all() and np.isfinite(ys).all()):
        raise ValidationError("table entries must be finite")
    if (np.diff(xs) <= 0).any():
        raise OrderViolation("table abscissae must be strictly increasing")
    slopes = np.diff(ys) / np.diff(xs)
    if slopes.size >= 2:
        scale = np.maximum(1.0, np.abs(slopes[1:]))
        if (np.diff(slopes) < -TABLE_CONVEXITY_TOL * scale).any():
            raise NonConvexTable("table is not convex (slopes decrease)")


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValidationError("interval endpoints must be finite")
        if not a < b:
            raise OrderViolation(f"interval needs a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


def _increasing(*xs: float) -> None:
    if any(not math.isfinite(x) for x in xs):
        raise ValidationError("abscissae must be finite")
    if any(x >= y for x, y in zip(xs, xs[1:])):
        raise OrderViolation(f"expected strictly increasing arguments, got {xs}")


def midpoint_gap(f: ScalarFunctionSpec, s: float, t: float) -> float:
    """``F(s, t) = f(s) + f(t) - 2 f((s+t)/2)``."""
    return f(s) + f(t) - 2.0 * f((s + t) / 2.0)


def weighted_convexity_residual(f: ScalarFunctionSpec, x: float, y: float, p: float) -> float:
    """``p f(x) + (1-p) f(y) - f(p x + (1-p) y)`` for a weight ``0 < p < 1``."""
    if not 0.0 < p < 1.0:
        raise OutOfRange(f"weight must lie in (0, 1), got {p!r}")
    r = 1.0 - p
    return p * f(x) + r * f(y) - f(p * x + r * y)


def three_point_residual(f: ScalarFunctionSpec, s1: float, s2: float, s3: float) -> float:
    """``f(s1)(s3-s2) + f(s2)(s1-s3) + f(s3)(s2-s1)`` for ``s1 < s2 < s3``."""
    _increasing(s1, s2, s3)
    return f(s1) * (s3 - s2) + f(s2) * (s1 - s3) + f(s3) * (s2 - s1)


class ChordResiduals(NamedTuple):
    r_i: float
    r_ii: float


def chord_lemma_residuals(f: ScalarFunctionSpec, x1: float, x2: float, x3: float) -> ChordResiduals:
    """Slack in the two half-chord inequalities for ``x1 < x2 < x3``.

    ``r_i  = f((x2+x3)/2) - f((x1+x3)/2) - (f(x2) - f(x1))/2``
    ``r_ii = (f(x3) - f(x2))/2 - f((x1+x3)/2) + f((x1+x2)/2)``
    """
    _increasing(x1, x2, x3)
    f1, f2, f3 = f(x1), f(x2), f(x3)
    m13 = f((x1 + x3) / 2.0)
    r_i = f((x2 + x3) / 2.0) - m13 - (f2 - f1) / 2.0
    r_ii = (f3 - f2) / 2.0 - (m13 - f((x1 + x2) / 2.0))
    return ChordResiduals(r_i, r_ii)


class PropXResult(NamedTuple):
    max_interior: float
    endpoint_value: float
    margin: float


def prop_x_endpoint_max(f: ScalarFunctionSpec, interval: Interval, grid_n: int = 101) -> PropXResult:
    """Scan ``F(s, t)`` on a ``grid_n x grid_n`` grid over ``interval``.

    ``max_interior`` excludes the two corner cells ``(a, b)`` and ``(b, a)``;
    ``margin = F(a, b) - max_interior`` is non-negative for convex ``f``.
    Midpoints of grid nodes are nodes of the half-step grid, so ``f`` is
    evaluated only ``2 grid_n - 1`` times.
    """
    grid_n = int(grid_n)
    if grid_n < 2:
        raise OutOfRange("grid_n must be at least 2")
    a, b = interval.a, interval.b
    half = np.linspace(a, b, 2 * grid_n - 1)
    fh = np.asarray(f(half), dtype=float)
    fs = fh[::2]
    idx = np.add.outer(np.arange(grid_n), np.arange(grid_n))
    F = fs[:, None] + fs[None, :] - 2.0 * fh[idx]
    F[0, -1] = F[-1, 0] = -np.inf
    max_interior = float(F.max())
    endpoint = midpoint_gap(f, a, b)
    return PropXResult(max_interior, endpoint, endpoint - max_interior)


class PreHHResiduals(NamedTuple):
    left: float
    right: float


def pre_hh_residuals(f: ScalarFunctionSpec, interval: Interval, t: float) -> PreHHResiduals:
    """Slack in ``2 f((a+b)/2) <= f(t) + f(a+b-t) <= f(a) + f(b)`` for ``t`` in ``[a, b]``."""
    a, b = interval.a, interval.b
    if not a <= t <= b:
        raise OutOfRange(f"t={t!r} lies outside [{a}, {b}]")
    c = a + b
    pair = f(t) + f(c - t)
    return PreHHResiduals(pair - 2.0 * f(c / 2.0), f(a) + f(b) - pair)


class HHValues(NamedTuple):
    midpoint_val: float
    mean_val: float
    endpoint_avg: float


def hermite_hadamard_check(f: ScalarFunctionSpec, interval: Interval, quad_n: int = 64) -> HHValues:
    """The three members of the Hermite-Hadamard chain.

    The mean value comes from composite Simpson with ``quad_n`` panels
    (``2 quad_n`` subintervals).
    """
    quad_n = int(quad_n)
    if quad_n < 16:
        raise OutOfRange("quad_n must be at least 16")
    a, b = interval.a, interval.b
    xs = np.linspace(a, b, 2 * quad_n + 1)
    mean = float(simpson(np.asarray(f(xs), dtype=float), x=xs)) / (b - a)
    return HHValues(f((a + b) / 2.0), mean, (f(a) + f(b)) / 2.0)
