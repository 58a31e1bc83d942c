"""Randomized verification of the identities and inequalities of the s-divergence family.

Each registered check turns one trial (a random distribution pair plus any
random orders it needs) into a JSON-serializable *case*, and scores the case
with a residual function: a signed slack that is non-negative when the
property holds.  The suite reports the minimum residual per check, and the
worst case itself as a witness when the check fails, so
``replay(name, witness, cfg)`` reproduces a failure exactly.

Trials ``0``, ``1`` and ``2`` of every check are adversarial: a pair differing
by a relative perturbation of 1e-9, a pair whose likelihood ratios span
1e-6..1e6, and the two-point pair ``(1/2, 1/2), (1/4, 3/4)``.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Iterable, Optional

import numpy as np

from . import convexity as cx
from .core import (
    Distribution,
    alpha_family,
    chi_sq,
    csiszar_f,
    growth_lower_bound,
    hellinger_sq,
    kl,
    ks_curve,
    lambda_s,
    make_distribution,
)
from .errors import DivergenceError, UnknownCheck, ValidationError
from .oracle import oracle_ks_curve
from .symmetrized import symmetrized_curve

DEFAULT_S_GRID = tuple(float(x) for x in np.arange(-5.0, 6.0 + 1e-9, 0.25))

SINGULAR_POINTS = (
    1e-9, -1e-9, 1e-6, -1e-6,
    1e-4 * (1 - 1e-6), 1e-4 * (1 + 1e-6), -1e-4 * (1 - 1e-6), -1e-4 * (1 + 1e-6),
    1 + 1e-9, 1 - 1e-9, 1 + 1e-6, 1 - 1e-6,
)

GROWTH_ORDERS = (1.001, 1.01, 1.1) + tuple(float(x) for x in np.arange(1.5, 50.0 + 1e-9, 0.5))

QUAD_TOL = 1e-8

_U64 = 1 << 64


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 1
    trials: int = 1000
    n_range: tuple = (2, 64)
    s_grid: tuple = DEFAULT_S_GRID
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    checks: Optional[tuple] = None
    s_range: tuple = (-5.0, 6.0)
    samples_per_trial: int = 20
    oracle_trials: int = 100
    oracle_digits: int = 50
    oracle_tol: float = 1e-10
    log_tol: float = 1e-10

    def __post_init__(self):
        if not 0 <= int(self.seed) < _U64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        if int(self.trials) < 1:
            raise ValidationError("trials must be at least 1")
        lo, hi = (int(x) for x in self.n_range)
        if lo < 2 or hi < lo:
            raise ValidationError(f"invalid n_range {self.n_range!r}")
        grid = tuple(float(x) for x in self.s_grid)
        if not grid or not all(math.isfinite(x) for x in grid):
            raise ValidationError("s_grid must be a non-empty sequence of finite numbers")
        if any(a >= b for a, b in zip(grid, grid[1:])):
            raise ValidationError("s_grid must be strictly increasing")
        for name in ("abs_tol", "rel_tol", "oracle_tol", "log_tol"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        if self.oracle_digits < 40:
            raise ValidationError("oracle_digits must be at least 40")
        checks = None if self.checks is None else tuple(self.checks)
        if checks is not None:
            unknown = [c for c in checks if c not in REGISTRY]
            if unknown:
                raise UnknownCheck(f"unknown check(s): {', '.join(unknown)}")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "n_range", (lo, hi))
        object.__setattr__(self, "s_grid", grid)
        object.__setattr__(self, "checks", checks)
        object.__setattr__(self, "s_range", tuple(float(x) for x in self.s_range))

    def to_json(self) -> dict:
        d = asdict(self)
        d["n_range"] = list(self.n_range)
        d["s_grid"] = list(self.s_grid)
        d["s_range"] = list(self.s_range)
        d["checks"] = None if self.checks is None else list(self.checks)
        return d


@dataclass
class PropertyReport:
    check_name: str
    trials_run: int
    worst_violation: float
    tolerance: float
    passed: bool
    seed: int
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        d = {
            "check_name": self.check_name,
            "trials_run": self.trials_run,
            "worst_violation": self.worst_violation,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "seed": self.seed,
        }
        if self.witness is not None:
            d["witness"] = self.witness
        return d


# ---------------------------------------------------------------------------
# residual helpers


def _leq(lhs: float, rhs: float, cfg: SuiteConfig) -> float:
    """Slack in ``lhs <= rhs``, scaled so that ``-abs_tol`` is the pass line.

    Equivalent to counting a violation only when
    ``lhs > rhs + max(abs_tol, rel_tol * |rhs|)``.
    """
    return (rhs - lhs) / max(1.0, abs(rhs) * cfg.rel_tol / cfg.abs_tol)


def _same_scaled(a: float, b: float, cfg: SuiteConfig) -> float:
    return -abs(a - b) / max(1.0, abs(b) * cfg.rel_tol / cfg.abs_tol)


def _same_rel(a: float, b: float) -> float:
    m = max(abs(a), abs(b))
    return 0.0 if m == 0.0 else -abs(a - b) / m


def _dist(values) -> Distribution:
    return Distribution(np.asarray(values, dtype=float))


def _pq(case: dict) -> tuple[Distribution, Distribution]:
    return _dist(case["p"]), _dist(case["q"])


def _curve(p, q, s_values):
    pts = symmetrized_curve(p, q, s_values)
    return {pt.s: pt for pt in pts}


# ---------------------------------------------------------------------------
# trial generation


def running_pair() -> tuple[Distribution, Distribution]:
    return make_distribution([0.5, 0.5]), make_distribution([0.25, 0.75])


def _random_distribution(rng: np.random.Generator, n: int) -> Distribution:
    # flat Dirichlet: normalized standard exponentials
    return make_distribution(rng.standard_exponential(n), renormalize=True)


def trial_pair(cfg: SuiteConfig, rng: np.random.Generator, trial: int) -> tuple[Distribution, Distribution]:
    lo, hi = cfg.n_range
    n = int(rng.integers(lo, hi + 1))
    if trial == 0:
        q = _random_distribution(rng, n)
        p = make_distribution(q.probs * (1.0 + 1e-9 * rng.standard_normal(n)), renormalize=True)
        return p, q
    if trial == 1:
        shape = np.logspace(0.0, -6.0, n)
        return (make_distribution(shape, renormalize=True),
                make_distribution(shape[::-1], renormalize=True))
    if trial == 2:
        return running_pair()
    return _random_distribution(rng, n), _random_distribution(rng, n)


def _base_case(p, q) -> dict:
    return {"p": p.tolist(), "q": q.tolist()}


def _orders(rng, cfg, k: int) -> np.ndarray:
    lo, hi = cfg.s_range
    return rng.uniform(lo, hi, size=(cfg.samples_per_trial, k))


# ---------------------------------------------------------------------------
# checks


@dataclass(frozen=True)
class Check:
    name: str
    build: Callable  # (p, q, rng, cfg) -> case dict
    residual: Callable  # (case, cfg) -> float
    tolerance: Callable = field(default=lambda cfg: cfg.abs_tol)
    trials: Callable = field(default=lambda cfg: cfg.trials)


def _build_plain(p, q, rng, cfg):
    return _base_case(p, q)


def _build_pairs_of_orders(p, q, rng, cfg):
    case = _base_case(p, q)
    case["orders"] = _orders(rng, cfg, 2).tolist()
    return case


def _build_triples(p, q, rng, cfg):
    case = _base_case(p, q)
    triples = np.sort(_orders(rng, cfg, 3), axis=1)
    keep = (triples[:, 0] < triples[:, 1]) & (triples[:, 1] < triples[:, 2])
    case["orders"] = triples[keep].tolist()
    return case


def _log_convexity(measure: str):
    def residual(case, cfg):
        p, q = _pq(case)
        orders = np.array(case["orders"], dtype=float).reshape(-1, 2)
        mids = (orders[:, 0] + orders[:, 1]) / 2.0
        needed = np.unique(np.concatenate([orders.ravel(), mids]))
        c = _curve(p, q, needed)
        worst = math.inf
        for (s, t), m in zip(orders.tolist(), mids.tolist()):
            if measure == "K":
                pairs = [(c[s].k_pq, c[t].k_pq, c[m].k_pq), (c[s].k_qp, c[t].k_qp, c[m].k_qp)]
            else:
                pairs = [(getattr(c[s], measure), getattr(c[t], measure), getattr(c[m], measure))]
            for ks_, kt, km in pairs:
                worst = min(worst, _leq(km * km, ks_ * kt, cfg))
        return worst
    return residual


def _convexity_k(case, cfg):
    p, q = _pq(case)
    triples = np.array(case["orders"], dtype=float).reshape(-1, 3)
    c = _curve(p, q, np.unique(triples))
    worst = math.inf
    for r, s, t in triples.tolist():
        for attr in ("k_pq", "k_qp"):
            kr, ks_, kt = (getattr(c[x], attr) for x in (r, s, t))
            worst = min(worst, _leq((t - r) * ks_, (t - s) * kr + (s - r) * kt, cfg))
    return worst


def _mirror(case, cfg):
    p, q = _pq(case)
    grid = np.array(cfg.s_grid)
    c = _curve(p, q, np.concatenate([grid, 1.0 - grid]))
    worst = 0.0
    for s in grid.tolist():
        a, b = c[s], c[1.0 - s]
        worst = min(worst, _same_rel(a.u, b.u), _same_rel(a.v, b.v))
    return worst


def _swap(case, cfg):
    p, q = _pq(case)
    grid = np.array(cfg.s_grid)
    fwd = ks_curve(p, q, grid)
    rev = ks_curve(q, p, 1.0 - grid)
    return min(_same_rel(a, b) for a, b in zip(fwd.tolist(), rev.tolist()))


def _lower_bounds(case, cfg):
    p, q = _pq(case)
    h2 = hellinger_sq(p, q)
    c = _curve(p, q, list(cfg.s_grid) + [0.5])
    worst = math.inf
    for pt in c.values():
        worst = min(worst, _leq(4.0 * h2 * h2, pt.v, cfg), _leq(4.0 * h2, pt.u, cfg))
    half = c[0.5]
    # both bounds are attained at s = 1/2
    worst = min(worst, _same_scaled(half.v, 4.0 * h2 * h2, cfg), _same_scaled(half.u, 4.0 * h2, cfg))
    return worst


def _normalized_chain(case, cfg):
    p, q = _pq(case)
    h2 = hellinger_sq(p, q)
    worst = math.inf
    for pt in symmetrized_curve(p, q, cfg.s_grid):
        worst = min(worst, _leq(2.0 * h2, pt.v_star, cfg), _leq(pt.v_star, pt.u_star, cfg))
    return worst


def _monotonicity(case, cfg):
    p, q = _pq(case)
    grid = sorted(set(cfg.s_grid) | {0.5})
    c = _curve(p, q, grid)
    worst = math.inf
    for a, b in zip(grid, grid[1:]):
        for attr in ("u", "v"):
            fa, fb = getattr(c[a], attr), getattr(c[b], attr)
            if a >= 0.5:
                worst = min(worst, _leq(fa, fb, cfg))
            elif b <= 0.5:
                worst = min(worst, _leq(fb, fa, cfg))
    return worst


def _interpolation(case, cfg):
    p, q = _pq(case)
    if p == q:
        return 0.0
    triples = np.array(case["orders"], dtype=float).reshape(-1, 3)
    c = _curve(p, q, np.unique(triples))
    worst = math.inf
    for r, s, t in triples.tolist():
        for attr in ("u", "v"):
            lr, ls, lt = (math.log(getattr(c[x], attr)) for x in (r, s, t))
            worst = min(worst, (t - s) * lr + (s - r) * lt - (t - r) * ls)
    return worst


def _power(x):
    return lambda a: np.power(a, x)


_GENERATORS = {
    "kl": lambda x: x * np.log(x),
    "chi_sq": lambda x: (x - 1.0) ** 2,
    "hellinger_sq": lambda x: (np.sqrt(x) - 1.0) ** 2,
}


def _special_cases(case, cfg):
    p, q = _pq(case)
    k = ks_curve(p, q, [0.0, 0.5, 1.0, 2.0])
    h2, c2, klpq, klqp = hellinger_sq(p, q), chi_sq(p, q), kl(p, q), kl(q, p)
    a2, ah = alpha_family(p, q, 2.0), alpha_family(p, q, 0.5)
    pairs = [
        (k[1], 2.0 * h2),
        (k[3], 0.5 * c2),
        (k[2], klpq),
        (k[0], klqp),
        (csiszar_f(p, q, _GENERATORS["kl"]), klpq),
        (csiszar_f(p, q, _GENERATORS["chi_sq"]), c2),
        (csiszar_f(p, q, _GENERATORS["hellinger_sq"]), h2),
        (csiszar_f(p, q, _power(2.0)), a2.i_alpha),
        (csiszar_f(p, q, _power(0.5)), ah.i_alpha),
        (a2.tsallis, c2),
        (ah.tsallis, h2),
    ]
    return min(_same_scaled(a, b, cfg) for a, b in pairs)


def _growth(case, cfg):
    p, q = _pq(case)
    if p == q:
        return 0.0
    k = ks_curve(p, q, GROWTH_ORDERS)
    return min(_leq(growth_lower_bound(p, q, s), v, cfg) for s, v in zip(GROWTH_ORDERS, k.tolist()))


def _lambda_reduction(case, cfg):
    p, q = _pq(case)
    x = p.probs / q.probs
    k = ks_curve(p, q, cfg.s_grid)
    return min(_same_scaled(lambda_s(x, q, s), v, cfg) for s, v in zip(cfg.s_grid, k.tolist()))


def _oracle_residual(orders_of):
    def residual(case, cfg):
        p, q = _pq(case)
        orders = orders_of(cfg)
        fast = ks_curve(p, q, orders)
        ref = oracle_ks_curve(p, q, orders, cfg.oracle_digits)
        return min(_same_rel(a, b) for a, b in zip(fast.tolist(), ref))
    return residual


def _domain_sampler(kind: str, cfg: SuiteConfig):
    if kind in ("square", "abs", "exp"):
        return -10.0, 10.0
    if kind == "xlogx":
        return 0.0, 10.0
    if kind == "neg_entropy":
        return 0.0, 1.0
    return cfg.s_range


APPENDIX_KINDS = cx.BUILTIN_KINDS + ("log_ks_of_pair",)


def _build_appendix(p, q, rng, cfg):
    case = _base_case(p, q)
    draws = {}
    for kind in APPENDIX_KINDS:
        lo, hi = _domain_sampler(kind, cfg)
        xs = np.sort(rng.uniform(lo, hi, size=5))
        draws[kind] = {"points": xs.tolist(), "weight": float(rng.uniform(0.0, 1.0))}
    case["draws"] = draws
    return case


def _spec_for(kind, p, q):
    if kind == "log_ks_of_pair":
        return cx.ScalarFunctionSpec.log_ks_of_pair(p, q)
    return cx.ScalarFunctionSpec.builtin(kind)


def _appendix_residuals(case, cfg) -> Iterable[float]:
    p, q = _pq(case)
    for kind, d in case["draws"].items():
        if kind == "log_ks_of_pair" and p == q:
            continue
        f = _spec_for(kind, p, q)
        x1, x2, x3, a, b = d["points"]
        x1, x2, x3 = sorted((x1, x2, x3))
        w = d["weight"]
        fx = [abs(f(x)) for x in (x1, x2, x3)]
        scale3 = max(1.0, 2.0 * sum(fx))
        yield cx.midpoint_gap(f, x1, x3) / scale3
        if 0.0 < w < 1.0:
            yield cx.weighted_convexity_residual(f, x1, x3, w) / scale3
        if x1 < x2 < x3:
            yield cx.three_point_residual(f, x1, x2, x3) / max(1.0, sum(fx) * (x3 - x1))
            r = cx.chord_lemma_residuals(f, x1, x2, x3)
            yield r.r_i / scale3
            yield r.r_ii / scale3
        lo, hi = min(x1, a), max(x3, b)
        if lo < hi:
            interval = cx.Interval(lo, hi)
            px = cx.prop_x_endpoint_max(f, interval, 101)
            yield px.margin / max(1.0, 4.0 * float(np.max(np.abs(f(np.linspace(lo, hi, 201))))))
            pre = cx.pre_hh_residuals(f, interval, x2)
            scale_pre = max(1.0, 2.0 * (abs(f(lo)) + abs(f(hi)) + fx[1]))
            yield pre.left / scale_pre
            yield pre.right / scale_pre


def _appendix(case, cfg):
    return min(_appendix_residuals(case, cfg))


def _hermite_hadamard(case, cfg):
    p, q = _pq(case)
    worst = math.inf
    for kind, d in case["draws"].items():
        if kind == "log_ks_of_pair" and p == q:
            continue
        f = _spec_for(kind, p, q)
        pts = d["points"]
        lo, hi = min(pts), max(pts)
        if not lo < hi:
            continue
        mid, mean, ends = cx.hermite_hadamard_check(f, cx.Interval(lo, hi), 64)
        worst = min(worst, mean - mid, ends - mean)
    return worst


_CHECKS = [
    Check("log_convexity_K", _build_pairs_of_orders, _log_convexity("K")),
    Check("log_convexity_U", _build_pairs_of_orders, _log_convexity("u")),
    Check("log_convexity_V", _build_pairs_of_orders, _log_convexity("v")),
    Check("mirror_symmetry", _build_plain, _mirror, tolerance=lambda cfg: cfg.rel_tol),
    Check("lower_bounds", _build_plain, _lower_bounds),
    Check("monotonicity", _build_plain, _monotonicity),
    Check("interpolation", _build_triples, _interpolation, tolerance=lambda cfg: cfg.log_tol),
    Check("special_cases", _build_plain, _special_cases),
    Check("swap_identity", _build_plain, _swap, tolerance=lambda cfg: cfg.rel_tol),
    Check("growth_bound", _build_plain, _growth),
    Check(
        "singularity_accuracy", _build_plain, _oracle_residual(lambda cfg: SINGULAR_POINTS),
        tolerance=lambda cfg: cfg.oracle_tol, trials=lambda cfg: min(cfg.trials, cfg.oracle_trials),
    ),
    Check("normalized_chain", _build_plain, _normalized_chain),
    Check(
        "oracle_agreement", _build_plain, _oracle_residual(lambda cfg: cfg.s_grid),
        tolerance=lambda cfg: cfg.oracle_tol, trials=lambda cfg: min(cfg.trials, cfg.oracle_trials),
    ),
    Check("convexity_K", _build_triples, _convexity_k),
    Check("lambda_reduction", _build_plain, _lambda_reduction),
    Check("appendix_convexity", _build_appendix, _appendix),
    Check("hermite_hadamard", _build_appendix, _hermite_hadamard, tolerance=lambda cfg: QUAD_TOL),
]

REGISTRY = {c.name: c for c in _CHECKS}
CHECK_NAMES = tuple(REGISTRY)


def _check(name: str) -> Check:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownCheck(f"unknown check {name!r}; known: {', '.join(CHECK_NAMES)}") from None


def derive_seed(seed: int, name: str) -> int:
    ss = np.random.SeedSequence([seed, zlib.crc32(name.encode())])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _score(check: Check, case: dict, cfg: SuiteConfig) -> tuple[float, Optional[str]]:
    try:
        return float(check.residual(case, cfg)), None
    except DivergenceError as exc:
        return -math.inf, f"{type(exc).__name__}: {exc}"


def replay(name: str, witness: dict, cfg: SuiteConfig) -> float:
    """Re-score a serialized witness; returns the same residual the check reported."""
    case = {k: v for k, v in witness.items() if k not in ("trial", "error")}
    return _score(_check(name), case, cfg)[0]


def run_check(name: str, cfg: SuiteConfig) -> PropertyReport:
    """Run one check for ``cfg.trials`` trials (capped for oracle checks).

    Trial ``t`` draws from ``default_rng([cfg.seed, t])``, so trials are
    independent of evaluation order.
    """
    check = _check(name)
    n_trials = check.trials(cfg)
    tol = check.tolerance(cfg)
    worst, witness = math.inf, None
    for t in range(n_trials):
        rng = np.random.default_rng([cfg.seed, t])
        p, q = trial_pair(cfg, rng, t)
        case = check.build(p, q, rng, cfg)
        res, err = _score(check, case, cfg)
        if res < worst:
            worst = res
            witness = dict(case, trial=t)
            if err is not None:
                witness["error"] = err
    passed = worst >= -tol
    return PropertyReport(name, n_trials, worst, tol, passed, cfg.seed, None if passed else witness)


def run_suite(cfg: SuiteConfig) -> list[PropertyReport]:
    names = CHECK_NAMES if cfg.checks is None else [n for n in CHECK_NAMES if n in cfg.checks]
    return [run_check(n, replace(cfg, seed=derive_seed(cfg.seed, n))) for n in names]


def suite_document(cfg: SuiteConfig, reports: list[PropertyReport]) -> dict:
    return {
        "seed": cfg.seed,
        "config": cfg.to_json(),
        "all_passed": all(r.passed for r in reports),
        "reports": [r.to_json() for r in reports],
    }


def dumps_suite(cfg: SuiteConfig, reports: list[PropertyReport]) -> str:
    return json.dumps(suite_document(cfg, reports), indent=2)
