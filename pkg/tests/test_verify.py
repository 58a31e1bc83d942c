"""Randomized verifier: configuration, determinism, witnesses and the registry."""

import json
import math

import numpy as np
import pytest

from sdivergence.errors import UnknownCheck, ValidationError
from sdivergence.verify import (
    CHECK_NAMES,
    DEFAULT_S_GRID,
    SuiteConfig,
    derive_seed,
    dumps_suite,
    replay,
    run_check,
    run_suite,
    running_pair,
    trial_pair,
)

SMALL = dict(trials=12, oracle_trials=4)


class TestConfig:
    def test_defaults(self):
        cfg = SuiteConfig()
        assert (cfg.seed, cfg.trials, cfg.n_range) == (1, 1000, (2, 64))
        assert len(DEFAULT_S_GRID) == 45
        assert DEFAULT_S_GRID[0] == -5.0 and DEFAULT_S_GRID[-1] == 6.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(trials=0),
            dict(n_range=(1, 5)),
            dict(n_range=(6, 5)),
            dict(s_grid=(1.0, 0.5)),
            dict(s_grid=()),
            dict(abs_tol=0.0),
            dict(rel_tol=-1e-12),
            dict(seed=-1),
            dict(seed=1 << 64),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            SuiteConfig(**kwargs)

    def test_unknown_check(self):
        with pytest.raises(UnknownCheck):
            SuiteConfig(checks=("no_such_check",))
        with pytest.raises(UnknownCheck):
            run_check("no_such_check", SuiteConfig(trials=1))

    def test_json_round_trip(self):
        cfg = SuiteConfig(checks=("special_cases",))
        doc = json.loads(json.dumps(cfg.to_json()))
        assert SuiteConfig(**{k: tuple(v) if isinstance(v, list) else v for k, v in doc.items()}) == cfg


class TestTrials:
    def test_adversarial_first(self):
        cfg = SuiteConfig()
        p0, q0 = trial_pair(cfg, np.random.default_rng([1, 0]), 0)
        assert np.max(np.abs(p0.probs / q0.probs - 1)) < 1e-7 and p0 != q0
        p1, q1 = trial_pair(cfg, np.random.default_rng([1, 1]), 1)
        assert np.max(p1.probs / q1.probs) > 1e5
        assert trial_pair(cfg, np.random.default_rng([1, 2]), 2) == running_pair()

    def test_lengths_in_range(self):
        cfg = SuiteConfig(n_range=(3, 5))
        for t in range(3, 30):
            p, q = trial_pair(cfg, np.random.default_rng([7, t]), t)
            assert 3 <= p.n == q.n <= 5

    def test_derived_seeds_differ(self):
        seeds = {derive_seed(1, n) for n in CHECK_NAMES}
        assert len(seeds) == len(CHECK_NAMES)
        assert derive_seed(1, "monotonicity") == derive_seed(1, "monotonicity")


class TestChecks:
    @pytest.mark.parametrize("name", CHECK_NAMES)
    def test_each_check_passes_small(self, name):
        r = run_check(name, SuiteConfig(seed=5, **SMALL))
        assert r.passed, r.to_json()
        assert r.witness is None
        assert r.worst_violation >= -r.tolerance

    def test_mirror_symmetry_seed_42(self):
        r = run_check("mirror_symmetry", SuiteConfig(seed=42, trials=100))
        assert r.passed and r.worst_violation >= -1e-12 and r.trials_run == 100

    def test_lower_bounds_attained_on_running_pair(self):
        # trials 0..2 include the running pair, where the s=1/2 bound is an equality
        r = run_check("lower_bounds", SuiteConfig(trials=3))
        assert r.passed and abs(r.worst_violation) <= 1e-12

    def test_oracle_checks_capped(self):
        r = run_check("oracle_agreement", SuiteConfig(trials=10, oracle_trials=3))
        assert r.trials_run == 3


class TestSuite:
    def test_filtering(self):
        reports = run_suite(SuiteConfig(trials=3, checks=("special_cases",)))
        assert [r.check_name for r in reports] == ["special_cases"]

    def test_registry_order(self):
        cfg = SuiteConfig(trials=2, oracle_trials=1, checks=("swap_identity", "log_convexity_K"))
        assert [r.check_name for r in run_suite(cfg)] == ["log_convexity_K", "swap_identity"]

    def test_deterministic(self):
        cfg = SuiteConfig(seed=11, trials=5, oracle_trials=2)
        assert dumps_suite(cfg, run_suite(cfg)) == dumps_suite(cfg, run_suite(cfg))

    def test_document_schema(self):
        cfg = SuiteConfig(trials=2, checks=("monotonicity",))
        doc = json.loads(dumps_suite(cfg, run_suite(cfg)))
        assert set(doc) == {"seed", "config", "all_passed", "reports"}
        assert set(doc["reports"][0]) == {
            "check_name", "trials_run", "worst_violation", "tolerance", "passed", "seed",
        }


class TestWitness:
    def test_failure_carries_reproducible_witness(self):
        # a tolerance far below rounding level forces a recorded failure
        cfg = SuiteConfig(trials=6, oracle_trials=6, oracle_tol=1e-300)
        r = run_check("oracle_agreement", cfg)
        assert not r.passed and r.witness is not None
        doc = json.loads(json.dumps(r.to_json()))
        again = replay("oracle_agreement", doc["witness"], cfg)
        assert again == pytest.approx(r.worst_violation, rel=1e-15)

    def test_error_recorded_as_failure(self):
        cfg = SuiteConfig(trials=1)
        witness = {"p": [1 - 1e-6, 1e-6], "q": [1e-6, 1 - 1e-6], "trial": 0}
        cfg_big = SuiteConfig(trials=1, s_grid=(0.0, 400.0))
        assert replay("swap_identity", witness, cfg_big) == -math.inf
        assert replay("swap_identity", witness, cfg) > -1e-12
