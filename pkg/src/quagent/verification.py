"""Randomized consistency suites shared by the ``verify`` command and the tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gadgets import (
    compose_observer,
    compose_system,
    is_measurement,
    random_channel,
    random_gadget,
)
from .linalg import trace_distance
from .metrics import back_action, is_product, uncertainty
from .scenarios import (
    simul_choi_disturbance_analytic,
    simul_choi_result_analytic,
    simul_disturbance_analytic,
    simul_evolve,
    simul_result_analytic,
)
from .states import random_pure

ORACLE_TOL = 1e-9
MONOTONE_TOL = 1e-9


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    checked: int
    failures: int
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.checked - self.failures}/{self.checked} {self.detail}".rstrip()


def gadget_sample(n: int, seed: int, d_s: int = 2, max_env: int = 4):
    """Seeded mix of Haar-random gadgets and product-form non-measurements.

    Every third gadget has the product form so both sides of each
    criterion get exercised.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        d_e = int(rng.integers(1, max_env + 1))
        d_o = int(rng.integers(2, max_env + 1))
        out.append(random_gadget(d_s, d_e, d_o, rng, product=(i % 3 == 2)))
    return out


def analytic_vs_oracle(n: int = 50, seed: int = 42) -> SuiteResult:
    """Closed-form two-observer states against matrix-exponential evolution."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = 0
    for i in range(n):
        d = int(rng.integers(2, 4))
        t = float(rng.uniform(0, 2 * np.pi))
        psi = random_pure(d, int(rng.integers(2**31)))
        rho = simul_evolve(psi, t).density()
        errs = [
            trace_distance(rho.reduce(["O_A"]).mat, simul_result_analytic(psi, t).mat),
            trace_distance(rho.reduce(["S"]).mat, simul_disturbance_analytic(psi, t).mat),
        ]
        big = simul_evolve(None, t, with_ancilla=True, d=d).density()
        errs += [
            trace_distance(big.reduce(["A", "O_A"]).mat, simul_choi_result_analytic(t, d).mat),
            trace_distance(big.reduce(["A", "S"]).mat, simul_choi_disturbance_analytic(t, d).mat),
        ]
        worst = max(worst, *errs)
        failures += max(errs) >= ORACLE_TOL
    return SuiteResult("analytic-vs-oracle", failures == 0, n, failures, f"max_td={worst:.2e}")


def measurement_criteria(n: int = 200, seed: int = 42) -> SuiteResult:
    """Probe test, mutual information test and product test must agree."""
    failures = 0
    for g in gadget_sample(n, seed):
        probe = is_measurement(g, "probe")
        info = is_measurement(g, "mutual_information")
        product = is_product(g.choi("result"), ["A"], ["O"])
        failures += not (probe == info == (not product))
    return SuiteResult("probe / mutual-information / product agreement", failures == 0, n, failures)


def monogamy(n: int = 200, seed: int = 42) -> SuiteResult:
    """Every measurement disturbs the system."""
    failures = 0
    for g in gadget_sample(n, seed):
        if is_measurement(g) and back_action(g).value_bits <= MONOTONE_TOL:
            failures += 1
    return SuiteResult("monogamy (measurement => back-action > 0)", failures == 0, n, failures)


def monotonicity(n: int = 100, seed: int = 42) -> SuiteResult:
    """Local channels on O never lower uncertainty; on S never lower back-action."""
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(n):
        d_e = int(rng.integers(1, 3))
        d_o = int(rng.integers(2, 3))
        g = random_gadget(2, d_e, d_o, rng)
        c_o = random_channel(d_o, int(rng.integers(1, 3)), rng)
        c_s = random_channel(2, int(rng.integers(1, 3)), rng)
        u0, u1 = uncertainty(g).value_bits, uncertainty(compose_observer(g, c_o)).value_bits
        b0, b1 = back_action(g).value_bits, back_action(compose_system(g, c_s)).value_bits
        failures += (u1 < u0 - MONOTONE_TOL) or (b1 < b0 - MONOTONE_TOL)
    return SuiteResult("monotonicity under local channels", failures == 0, n, failures)


def run_all(seed: int = 42) -> list[SuiteResult]:
    return [
        analytic_vs_oracle(50, seed),
        measurement_criteria(200, seed),
        monogamy(200, seed),
        monotonicity(100, seed),
    ]
