"""Shared fixtures: the hand-checked 2x2 network and random factories."""

from __future__ import annotations

import random

import pytest

from quickscore import Disease, Edge, Evidence, Finding, Network


@pytest.fixture
def n1() -> Network:
    """Two diseases, two findings; every probability hand-checkable.

    p(f1 absent) = (0.2*0.1 + 0.9) * (0.5*0.2 + 0.8) = 0.92 * 0.9 = 0.828.
    """
    return Network(
        diseases=(Disease("d1", 0.1), Disease("d2", 0.2)),
        findings=(
            Finding("f1", leak=0.0, edges=(Edge("d1", 0.8), Edge("d2", 0.5))),
            Finding("f2", leak=0.0, edges=(Edge("d1", 0.3),)),
        ),
    )


@pytest.fixture
def n1_leaky(n1: Network) -> Network:
    """Same network with f1 given a 0.05 leak."""
    f1, f2 = n1.findings
    return Network(
        diseases=n1.diseases,
        findings=(Finding("f1", leak=0.05, edges=f1.edges), f2),
    )


def unit_draw(rng: random.Random, extreme_p: float = 0.0) -> float:
    """A probability in [0, 1]; with probability extreme_p exactly 0 or 1.

    Exact endpoints stress the zero-factor paths that uniform draws
    never reach.
    """
    if extreme_p > 0.0 and rng.random() < extreme_p:
        return float(rng.random() < 0.5)
    return rng.random()


def random_network(
    rng: random.Random,
    n_diseases: int,
    n_findings: int,
    *,
    extreme_p: float = 0.0,
    max_leak: float = 1.0,
) -> Network:
    """A dense-ish random network with all parameters drawn over [0, 1]."""
    diseases = tuple(
        Disease(f"d{i}", unit_draw(rng, extreme_p)) for i in range(n_diseases)
    )
    findings = []
    for j in range(n_findings):
        k = rng.randint(0, n_diseases)
        picked = sorted(rng.sample(range(n_diseases), k))
        edges = tuple(
            Edge(f"d{i}", unit_draw(rng, extreme_p)) for i in picked
        )
        leak = unit_draw(rng, extreme_p)
        if leak > max_leak:
            leak = rng.random() * max_leak
        findings.append(Finding(f"f{j}", leak=leak, edges=edges))
    return Network(diseases=diseases, findings=tuple(findings))


def random_evidence(
    rng: random.Random, network: Network, *, max_positive: int = 8
) -> Evidence:
    """Random positive/negative/unobserved split; empty sets are possible."""
    positive: list[str] = []
    negative: list[str] = []
    for f in network.findings:
        r = rng.random()
        if r < 1 / 3 and len(positive) < max_positive:
            positive.append(f.id)
        elif r < 2 / 3:
            negative.append(f.id)
    return Evidence(positive=frozenset(positive), negative=frozenset(negative))


def pytest_runtest_logreport(report):
    # one visible verdict line per acceptance criterion
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    outcome = "PASS" if report.passed else "FAIL"
    print(f"\n[acceptance] {name}: {outcome}", flush=True)
