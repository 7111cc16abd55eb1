"""Brute-force enumeration: hand-checked values and internal sanity.

Expected numbers are derived independently of the package: each is a
finite sum over the 4 disease instances of the 2x2 fixture, written out
in the comments where not obvious.
"""

from __future__ import annotations

import random

import pytest

from quickscore import (
    CapExceeded,
    Disease,
    Edge,
    Evidence,
    Finding,
    InfeasibleEvidence,
    Network,
    oracle_joint,
    oracle_posteriors,
)
from quickscore.oracle import _instance_weights, _present_matrix

from conftest import random_network


def test_empty_evidence_joint_is_exactly_one(n1):
    assert oracle_joint(n1, Evidence()) == 1.0


def test_single_negative_hand_value(n1):
    # instance sums: 0.72 + 0.016 + 0.09 + 0.002 = 0.828
    got = oracle_joint(n1, Evidence(negative=frozenset({"f1"})))
    assert got == pytest.approx(0.828, abs=1e-12)


def test_single_positive_hand_value(n1):
    got = oracle_joint(n1, Evidence(positive=frozenset({"f1"})))
    assert got == pytest.approx(0.172, abs=1e-12)


def test_mixed_evidence_hand_value(n1):
    # instance sums: 0.0448 + 0.09 + 0.0126 = 0.1474
    ev = Evidence(positive=frozenset({"f1"}), negative=frozenset({"f2"}))
    assert oracle_joint(n1, ev) == pytest.approx(0.1474, abs=1e-12)


def test_both_findings_negative_hand_value(n1):
    # 0.72 + 0.0112 + 0.09 + 0.0014 = 0.8226
    ev = Evidence(negative=frozenset({"f1", "f2"}))
    assert oracle_joint(n1, ev) == pytest.approx(0.8226, abs=1e-12)


def test_posteriors_hand_values(n1):
    res = oracle_posteriors(n1, Evidence(positive=frozenset({"f1"})))
    assert res.joint == pytest.approx(0.172, abs=1e-12)
    assert res.posteriors["d1"] == pytest.approx(0.082 / 0.172, abs=1e-12)
    assert res.posteriors["d2"] == pytest.approx(0.108 / 0.172, abs=1e-12)


def test_posteriors_empty_evidence_are_priors(n1):
    res = oracle_posteriors(n1, Evidence())
    assert res.joint == 1.0
    assert res.posteriors == {"d1": 0.1, "d2": 0.2}


def test_sole_possible_cause_gets_posterior_one(n1):
    # f2 has a single edge (d1) and no leak: observing f2 proves d1
    res = oracle_posteriors(n1, Evidence(positive=frozenset({"f2"})))
    assert res.posteriors["d1"] == 1.0


def test_complementarity_single_finding(n1):
    for fid in ("f1", "f2"):
        pos = oracle_joint(n1, Evidence(positive=frozenset({fid})))
        neg = oracle_joint(n1, Evidence(negative=frozenset({fid})))
        assert pos + neg == pytest.approx(1.0, abs=1e-12)


def test_instance_weights_sum_to_one():
    rng = random.Random(4)
    for _ in range(20):
        net = random_network(rng, rng.randint(1, 12), 0)
        w = _instance_weights(net, _present_matrix(net.n_diseases))
        assert float(w.sum()) == pytest.approx(1.0, abs=1e-12)


def test_cap_enforced_and_overridable():
    diseases = tuple(Disease(f"d{i}", 0.01) for i in range(10))
    net = Network(
        diseases=diseases,
        findings=(Finding("f0", edges=(Edge("d0", 0.5),)),),
    )
    ev = Evidence(positive=frozenset({"f0"}))
    with pytest.raises(CapExceeded) as exc:
        oracle_joint(net, ev, instance_cap=5)
    assert "capped at 5" in str(exc.value)
    with pytest.raises(CapExceeded):
        oracle_posteriors(net, ev, instance_cap=5)
    assert oracle_joint(net, ev, instance_cap=10) > 0.0


def test_infeasible_evidence_raises():
    net = Network(
        diseases=(Disease("d1", 0.1),),
        findings=(Finding("f1", leak=0.0, edges=()),),
    )
    ev = Evidence(positive=frozenset({"f1"}))
    assert oracle_joint(net, ev) == 0.0
    with pytest.raises(InfeasibleEvidence):
        oracle_posteriors(net, ev)


def test_validation_runs_before_enumeration(n1):
    from quickscore import ValidationError

    with pytest.raises(ValidationError):
        oracle_joint(n1, Evidence(positive=frozenset({"nope"})))


def test_leak_folding_agrees_on_the_fixture(n1_leaky):
    from quickscore import fold_leak_as_virtual_disease

    folded = fold_leak_as_virtual_disease(n1_leaky)
    for ev in (
        Evidence(positive=frozenset({"f1"})),
        Evidence(positive=frozenset({"f1"}), negative=frozenset({"f2"})),
        Evidence(negative=frozenset({"f1", "f2"})),
        Evidence(positive=frozenset({"f1", "f2"})),
    ):
        a = oracle_posteriors(n1_leaky, ev)
        b = oracle_posteriors(folded, ev)
        assert a.joint == pytest.approx(b.joint, abs=1e-12)
        for did in ("d1", "d2"):
            assert a.posteriors[did] == pytest.approx(
                b.posteriors[did], abs=1e-12
            )


def test_compensated_accumulation_path():
    # 16 diseases crosses into the exact-summation branch; complementarity
    # must still hold tightly there
    rng = random.Random(99)
    net = random_network(rng, 16, 2)
    fid = net.findings[0].id
    pos = oracle_joint(net, Evidence(positive=frozenset({fid})))
    neg = oracle_joint(net, Evidence(negative=frozenset({fid})))
    assert pos + neg == pytest.approx(1.0, abs=1e-12)
