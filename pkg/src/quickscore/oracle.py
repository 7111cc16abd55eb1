"""Brute-force reference scorer: enumerate every disease instance.

Deliberately unclever.  The joint probability of an evidence set is
accumulated instance by instance over all 2**n disease assignments,
exactly as the model defines it:

    sum over instances of
        prod(prior or 1-prior per disease)
        * prod(p(f absent | instance) for negative findings)
        * prod(1 - p(f absent | instance) for positive findings)

Instances are indexed 0 .. 2**n - 1 in binary counting order, bit i of
the index meaning "disease i present" in network declaration order.
The per-instance factors are evaluated with numpy so the oracle stays
usable at the cap, but each array expression mirrors one literal factor
of the definition above; nothing is shared with the fast engine.

Accumulation uses plain pairwise double summation below 16 diseases and
exact (compensated) summation from 16 up, where the instance count makes
drift worth suppressing.  Enumeration is capped because the cost is
2**n; raise the cap explicitly if you really want a bigger run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded, InfeasibleEvidence
from .model import Evidence, Network, validate

DEFAULT_INSTANCE_CAP = 20

_COMPENSATED_FROM = 16


@dataclass(frozen=True)
class OracleResult:
    joint: float
    posteriors: dict[str, float]


def _check(network: Network, evidence: Evidence, instance_cap: int) -> None:
    validate(network, evidence).raise_if_failed()
    n = network.n_diseases
    if n > instance_cap:
        raise CapExceeded(
            f"network has {n} diseases; enumeration is capped at {instance_cap} "
            f"(2**{n} instances)"
        )


def _accumulate(values: np.ndarray, n_diseases: int) -> float:
    if n_diseases >= _COMPENSATED_FROM:
        return math.fsum(values.tolist())
    return float(np.sum(values))


def _present_matrix(n: int) -> np.ndarray:
    """Boolean (2**n, n) matrix: bit i of each instance index."""
    idx = np.arange(1 << n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n, dtype=np.int64)[None, :]) & 1).astype(bool)


def _instance_weights(network: Network, present: np.ndarray) -> np.ndarray:
    """Prior probability of every instance (product over diseases)."""
    w = np.ones(present.shape[0], dtype=np.float64)
    for i, d in enumerate(network.diseases):
        w *= np.where(present[:, i], d.prior, 1.0 - d.prior)
    return w


def _absence_vector(network: Network, finding_id: str, present: np.ndarray) -> np.ndarray:
    """p(finding absent | instance) for every instance."""
    f = network.finding(finding_id)
    q = np.full(present.shape[0], 1.0 - f.leak, dtype=np.float64)
    didx = network.disease_index
    for e in f.edges:
        q[present[:, didx[e.disease]]] *= 1.0 - e.p_cause
    return q


def _summands(network: Network, evidence: Evidence) -> np.ndarray:
    present = _present_matrix(network.n_diseases)
    s = _instance_weights(network, present)
    fidx = network.finding_index
    for fid in sorted(evidence.negative, key=fidx.__getitem__):
        s *= _absence_vector(network, fid, present)
    for fid in sorted(evidence.positive, key=fidx.__getitem__):
        s *= 1.0 - _absence_vector(network, fid, present)
    return s


def oracle_joint(
    network: Network,
    evidence: Evidence,
    *,
    instance_cap: int = DEFAULT_INSTANCE_CAP,
) -> float:
    """p(evidence) by exhaustive enumeration.

    Empty evidence is answered as exactly 1.0 without enumerating: with
    nothing observed there is no finding factor, and total probability
    mass is 1 by definition (the enumerated sum would only add float
    drift).
    """
    _check(network, evidence, instance_cap)
    if not evidence.positive and not evidence.negative:
        return 1.0
    return _accumulate(_summands(network, evidence), network.n_diseases)


def oracle_posteriors(
    network: Network,
    evidence: Evidence,
    *,
    instance_cap: int = DEFAULT_INSTANCE_CAP,
) -> OracleResult:
    """Joint plus p(disease present | evidence) for every disease.

    Each posterior is the probability mass of the instances containing
    the disease, renormalized by the joint.  Raises InfeasibleEvidence
    when the joint is zero, where posteriors are undefined.

    Empty evidence short-circuits to posteriors equal to the priors
    (no conditioning), mirroring :func:`oracle_joint`.
    """
    _check(network, evidence, instance_cap)
    if not evidence.positive and not evidence.negative:
        return OracleResult(1.0, {d.id: d.prior for d in network.diseases})

    present = _present_matrix(network.n_diseases)
    s = _summands(network, evidence)
    joint = _accumulate(s, network.n_diseases)
    if joint <= 0.0:
        raise InfeasibleEvidence(
            f"evidence has zero probability (joint {joint!r}); "
            "posteriors are undefined"
        )
    posteriors: dict[str, float] = {}
    for i, d in enumerate(network.diseases):
        mass = _accumulate(s[present[:, i]], network.n_diseases)
        posteriors[d.id] = min(max(mass / joint, 0.0), 1.0)
    return OracleResult(joint, posteriors)
