"""Two-layer noisy/leaky OR diagnostic networks.

A network is bipartite: a layer of binary diseases with marginally
independent priors, and a layer of binary findings.  Each finding lists
the diseases that can cause it; a present disease produces the finding
with the edge's ``p_cause``, independently of every other present
disease (noisy OR).  A finding may also fire spontaneously with its
``leak`` probability (leaky OR).  A disease-finding pair without an edge
behaves exactly like an edge with ``p_cause = 0``.

Given a full assignment of diseases (a :class:`DiseaseInstance`), the
probability that finding ``f`` stays absent is::

    p(f absent | instance) = (1 - leak_f) * prod(1 - p_cause)

with the product over edges whose disease is present.  Findings are
conditionally independent given an instance; diseases are independent a
priori.  Those two facts define every probability computed anywhere in
this package.

Networks and evidence are plain frozen dataclasses.  Identifiers are
strings; the dense integer indexing used by the scoring code is derived
from declaration order and cached on the network.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import ValidationError


@dataclass(frozen=True)
class Disease:
    id: str
    prior: float
    name: str | None = None


@dataclass(frozen=True)
class Edge:
    """One causal link: the disease triggers the finding with p_cause."""

    disease: str
    p_cause: float


@dataclass(frozen=True)
class Finding:
    id: str
    leak: float = 0.0
    edges: tuple[Edge, ...] = ()
    name: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple(self.edges))


@dataclass(frozen=True)
class Network:
    diseases: tuple[Disease, ...]
    findings: tuple[Finding, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "diseases", tuple(self.diseases))
        object.__setattr__(self, "findings", tuple(self.findings))

    @property
    def n_diseases(self) -> int:
        return len(self.diseases)

    @property
    def n_findings(self) -> int:
        return len(self.findings)

    @cached_property
    def disease_index(self) -> dict[str, int]:
        return {d.id: i for i, d in enumerate(self.diseases)}

    @cached_property
    def finding_index(self) -> dict[str, int]:
        return {f.id: i for i, f in enumerate(self.findings)}

    def finding(self, finding_id: str) -> Finding:
        try:
            return self.findings[self.finding_index[finding_id]]
        except KeyError:
            raise ValidationError([f"unknown finding id: {finding_id}"]) from None


@dataclass(frozen=True)
class Evidence:
    """Observed findings: present (positive) and absent (negative).

    ``order``, when given, is a total order over all observed findings.
    It never changes which probability is being computed; it only pins
    the processing order used by incremental sessions and by the exact
    reproducibility contract between batch and incremental scoring.
    """

    positive: frozenset[str] = frozenset()
    negative: frozenset[str] = frozenset()
    order: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "positive", frozenset(self.positive))
        object.__setattr__(self, "negative", frozenset(self.negative))
        if self.order is not None:
            object.__setattr__(self, "order", tuple(self.order))


@dataclass(frozen=True)
class DiseaseInstance:
    """A full truth assignment over diseases: the ones present."""

    present: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "present", frozenset(self.present))


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_if_failed(self) -> None:
        if self.violations:
            raise ValidationError(self.violations)


def _in_unit(value: float) -> bool:
    # written so NaN fails the check too
    return 0.0 <= value <= 1.0


def validate(network: Network, evidence: Evidence | None = None) -> ValidationReport:
    """Check every structural invariant; an empty report means valid.

    Network checks: unique ids, edges reference declared diseases, no
    duplicate edge for a disease within one finding, and every
    probability in [0, 1].  Priors of exactly 0 or 1 are legal.

    Evidence checks (skipped when ``evidence`` is None): no finding
    observed both positive and negative, every observed id exists, and
    ``order`` (if present) is a permutation of the observed findings.
    """
    problems: list[str] = []

    seen_d: set[str] = set()
    for d in network.diseases:
        if d.id in seen_d:
            problems.append(f"duplicate disease id: {d.id}")
        seen_d.add(d.id)
        if not _in_unit(d.prior):
            problems.append(f"disease {d.id}: prior out of range: {d.prior!r}")

    seen_f: set[str] = set()
    for f in network.findings:
        if f.id in seen_f:
            problems.append(f"duplicate finding id: {f.id}")
        seen_f.add(f.id)
        if not _in_unit(f.leak):
            problems.append(f"finding {f.id}: leak out of range: {f.leak!r}")
        seen_e: set[str] = set()
        for e in f.edges:
            if e.disease not in seen_d:
                problems.append(
                    f"finding {f.id}: edge references unknown disease id: {e.disease}"
                )
            if e.disease in seen_e:
                problems.append(f"finding {f.id}: duplicate edge for disease {e.disease}")
            seen_e.add(e.disease)
            if not _in_unit(e.p_cause):
                problems.append(
                    f"finding {f.id}: p_cause out of range for disease {e.disease}: "
                    f"{e.p_cause!r}"
                )

    if evidence is not None:
        for fid in sorted(evidence.positive & evidence.negative):
            problems.append(f"finding observed both positive and negative: {fid}")
        for fid in sorted(evidence.positive | evidence.negative):
            if fid not in seen_f:
                problems.append(f"unknown finding id: {fid}")
        if evidence.order is not None:
            observed = evidence.positive | evidence.negative
            if len(evidence.order) != len(observed) or set(evidence.order) != observed:
                problems.append("order is not a permutation of the observed findings")

    return ValidationReport(tuple(problems))


def finding_absent_given_instance(
    network: Network, finding_id: str, instance: DiseaseInstance
) -> float:
    """Probability the finding stays absent given a full disease assignment.

    The single product that defines the model: (1 - leak) times one
    (1 - p_cause) factor per present cause.
    """
    unknown = instance.present - set(network.disease_index)
    if unknown:
        raise ValidationError(
            [f"unknown disease id: {did}" for did in sorted(unknown)]
        )
    f = network.finding(finding_id)
    prob = 1.0 - f.leak
    for e in f.edges:
        if e.disease in instance.present:
            prob *= 1.0 - e.p_cause
    return prob


def fold_leak_as_virtual_disease(network: Network) -> Network:
    """Rewrite every leak as an always-present virtual disease.

    Each finding with ``leak > 0`` gets a fresh disease with prior 1.0
    and a single edge carrying the leak probability; the finding's own
    leak drops to 0.  Scoring the rewritten network gives the same joint
    and the same posteriors for the original diseases, which makes this
    a useful cross-check against the native leak handling.
    """
    taken = set(network.disease_index)
    new_diseases = list(network.diseases)
    new_findings: list[Finding] = []
    for f in network.findings:
        if f.leak == 0.0:
            new_findings.append(f)
            continue
        vid = f"leak_{f.id}"
        while vid in taken:
            vid += "_"
        taken.add(vid)
        new_diseases.append(Disease(id=vid, prior=1.0))
        new_findings.append(
            Finding(
                id=f.id,
                leak=0.0,
                edges=f.edges + (Edge(disease=vid, p_cause=f.leak),),
                name=f.name,
            )
        )
    return Network(diseases=tuple(new_diseases), findings=tuple(new_findings))
