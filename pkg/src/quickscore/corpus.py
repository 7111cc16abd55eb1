"""File formats and the seeded synthetic corpus generator.

All three on-disk formats are strict JSON, format version 1: unknown
keys are rejected, required keys must be present, and every probability
is written with Python's shortest round-trip float representation (at
most 17 significant digits), so ``read(write(x))`` reproduces every
double bit for bit.

Knowledge base::

    {"version": 1,
     "diseases": [{"id": "d1", "name": "...", "prior": 0.1}, ...],
     "findings": [{"id": "f1", "name": "...", "leak": 0.0,
                   "edges": [{"disease": "d1", "p_cause": 0.8}, ...]}, ...]}

Case::

    {"positive": ["f1", ...], "negative": ["f2", ...], "order": [...]}

with every key optional ({} is a valid empty case).  Result::

    {"joint": 0.1474, "posteriors": [{"disease": "d1", "posterior": ...}],
     "terms_evaluated": 2, "method": "quickscore" | "oracle"}

``name`` in KB entries and ``order`` in cases are optional; everything
else is required.  Structural problems (bad JSON, wrong types, unknown
keys) raise ParseError; semantic problems (probabilities out of range,
duplicate ids, overlapping evidence) raise ValidationError.

Generator determinism contract
------------------------------

:func:`generate` must produce byte-identical output for the same
config, today and in any future version short of a format-version
bump.  It therefore draws randomness exclusively through
``random.Random(seed).random()`` - the Mersenne Twister double stream,
which Python documents as stable across versions for a given seed - and
derives everything else from those doubles in the fixed order below.
No other ``Random`` method is used, so changes to the library's derived
samplers cannot shift the stream.

1. Per disease, in order: one draw for the prior,
   ``lo + r * (hi - lo)``.
2. Per finding, in order: one draw for the edge-count remainder when
   ``edges_per_finding`` has a fractional part (degree is
   ``floor(mean)`` plus a Bernoulli(frac) extra, capped at n); then a
   partial Fisher-Yates draw per chosen edge (``int(r * remaining)``);
   then, per chosen disease in ascending index order, one draw for
   p_cause; finally one draw for the leak.
3. Per case: one draw per disease, in order (present iff
   ``r < prior``); then one draw per finding, in order (present iff
   ``r >= p(absent | instance)``, the noisy-OR law); then the
   partial Fisher-Yates draws selecting which absent findings are
   reported negative.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from pathlib import Path

from .engine import InferenceResult
from .errors import InvalidConfig, ParseError, ValidationError
from .model import (
    Disease,
    DiseaseInstance,
    Edge,
    Evidence,
    Finding,
    Network,
    finding_absent_given_instance,
    validate,
)

_METHODS = ("quickscore", "oracle")


# ---------------------------------------------------------------------------
# strict JSON plumbing


def _load_json(path: str | Path) -> object:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}"
        ) from exc


def _dump_json(doc: object, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, allow_nan=False)
        fh.write("\n")


def _require_object(value: object, where: str, required: tuple[str, ...],
                    optional: tuple[str, ...] = ()) -> dict:
    if not isinstance(value, dict):
        raise ParseError(f"{where}: expected an object, got {type(value).__name__}")
    unknown = sorted(set(value) - set(required) - set(optional))
    if unknown:
        raise ParseError(f"{where}: unknown keys: {', '.join(unknown)}")
    missing = sorted(set(required) - set(value))
    if missing:
        raise ParseError(f"{where}: missing keys: {', '.join(missing)}")
    return value


def _string(value: object, where: str) -> str:
    if not isinstance(value, str):
        raise ParseError(f"{where}: expected a string, got {type(value).__name__}")
    return value


def _number(value: object, where: str) -> float:
    # bool is an int subclass; reject it explicitly
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: expected a number, got {type(value).__name__}")
    out = float(value)
    if not math.isfinite(out):
        raise ParseError(f"{where}: expected a finite number, got {out!r}")
    return out


def _integer(value: object, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: expected an integer, got {type(value).__name__}")
    return value


def _string_list(value: object, where: str) -> list[str]:
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected a list, got {type(value).__name__}")
    return [_string(v, f"{where}[{i}]") for i, v in enumerate(value)]


# ---------------------------------------------------------------------------
# knowledge base files


def write_kb(network: Network, path: str | Path) -> None:
    doc: dict = {"version": 1, "diseases": [], "findings": []}
    for d in network.diseases:
        entry: dict = {"id": d.id}
        if d.name is not None:
            entry["name"] = d.name
        entry["prior"] = d.prior
        doc["diseases"].append(entry)
    for f in network.findings:
        entry = {"id": f.id}
        if f.name is not None:
            entry["name"] = f.name
        entry["leak"] = f.leak
        entry["edges"] = [
            {"disease": e.disease, "p_cause": e.p_cause} for e in f.edges
        ]
        doc["findings"].append(entry)
    _dump_json(doc, path)


def read_kb(path: str | Path) -> Network:
    """Parse and validate a knowledge base file."""
    doc = _require_object(
        _load_json(path), str(path), ("version", "diseases", "findings")
    )
    version = _integer(doc["version"], f"{path}: version")
    if version != 1:
        raise ParseError(f"{path}: unsupported format version: {version}")
    if not isinstance(doc["diseases"], list) or not isinstance(doc["findings"], list):
        raise ParseError(f"{path}: diseases and findings must be lists")

    diseases = []
    for i, entry in enumerate(doc["diseases"]):
        where = f"{path}: diseases[{i}]"
        obj = _require_object(entry, where, ("id", "prior"), ("name",))
        diseases.append(
            Disease(
                id=_string(obj["id"], f"{where}.id"),
                prior=_number(obj["prior"], f"{where}.prior"),
                name=_string(obj["name"], f"{where}.name") if "name" in obj else None,
            )
        )
    findings = []
    for i, entry in enumerate(doc["findings"]):
        where = f"{path}: findings[{i}]"
        obj = _require_object(entry, where, ("id", "leak", "edges"), ("name",))
        if not isinstance(obj["edges"], list):
            raise ParseError(f"{where}.edges: expected a list")
        edges = []
        for j, eentry in enumerate(obj["edges"]):
            ewhere = f"{where}.edges[{j}]"
            eobj = _require_object(eentry, ewhere, ("disease", "p_cause"))
            edges.append(
                Edge(
                    disease=_string(eobj["disease"], f"{ewhere}.disease"),
                    p_cause=_number(eobj["p_cause"], f"{ewhere}.p_cause"),
                )
            )
        findings.append(
            Finding(
                id=_string(obj["id"], f"{where}.id"),
                leak=_number(obj["leak"], f"{where}.leak"),
                edges=tuple(edges),
                name=_string(obj["name"], f"{where}.name") if "name" in obj else None,
            )
        )
    network = Network(diseases=tuple(diseases), findings=tuple(findings))
    validate(network).raise_if_failed()
    return network


# ---------------------------------------------------------------------------
# case files


def write_case(evidence: Evidence, path: str | Path) -> None:
    doc: dict = {
        "positive": sorted(evidence.positive),
        "negative": sorted(evidence.negative),
    }
    if evidence.order is not None:
        doc["order"] = list(evidence.order)
    _dump_json(doc, path)


def read_case(path: str | Path) -> Evidence:
    """Parse a case file; every key is optional ({} means no evidence)."""
    doc = _require_object(
        _load_json(path), str(path), (), ("positive", "negative", "order")
    )
    positive = _string_list(doc.get("positive", []), f"{path}: positive")
    negative = _string_list(doc.get("negative", []), f"{path}: negative")
    for name, ids in (("positive", positive), ("negative", negative)):
        dups = {fid for fid in ids if ids.count(fid) > 1}
        if dups:
            raise ParseError(
                f"{path}: duplicate finding in {name} list: {', '.join(sorted(dups))}"
            )
    both = sorted(set(positive) & set(negative))
    if both:
        raise ValidationError(
            [f"finding observed both positive and negative: {fid}" for fid in both]
        )
    order: tuple[str, ...] | None = None
    if "order" in doc:
        order_list = _string_list(doc["order"], f"{path}: order")
        observed = set(positive) | set(negative)
        if len(order_list) != len(observed) or set(order_list) != observed:
            raise ValidationError(
                ["order is not a permutation of the observed findings"]
            )
        order = tuple(order_list)
    return Evidence(
        positive=frozenset(positive), negative=frozenset(negative), order=order
    )


# ---------------------------------------------------------------------------
# result files


def result_document(result: InferenceResult, *, method: str = "quickscore") -> dict:
    """The result-file JSON document as a plain dict."""
    if method not in _METHODS:
        raise ValueError(f"unknown method: {method!r}")
    if result.posteriors is None:
        raise ValueError("cannot serialize a result without posteriors")
    return {
        "joint": result.joint,
        "posteriors": [
            {"disease": did, "posterior": p} for did, p in result.posteriors.items()
        ],
        "terms_evaluated": result.terms_evaluated,
        "method": method,
    }


def write_result(
    result: InferenceResult, path: str | Path, *, method: str = "quickscore"
) -> None:
    _dump_json(result_document(result, method=method), path)


def read_result(path: str | Path) -> tuple[InferenceResult, str]:
    doc = _require_object(
        _load_json(path), str(path),
        ("joint", "posteriors", "terms_evaluated", "method"),
    )
    joint = _number(doc["joint"], f"{path}: joint")
    if not isinstance(doc["posteriors"], list):
        raise ParseError(f"{path}: posteriors: expected a list")
    posteriors: dict[str, float] = {}
    for i, entry in enumerate(doc["posteriors"]):
        where = f"{path}: posteriors[{i}]"
        obj = _require_object(entry, where, ("disease", "posterior"))
        did = _string(obj["disease"], f"{where}.disease")
        if did in posteriors:
            raise ParseError(f"{where}: duplicate disease: {did}")
        posteriors[did] = _number(obj["posterior"], f"{where}.posterior")
    terms = _integer(doc["terms_evaluated"], f"{path}: terms_evaluated")
    method = _string(doc["method"], f"{path}: method")
    if method not in _METHODS:
        raise ParseError(f"{path}: method: expected one of {_METHODS}, got {method!r}")
    return InferenceResult(joint, posteriors, terms), method


# ---------------------------------------------------------------------------
# synthetic corpus generator


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for synthetic networks and sampled cases.

    Ranges are closed-below half-open intervals over [0, 1]; a range
    with lo == hi pins the value.  ``edges_per_finding`` is the mean
    edge count per finding (fractional means are honored in
    expectation).  ``negatives_per_case`` absent findings are reported
    negative per sampled case (fewer when fewer are absent).
    """

    n_diseases: int
    n_findings: int
    edges_per_finding: float = 3.0
    prior_range: tuple[float, float] = (0.001, 0.1)
    p_cause_range: tuple[float, float] = (0.1, 0.9)
    leak_range: tuple[float, float] = (0.0, 0.0)
    seed: int = 0
    n_cases: int = 0
    negatives_per_case: int = 0

    def __post_init__(self) -> None:
        problems = []
        if self.n_diseases < 0:
            problems.append(f"n_diseases must be >= 0: {self.n_diseases}")
        if self.n_findings < 0:
            problems.append(f"n_findings must be >= 0: {self.n_findings}")
        if self.edges_per_finding < 0:
            problems.append(
                f"edges_per_finding must be >= 0: {self.edges_per_finding}"
            )
        for name in ("prior_range", "p_cause_range", "leak_range"):
            lo, hi = getattr(self, name)
            if not (0.0 <= lo <= hi <= 1.0):
                problems.append(f"{name} must satisfy 0 <= lo <= hi <= 1: ({lo}, {hi})")
        if self.n_cases < 0:
            problems.append(f"n_cases must be >= 0: {self.n_cases}")
        if self.negatives_per_case < 0:
            problems.append(
                f"negatives_per_case must be >= 0: {self.negatives_per_case}"
            )
        if problems:
            raise InvalidConfig("; ".join(problems))


def _sample_indices(rng: random.Random, population: int, k: int) -> list[int]:
    """k distinct indices from range(population), uniform, ascending.

    Partial Fisher-Yates driven only by ``rng.random()`` so the draw
    stays inside the documented stream contract.
    """
    pool = list(range(population))
    for t in range(k):
        u = t + int(rng.random() * (population - t))
        pool[t], pool[u] = pool[u], pool[t]
    return sorted(pool[:k])


def _uniform(rng: random.Random, lo: float, hi: float) -> float:
    return lo + rng.random() * (hi - lo)


def _id_width(count: int) -> int:
    return max(1, len(str(count)))


def generate(config: GeneratorConfig) -> tuple[Network, list[Evidence]]:
    """Build a synthetic network and sample cases from it.

    Cases are honest draws from the model's own law: sample a disease
    instance from the priors, then push it through each finding's
    noisy-OR gate; present findings become the positive set, and
    ``negatives_per_case`` of the absent findings (uniform without
    replacement) are reported negative.  Deterministic per the module
    docstring; identical configs give identical output, byte for byte
    once written.
    """
    rng = random.Random(config.seed)
    n, m = config.n_diseases, config.n_findings
    dw, fw = _id_width(n), _id_width(m)

    diseases = tuple(
        Disease(
            id=f"d{i + 1:0{dw}d}",
            prior=_uniform(rng, *config.prior_range),
        )
        for i in range(n)
    )

    base_degree = int(math.floor(config.edges_per_finding))
    frac_degree = config.edges_per_finding - base_degree
    findings = []
    for j in range(m):
        degree = base_degree
        if frac_degree > 0.0 and rng.random() < frac_degree:
            degree += 1
        degree = min(degree, n)
        chosen = _sample_indices(rng, n, degree)
        edges = tuple(
            Edge(
                disease=diseases[i].id,
                p_cause=_uniform(rng, *config.p_cause_range),
            )
            for i in chosen
        )
        findings.append(
            Finding(
                id=f"f{j + 1:0{fw}d}",
                leak=_uniform(rng, *config.leak_range),
                edges=edges,
            )
        )
    network = Network(diseases=diseases, findings=tuple(findings))

    cases = []
    for _ in range(config.n_cases):
        present = frozenset(
            d.id for d in network.diseases if rng.random() < d.prior
        )
        instance = DiseaseInstance(present=present)
        positive = []
        absent = []
        for f in network.findings:
            q = finding_absent_given_instance(network, f.id, instance)
            if rng.random() >= q:
                positive.append(f.id)
            else:
                absent.append(f.id)
        k = min(config.negatives_per_case, len(absent))
        negative = [absent[i] for i in _sample_indices(rng, len(absent), k)]
        cases.append(
            Evidence(positive=frozenset(positive), negative=frozenset(negative))
        )
    return network, cases
