"""Exact scoring by a signed scan over subsets of the positive findings.

The joint probability of evidence (F+, F-) is an inclusion-exclusion sum
over subsets F' of F+::

    p(F+, F-) = sum over F' of F+ of
        sign(F')                                  # (-1) ** |F'|
        * prod_{f in F' u F-} (1 - leak_f)
        * prod_i [ miss_i(F') * prior_i + (1 - prior_i) ]

where ``miss_i(F') = prod_{f in F' u F-} (1 - p_cause(i, f))`` is the
probability that disease i alone would leave every finding in F' u F-
absent.  Negative findings participate identically in every term, so
their factors are folded once into a per-disease base product in
O(n * m-); the scan then costs O(n) per subset and O(n * 2**m+) total.

Mechanics, pinned because the exact-reproducibility contract below
depends on them:

* Subsets are visited at indices k = 0 .. 2**m+ - 1; the subset at
  index k is the bit set of the reflected Gray code ``k ^ (k >> 1)``,
  bit b meaning "positive finding b is in F'".  Consecutive indices
  differ in exactly one bit (bit b = count of trailing zeros of k), so
  each step multiplies or divides one (1 - p_cause) factor per affected
  disease and one (1 - leak) factor.  A factor of exactly 0 (p_cause or
  leak of 1) is never divided: per disease we count zero factors
  currently applied and keep the product of the nonzero ones.
* The first 2**j indices enumerate exactly the subsets of the first j
  positive findings, so an incremental session extends the same scan in
  place when positive finding j+1 arrives (indices 2**j .. 2**(j+1)-1).
* Every 4096 steps the running products are recomputed from the base
  values at the current Gray code, bounding multiplicative drift.  The
  rebase happens at fixed indices, so batch and incremental scans stay
  operation-for-operation identical.
* Terms carry alternating signs and cancel heavily as m+ grows, so the
  joint and the per-disease sums are accumulated with compensated
  (Neumaier) summation in index order.
* Posterior numerators need the all-but-one products
  ``prod_{j != i} t_j``; they are formed from prefix and suffix product
  passes, never by dividing the full product, which would break when
  some t_i is 0 (legal with extreme priors).

Exact reproducibility contract: a batch :func:`score` and a
:class:`Session` that incorporated the same findings in the same order
(``Evidence.order``) execute the same float operations in the same
order, so joints and posteriors agree bit for bit, not just within
tolerance.

:func:`score` and :func:`negative_marginal` are pure functions of
immutable inputs and safe to call concurrently.  A Session instance is
mutable and must not be shared between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .errors import (
    CapExceeded,
    DuplicateFinding,
    InfeasibleEvidence,
    ValidationError,
)
from .model import Evidence, Network, validate

DEFAULT_POSITIVE_CAP = 24

# Raw joints barely above 1 are float noise from the alternating sum;
# anything farther out would be a bug and is left visible.
_JOINT_ONE_SLACK = 1e-9

# Recompute running products from the base every this many subset
# indices (power of two); bounds multiplicative drift at ~4096 rounding
# errors without changing the visit order.
_REBASE_MASK = 4095


@dataclass(frozen=True)
class InferenceResult:
    """Outcome of scoring one evidence set.

    ``posteriors`` maps disease id to p(present | evidence), in network
    declaration order; it is None when the evidence turned out to have
    zero probability (only reachable through sessions; batch scoring
    raises instead).  ``terms_evaluated`` counts subset terms, always
    2**m+ including the empty subset.
    """

    joint: float
    posteriors: dict[str, float] | None
    terms_evaluated: int


@njit(cache=True)
def _walk(k0, k1, prior, pneg, pos_off, pos_dis, pos_fac, pos_leak,
          base_q, base_leak, qprod, qzero, cond_s, cond_c,
          q_buf, t_buf, suf_buf, fstate, istate):
    """Scan subset indices [k0, k1), updating all running state in place.

    fstate = [leak product over F', joint sum, joint carry]
    istate = [zero-leak-factor count, sign]
    qprod/qzero: per-disease nonzero miss product and zero-factor count
    cond_s/cond_c: per-disease compensated posterior numerator sums
    """
    n = prior.shape[0]
    m_pos = pos_leak.shape[0]
    leak_prod = fstate[0]
    joint_s = fstate[1]
    joint_c = fstate[2]
    leak_zeros = istate[0]
    sign = istate[1]

    for k in range(k0, k1):
        if k > 0:
            g = k ^ (k >> 1)
            if (k & _REBASE_MASK) == 0:
                # rebase: rebuild products for this Gray code from scratch
                for i in range(n):
                    qprod[i] = base_q[i]
                    qzero[i] = 0
                leak_prod = base_leak
                leak_zeros = 0
                bits = 0
                for b in range(m_pos):
                    if (g >> b) & 1:
                        bits += 1
                        lf = pos_leak[b]
                        if lf == 0.0:
                            leak_zeros += 1
                        else:
                            leak_prod *= lf
                        for e in range(pos_off[b], pos_off[b + 1]):
                            a = pos_fac[e]
                            if a == 0.0:
                                qzero[pos_dis[e]] += 1
                            else:
                                qprod[pos_dis[e]] *= a
                sign = 1 if (bits & 1) == 0 else -1
            else:
                # flip exactly one finding in or out of F'
                b = 0
                kk = k
                while (kk & 1) == 0:
                    kk >>= 1
                    b += 1
                adding = ((g >> b) & 1) == 1
                sign = -sign
                lf = pos_leak[b]
                if adding:
                    if lf == 0.0:
                        leak_zeros += 1
                    else:
                        leak_prod *= lf
                    for e in range(pos_off[b], pos_off[b + 1]):
                        a = pos_fac[e]
                        if a == 0.0:
                            qzero[pos_dis[e]] += 1
                        else:
                            qprod[pos_dis[e]] *= a
                else:
                    if lf == 0.0:
                        leak_zeros -= 1
                    else:
                        leak_prod /= lf
                    for e in range(pos_off[b], pos_off[b + 1]):
                        a = pos_fac[e]
                        if a == 0.0:
                            qzero[pos_dis[e]] -= 1
                        else:
                            qprod[pos_dis[e]] /= a

        # evaluate the current subset's term
        weight = 0.0 if leak_zeros > 0 else leak_prod
        if sign < 0:
            weight = -weight

        # backward pass: per-disease factors t_i and exclusive suffix
        # products; `full` ends as prod of all t_i
        full = 1.0
        for i in range(n - 1, -1, -1):
            q = qprod[i] if qzero[i] == 0 else 0.0
            q_buf[i] = q
            t_buf[i] = q * prior[i] + pneg[i]
            suf_buf[i] = full
            full *= t_buf[i]

        term = weight * full
        t = joint_s + term
        if abs(joint_s) >= abs(term):
            joint_c += (joint_s - t) + term
        else:
            joint_c += (term - t) + joint_s
        joint_s = t

        # forward pass: posterior numerators via prefix * suffix
        pre = 1.0
        for i in range(n):
            v = weight * (q_buf[i] * (pre * suf_buf[i]))
            s = cond_s[i]
            t = s + v
            if abs(s) >= abs(v):
                cond_c[i] += (s - t) + v
            else:
                cond_c[i] += (v - t) + s
            cond_s[i] = t
            pre *= t_buf[i]

    fstate[0] = leak_prod
    fstate[1] = joint_s
    fstate[2] = joint_c
    istate[0] = leak_zeros
    istate[1] = sign


class _Prepared:
    """Dense, index-based view of a network."""

    def __init__(self, network: Network):
        self.network = network
        n = network.n_diseases
        self.n = n
        self.prior = np.array([d.prior for d in network.diseases], dtype=np.float64)
        self.pneg = 1.0 - self.prior
        didx = network.disease_index
        self.edge_dis: list[np.ndarray] = []
        self.edge_fac: list[np.ndarray] = []
        self.leak_fac: list[float] = []
        self.causable: list[bool] = []
        for f in network.findings:
            dis = np.array([didx[e.disease] for e in f.edges], dtype=np.int64)
            fac = np.array([1.0 - e.p_cause for e in f.edges], dtype=np.float64)
            self.edge_dis.append(dis)
            self.edge_fac.append(fac)
            self.leak_fac.append(1.0 - f.leak)
            self.causable.append(
                f.leak > 0.0
                or any(
                    e.p_cause > 0.0 and network.diseases[didx[e.disease]].prior > 0.0
                    for e in f.edges
                )
            )


class _Scan:
    """Resumable subset scan: the shared engine behind score and Session."""

    def __init__(self, prep: _Prepared):
        self.prep = prep
        n = prep.n
        self.base_q = np.ones(n, dtype=np.float64)
        self.base_leak = 1.0
        self.pos_ids: list[str] = []
        self.neg_ids: list[str] = []
        self.pos_off = np.zeros(1, dtype=np.int64)
        self.pos_dis = np.zeros(0, dtype=np.int64)
        self.pos_fac = np.zeros(0, dtype=np.float64)
        self.pos_leak = np.zeros(0, dtype=np.float64)
        self.qprod = np.ones(n, dtype=np.float64)
        self.qzero = np.zeros(n, dtype=np.int64)
        self.cond_s = np.zeros(n, dtype=np.float64)
        self.cond_c = np.zeros(n, dtype=np.float64)
        self.q_buf = np.zeros(n, dtype=np.float64)
        self.t_buf = np.zeros(n, dtype=np.float64)
        self.suf_buf = np.zeros(n, dtype=np.float64)
        self.fstate = np.array([1.0, 0.0, 0.0], dtype=np.float64)
        self.istate = np.array([0, 1], dtype=np.int64)
        self.next_k = 0

    def fold_negative(self, finding_id: str) -> None:
        """Multiply one negative finding into the per-disease base."""
        fi = self.prep.network.finding_index[finding_id]
        self.neg_ids.append(finding_id)
        self.base_q[self.prep.edge_dis[fi]] *= self.prep.edge_fac[fi]
        self.base_leak *= self.prep.leak_fac[fi]

    def append_positive(self, finding_id: str) -> None:
        """Assign the next subset bit to a positive finding."""
        fi = self.prep.network.finding_index[finding_id]
        self.pos_ids.append(finding_id)
        self.pos_off = np.append(
            self.pos_off, self.pos_off[-1] + self.prep.edge_dis[fi].shape[0]
        )
        self.pos_dis = np.concatenate([self.pos_dis, self.prep.edge_dis[fi]])
        self.pos_fac = np.concatenate([self.pos_fac, self.prep.edge_fac[fi]])
        self.pos_leak = np.append(self.pos_leak, self.prep.leak_fac[fi])

    def restart(self) -> None:
        """Reset the scan to index 0 with the current base products."""
        self.qprod[:] = self.base_q
        self.qzero[:] = 0
        self.cond_s[:] = 0.0
        self.cond_c[:] = 0.0
        self.fstate[0] = self.base_leak
        self.fstate[1] = 0.0
        self.fstate[2] = 0.0
        self.istate[0] = 0
        self.istate[1] = 1
        self.next_k = 0

    def run_to(self, k_end: int) -> None:
        _walk(
            self.next_k, k_end, self.prep.prior, self.prep.pneg,
            self.pos_off, self.pos_dis, self.pos_fac, self.pos_leak,
            self.base_q, self.base_leak, self.qprod, self.qzero,
            self.cond_s, self.cond_c, self.q_buf, self.t_buf, self.suf_buf,
            self.fstate, self.istate,
        )
        self.next_k = k_end

    def raw_joint(self) -> float:
        return float(self.fstate[1] + self.fstate[2])


def _resolve_order(
    network: Network, evidence: Evidence
) -> tuple[list[str], list[str]]:
    """Split evidence into ordered positive and negative lists.

    ``evidence.order`` wins when present; otherwise network declaration
    order.  The order only pins the float operation sequence (and the
    session reproducibility contract); it never changes the probability
    being computed beyond rounding.
    """
    if evidence.order is not None:
        pos = [fid for fid in evidence.order if fid in evidence.positive]
        neg = [fid for fid in evidence.order if fid in evidence.negative]
    else:
        fidx = network.finding_index
        pos = sorted(evidence.positive, key=fidx.__getitem__)
        neg = sorted(evidence.negative, key=fidx.__getitem__)
    return pos, neg


def _require_causable(prep: _Prepared, finding_id: str) -> None:
    """Exact structural infeasibility check for one positive finding.

    A positive finding with no leak and no effective cause (every edge
    has p_cause 0 or a prior-0 disease) forces the joint to exactly 0.
    Detecting it up front keeps the outcome exact: the alternating sum
    would otherwise only reach zero up to rounding noise.
    """
    if not prep.causable[prep.network.finding_index[finding_id]]:
        raise InfeasibleEvidence(
            f"positive finding {finding_id} cannot occur: "
            "no leak and no effective cause"
        )


def _posteriors(scan: _Scan, joint: float) -> dict[str, float]:
    """Posterior per disease: prior * conditional-sum / joint.

    Priors of exactly 0 and 1 short-circuit to 0 and 1: evidence with
    positive probability cannot move a certainty, and the analytic
    identity keeps the result exact where float division would not.
    """
    out: dict[str, float] = {}
    for i, d in enumerate(scan.prep.network.diseases):
        if d.prior == 0.0:
            out[d.id] = 0.0
        elif d.prior == 1.0:
            out[d.id] = 1.0
        else:
            cond = float(scan.cond_s[i] + scan.cond_c[i])
            out[d.id] = min(max(d.prior * cond / joint, 0.0), 1.0)
    return out


def _finish(scan: _Scan) -> InferenceResult:
    raw = scan.raw_joint()
    if raw <= 0.0:
        # zero within rounding (or a genuinely impossible configuration)
        return InferenceResult(
            joint=0.0, posteriors=None, terms_evaluated=scan.next_k
        )
    joint = 1.0 if 1.0 < raw <= 1.0 + _JOINT_ONE_SLACK else raw
    return InferenceResult(
        joint=joint,
        posteriors=_posteriors(scan, joint),
        terms_evaluated=scan.next_k,
    )


def score(
    network: Network,
    evidence: Evidence,
    *,
    positive_cap: int = DEFAULT_POSITIVE_CAP,
) -> InferenceResult:
    """Joint probability of the evidence plus every disease posterior.

    Raises CapExceeded when the positive findings outnumber the cap
    (cost doubles with each one) and InfeasibleEvidence when the
    evidence has zero probability.
    """
    validate(network, evidence).raise_if_failed()
    pos, neg = _resolve_order(network, evidence)
    if len(pos) > positive_cap:
        raise CapExceeded(
            f"{len(pos)} positive findings exceed the cap of {positive_cap}; "
            "every positive finding doubles the number of subset terms "
            f"(this evidence needs 2**{len(pos)})"
        )
    prep = _Prepared(network)
    for fid in pos:
        _require_causable(prep, fid)
    scan = _Scan(prep)
    for fid in neg:
        scan.fold_negative(fid)
    for fid in pos:
        scan.append_positive(fid)
    scan.restart()
    scan.run_to(1 << len(pos))
    result = _finish(scan)
    if result.posteriors is None:
        raise InfeasibleEvidence(
            f"evidence has zero probability (joint {scan.raw_joint()!r})"
        )
    return result


def negative_marginal(network: Network, negatives: Iterable[str]) -> float:
    """p(all given findings absent), directly in O(n * m-).

    All-negative evidence needs no subset scan: the joint factors into
    one term per disease, ``miss_i * prior_i + (1 - prior_i)``, times
    the product of (1 - leak) over the observed findings.
    """
    ev = Evidence(negative=frozenset(negatives))
    validate(network, ev).raise_if_failed()
    prep = _Prepared(network)
    fidx = network.finding_index
    q = np.ones(prep.n, dtype=np.float64)
    leak = 1.0
    for fid in sorted(ev.negative, key=fidx.__getitem__):
        fi = fidx[fid]
        q[prep.edge_dis[fi]] *= prep.edge_fac[fi]
        leak *= prep.leak_fac[fi]
    return float(leak * np.prod(q * prep.prior + prep.pneg))


class Session:
    """Incremental scoring: incorporate findings one at a time.

    After every add the session's result equals a batch :func:`score`
    over the findings incorporated so far, with ``Evidence.order`` set
    to the incorporation sequence, bit for bit (see the module
    docstring).  Adding a positive finding extends the existing scan by
    doubling the subset space, O(n * 2**j) for the j+1th positive
    finding.  Adding a negative finding multiplies the per-disease base
    products by one factor each, O(n); while positive findings are
    already incorporated this also replays the scan over the current
    subset space, since every term depends on the base.
    """

    def __init__(
        self,
        network: Network,
        *,
        positive_cap: int = DEFAULT_POSITIVE_CAP,
    ):
        validate(network).raise_if_failed()
        self._network = network
        self._cap = positive_cap
        self._prep = _Prepared(network)
        self._hint: tuple[str, ...] | None = None
        self._scan = _Scan(self._prep)
        self._scan.restart()
        self._scan.run_to(1)
        self._result = _finish(self._scan)

    @property
    def network(self) -> Network:
        return self._network

    @property
    def positive_ids(self) -> tuple[str, ...]:
        return tuple(self._scan.pos_ids)

    @property
    def negative_ids(self) -> tuple[str, ...]:
        return tuple(self._scan.neg_ids)

    @property
    def result(self) -> InferenceResult:
        """Result for everything incorporated so far."""
        return self._result

    def order_hint(self, order: Sequence[str]) -> None:
        """Record the caller's intended incorporation order.

        Purely advisory: the session never reorders anything itself.
        The hint must name known findings without repeats.
        """
        seen: set[str] = set()
        for fid in order:
            if fid not in self._network.finding_index:
                raise ValidationError([f"unknown finding id: {fid}"])
            if fid in seen:
                raise ValidationError([f"order hint repeats finding: {fid}"])
            seen.add(fid)
        self._hint = tuple(order)

    @property
    def hinted_order(self) -> tuple[str, ...] | None:
        return self._hint

    def add(self, finding_id: str, positive: bool) -> InferenceResult:
        """Incorporate one observed finding and return the new result.

        On any raised error the session state is unchanged.
        """
        if finding_id not in self._network.finding_index:
            raise ValidationError([f"unknown finding id: {finding_id}"])
        scan = self._scan
        if finding_id in scan.pos_ids or finding_id in scan.neg_ids:
            raise DuplicateFinding(f"finding already incorporated: {finding_id}")
        if positive:
            j = len(scan.pos_ids)
            if j + 1 > self._cap:
                raise CapExceeded(
                    f"a {j + 1}th positive finding exceeds the cap of "
                    f"{self._cap}; every positive finding doubles the number "
                    f"of subset terms (this one would make 2**{j + 1})"
                )
            _require_causable(self._prep, finding_id)
            scan.append_positive(finding_id)
            scan.run_to(1 << (j + 1))
        else:
            scan.fold_negative(finding_id)
            scan.restart()
            scan.run_to(1 << len(scan.pos_ids))
        self._result = _finish(scan)
        return self._result

    def add_positive(self, finding_id: str) -> InferenceResult:
        return self.add(finding_id, True)

    def add_negative(self, finding_id: str) -> InferenceResult:
        return self.add(finding_id, False)

    def reset(self) -> InferenceResult:
        """Drop all incorporated findings; keep the network and cap."""
        self._scan = _Scan(self._prep)
        self._scan.restart()
        self._scan.run_to(1)
        self._result = _finish(self._scan)
        return self._result
