"""The embedding ``ℓ²(ν) -> ℓ²(μ)`` for positive weight sequences on the naturals.

Its kernel is ``k(i, j) = δ_ij / ν_i`` and every question about the embedding
reduces to the ratio sequence ``r_i = μ_i / ν_i``:

* bounded          iff ``sup r_i < ∞``
* compact          iff ``r_i -> 0``
* Hilbert–Schmidt  iff ``Σ r_i < ∞``
* ``k ∈ L²(μ⊗μ)``  iff ``Σ r_i² < ∞``

Limits and divergence of user sequences are not decidable from finitely many
values, so certified answers come only from declared annotations. Probing up
to a horizon is used to reject annotations the data plainly contradicts and
to attach evidence; it never certifies anything on its own.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import AnnotationConflict, InvalidArgument
from .expr import Expression
from .kernel import make_kernel
from .measure import NATURALS, atomic_measure
from .operator import EmbeddingModel

DEFAULT_HORIZON = 10_000
LIMIT_ABS_TOL = 1e-12


class Verdict(str, Enum):
    YES = "YesCertified"
    NO = "NoCertified"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Finding:
    verdict: Verdict
    justification: str
    evidence: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.verdict is not Verdict.INCONCLUSIVE

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "certified": self.certified,
            "justification": self.justification,
            "evidence": dict(self.evidence),
        }


@dataclass(frozen=True)
class Annotations:
    """Declared asymptotics of ``r_i = μ_i / ν_i``.

    ``ratio_sum_divergent`` and ``ratio_sq_sum_divergent`` are only used when
    ``justifications`` carries a matching entry explaining the comparison.
    """

    ratio_limit: float | None = None
    ratio_sup_finite: bool | None = None
    ratio_sum_divergent: bool | None = None
    ratio_sq_sum_divergent: bool | None = None
    justifications: dict = field(default_factory=dict)

    def justified(self, name: str) -> bool:
        return getattr(self, name) is not None and bool(self.justifications.get(name))

    def to_dict(self) -> dict:
        out = {}
        for name in ("ratio_limit", "ratio_sup_finite", "ratio_sum_divergent", "ratio_sq_sum_divergent"):
            if getattr(self, name) is not None:
                out[name] = getattr(self, name)
        if self.justifications:
            out["justifications"] = {k: self.justifications[k] for k in sorted(self.justifications)}
        return out


@dataclass(frozen=True)
class SequencePair:
    mu: Callable
    nu: Callable
    annotations: Annotations = field(default_factory=Annotations)
    name: str = "custom"

    def ratios(self, horizon: int) -> np.ndarray:
        """``r_i`` for ``i = 1..horizon``; rejects nonpositive generator values."""
        i = np.arange(1, horizon + 1)
        for label, gen in (("mu", self.mu), ("nu", self.nu)):
            vals = np.broadcast_to(np.asarray(gen(i), dtype=float), i.shape)
            bad = ~(vals > 0) | ~np.isfinite(vals)
            if np.any(bad):
                idx = int(i[np.argmax(bad)])
                raise InvalidArgument(f"{label} generator is not strictly positive at index {idx}")
        return np.asarray(self.mu(i), dtype=float) / np.asarray(self.nu(i), dtype=float)

    def ratio(self, i: int) -> float:
        return float(self.mu(i)) / float(self.nu(i))

    def describe(self) -> dict:
        return {"name": self.name, "mu": str(self.mu), "nu": str(self.nu), "annotations": self.annotations.to_dict()}


@dataclass(frozen=True)
class ExampleVerdicts:
    bounded: Finding
    compact: Finding
    hilbert_schmidt: Finding
    kernel_in_l2: Finding

    def __post_init__(self):
        yes = Verdict.YES
        if self.compact.verdict is yes and self.bounded.verdict is not yes:
            raise InvalidArgument("compact certified but bounded not certified")
        if self.hilbert_schmidt.verdict is yes and self.compact.verdict is not yes:
            raise InvalidArgument("Hilbert-Schmidt certified but compact not certified")
        if self.kernel_in_l2.verdict is yes and self.compact.verdict is not yes:
            raise InvalidArgument("kernel in L2 certified but compact not certified")

    def to_dict(self) -> dict:
        return {
            "bounded": self.bounded.to_dict(),
            "compact": self.compact.to_dict(),
            "hilbert_schmidt": self.hilbert_schmidt.to_dict(),
            "kernel_in_l2": self.kernel_in_l2.to_dict(),
        }


def check_annotations(ann: Annotations, r: np.ndarray) -> None:
    """Reject annotations contradicted by the probed ratios or by each other.

    The limit probe is a sanity gate, not a proof: ``ratio_limit = L`` is
    rejected when the deviation from ``L`` at the horizon exceeds half the
    deviation at ``i = 1``.
    """
    horizon = len(r)
    lim = ann.ratio_limit
    if lim is not None:
        if not math.isfinite(lim) or lim < 0:
            raise AnnotationConflict(f"ratio_limit must be finite and >= 0, got {lim!r}")
        d0 = abs(r[0] - lim)
        dh = abs(r[-1] - lim)
        if dh > max(0.5 * d0, LIMIT_ABS_TOL * max(1.0, lim)):
            raise AnnotationConflict(
                f"ratio_limit={lim!r} contradicted: |r_{horizon} - L| = {dh:.3g} "
                f"did not fall below half of |r_1 - L| = {d0:.3g}",
                index=horizon,
            )
        if ann.ratio_sup_finite is False:
            raise AnnotationConflict("a convergent ratio sequence cannot have infinite sup")
    if ann.ratio_sum_divergent is False:
        if lim is not None and lim > 0:
            raise AnnotationConflict("ratios cannot be summable with a positive limit")
        if ann.ratio_sup_finite is False:
            raise AnnotationConflict("ratios cannot be summable with infinite sup")
        if ann.ratio_sq_sum_divergent is True:
            raise AnnotationConflict("summable ratios are square-summable")
    if ann.ratio_sq_sum_divergent is False:
        if lim is not None and lim > 0:
            raise AnnotationConflict("squared ratios cannot be summable with a positive limit")
        if ann.ratio_sup_finite is False:
            raise AnnotationConflict("squared ratios cannot be summable with infinite sup")


def _sum_finding(ann: Annotations, name: str, what: str, partial: float, horizon: int) -> Finding | None:
    ev = {f"partial_sum_{horizon}": partial}
    value = getattr(ann, name)
    if value is None:
        return None
    if not ann.justified(name):
        return Finding(Verdict.INCONCLUSIVE, f"{name} declared without justification", ev)
    why = ann.justifications[name]
    if value:
        return Finding(Verdict.NO, f"{what} diverges (declared: {why})", ev)
    return Finding(Verdict.YES, f"{what} converges (declared: {why})", ev)


def verdicts(pair: SequencePair, horizon: int = DEFAULT_HORIZON) -> ExampleVerdicts:
    if horizon < 10:
        raise InvalidArgument("horizon must be at least 10")
    r = pair.ratios(horizon)
    ann = pair.annotations
    check_annotations(ann, r)

    sup = float(np.max(r))
    s1 = math.fsum(r)
    s2 = math.fsum(r * r)
    probe = {"probed_sup": sup, f"ratio_at_{horizon}": float(r[-1])}
    lim = ann.ratio_limit
    unbounded = ann.ratio_sup_finite is False
    nonvanishing = (lim is not None and lim > 0) or unbounded

    # bounded
    if ann.ratio_sup_finite:
        bounded = Finding(Verdict.YES, "sup of mu_i/nu_i declared finite", probe)
    elif unbounded:
        bounded = Finding(Verdict.NO, "sup of mu_i/nu_i declared infinite", probe)
    elif lim is not None:
        bounded = Finding(Verdict.YES, f"mu_i/nu_i converges to {lim!r}, hence is bounded", probe)
    else:
        bounded = Finding(Verdict.INCONCLUSIVE, "no annotation on sup or limit of mu_i/nu_i", probe)

    # compact
    if lim == 0:
        compact = Finding(Verdict.YES, "mu_i/nu_i -> 0 (declared limit, probe-consistent)", probe)
    elif lim is not None:
        compact = Finding(Verdict.NO, f"mu_i/nu_i -> {lim!r} > 0", probe)
    elif unbounded:
        compact = Finding(Verdict.NO, "mu_i/nu_i is unbounded", probe)
    else:
        compact = Finding(Verdict.INCONCLUSIVE, "no annotation on the limit of mu_i/nu_i", probe)

    hs = _sum_finding(ann, "ratio_sum_divergent", "sum of mu_i/nu_i", s1, horizon)
    if hs is None or (not hs.certified and nonvanishing):
        if nonvanishing:
            hs = Finding(Verdict.NO, "terms mu_i/nu_i do not tend to 0", {f"partial_sum_{horizon}": s1})
        else:
            hs = Finding(Verdict.INCONCLUSIVE, "no annotation on sum of mu_i/nu_i", {f"partial_sum_{horizon}": s1})

    l2 = _sum_finding(ann, "ratio_sq_sum_divergent", "sum of (mu_i/nu_i)^2", s2, horizon)
    if l2 is None or not l2.certified:
        ev = {f"partial_sum_{horizon}": s2}
        if hs.verdict is Verdict.YES:
            l2 = Finding(Verdict.YES, "summable ratios are square-summable", ev)
        elif nonvanishing:
            l2 = Finding(Verdict.NO, "terms (mu_i/nu_i)^2 do not tend to 0", ev)
        elif l2 is None:
            l2 = Finding(Verdict.INCONCLUSIVE, "no annotation on sum of (mu_i/nu_i)^2", ev)

    # summability of either series forces r_i -> 0
    if (hs.verdict is Verdict.YES or l2.verdict is Verdict.YES) and compact.verdict is not Verdict.YES:
        compact = Finding(Verdict.YES, "summable (squared) ratios force mu_i/nu_i -> 0", probe)
        if bounded.verdict is not Verdict.YES:
            bounded = Finding(Verdict.YES, "mu_i/nu_i -> 0, hence bounded", probe)
    if bounded.verdict is Verdict.NO and compact.verdict is Verdict.INCONCLUSIVE:
        compact = Finding(Verdict.NO, "an unbounded operator is not compact", probe)
    if compact.verdict is Verdict.NO:
        if hs.verdict is Verdict.INCONCLUSIVE:
            hs = Finding(Verdict.NO, "not compact, hence not Hilbert-Schmidt", hs.evidence)
        if l2.verdict is Verdict.INCONCLUSIVE:
            l2 = Finding(Verdict.NO, "not compact, hence kernel not in L2", l2.evidence)

    return ExampleVerdicts(bounded, compact, hs, l2)


def paper_example() -> SequencePair:
    """``μ_i = 1/i²``, ``ν_i = log(i+1)/i²``: compact but not Hilbert–Schmidt."""
    ann = Annotations(
        ratio_limit=0.0,
        ratio_sup_finite=True,
        ratio_sum_divergent=True,
        ratio_sq_sum_divergent=True,
        justifications={
            "ratio_limit": "mu_i/nu_i = 1/log(i+1) -> 0",
            "ratio_sup_finite": "1/log(i+1) <= 1/log 2 for i >= 1",
            "ratio_sum_divergent": "1/log(i+1) >= 1/i since log(i+1) <= i; harmonic series diverges",
            "ratio_sq_sum_divergent": "1/log(i+1)^2 >= 1/i since log(i+1)^2 <= i; harmonic series diverges",
        },
    )
    return SequencePair(Expression("1/i**2"), Expression("log(i+1)/i**2"), ann, name="paper_example")


def equal_pair(base: Callable) -> SequencePair:
    """``μ = ν``: bounded (ratio 1) but not compact."""
    ann = Annotations(ratio_limit=1.0, ratio_sup_finite=True, justifications={"ratio_limit": "mu = nu, ratio is 1"})
    return SequencePair(base, base, ann, name="equal")


def finite_model(pair: SequencePair, horizon: int) -> EmbeddingModel:
    """The diagonal-kernel model truncated to atoms ``1..horizon``."""
    i = np.arange(1, horizon + 1)
    weights = np.broadcast_to(np.asarray(pair.mu(i), dtype=float), i.shape)
    kernel = make_kernel("diagonal_sequence", nu=pair.nu)
    return EmbeddingModel(kernel, atomic_measure(tuple(range(1, horizon + 1)), weights, NATURALS))
