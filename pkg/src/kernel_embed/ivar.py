"""Weighted infinite-variate tensor-product spaces.

Given a univariate embedding ``S: H(k) -> L²(μ)`` with ``μ`` a probability
measure, weights ``γ_u`` over finite subsets ``u ⊂ ℕ`` build the kernel
``K_γ(x, y) = Σ_u γ_u ∏_{j∈u} k(x_j, y_j)``. Its embedding into
``L²(μ^ℕ)`` is compact exactly when the criterion values
``γ_u ‖S‖^{2|u|}`` tend to zero along an enumeration of ``{u : γ_u > 0}``.

For product weights ``γ_u = ∏_{j∈u} γ_j`` the criterion becomes
``∏_{j∈u} c_j`` with ``c_j = γ_j ‖S‖²``, and the condition reduces to
``c_j -> 0``: singletons give necessity, and for sufficiency at most finitely
many ``c_j`` exceed one, so every ``u`` with criterion ``≥ δ`` lies inside the
finite set ``{j : c_j ≥ δ / P}`` where ``P`` is the product of those
``c_j ≥ 1``.

Enumerations are canonical: value descending, then ``|u|`` ascending, then
``u`` lexicographically (then the eigen multi-index for tensor spectra).
"""
from __future__ import annotations

import csv
import heapq
import io
import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import AnnotationConflict, InvalidArgument, NotEnumerable, Refused, ResourceLimit
from .expr import Expression
from .kernel import SubsetU, ku_eval, subset
from .operator import EmbeddingModel, spectrum
from .seqspace import LIMIT_ABS_TOL, Finding, Verdict

PROBE_HORIZON = 1000
MAX_SEEDS = 100_000


@dataclass(frozen=True)
class ExplicitWeights:
    """Finitely many positive weights; every unlisted subset has weight 0."""

    entries: tuple[tuple[SubsetU, float], ...]

    def __post_init__(self):
        norm = []
        for u, g in self.entries:
            u = subset(u)
            g = float(g)
            if not (g > 0 and math.isfinite(g)):
                raise InvalidArgument(f"explicit weight for {u} must be positive and finite, got {g!r}")
            norm.append((u, g))
        if len({u for u, _ in norm}) != len(norm):
            raise InvalidArgument("explicit weights list a subset twice")
        object.__setattr__(self, "entries", tuple(norm))

    def weight(self, u: SubsetU) -> float:
        for v, g in self.entries:
            if v == tuple(u):
                return g
        return 0.0

    def describe(self) -> dict:
        return {"explicit": [[list(u), g] for u, g in self.entries]}


@dataclass(frozen=True)
class ProductWeights:
    """``γ_u = ∏_{j∈u} γ_j`` with ``γ_∅ = 1``.

    Annotations (all optional):

    * ``gamma_limit``: declared ``lim γ_j``.
    * ``gamma_summable``: declared convergence of ``Σ γ_j``; needs a
      ``justifications["gamma_summable"]`` entry to certify anything.
    * ``nonincreasing_from``: ``γ_j`` is nonincreasing for ``j`` at least this;
      required for enumeration.
    * ``large_indices``: the complete, finite set of ``j`` whose factor is
      ``≥ 1`` (``γ_j ‖S‖²`` for criteria, ``γ_j λ_1`` for spectra).
    * ``tail_sum``: ``J ↦`` an upper bound for ``Σ_{j>J} γ_j``.
    """

    gamma: Callable
    gamma_limit: float | None = None
    gamma_summable: bool | None = None
    nonincreasing_from: int | None = None
    large_indices: frozenset[int] | None = None
    tail_sum: Callable[[int], float] | None = field(default=None, repr=False)
    justifications: dict = field(default_factory=dict)
    name: str = "custom"

    def __post_init__(self):
        if self.large_indices is not None:
            object.__setattr__(self, "large_indices", frozenset(subset(sorted(self.large_indices))))
        if self.nonincreasing_from is not None and self.nonincreasing_from < 1:
            raise InvalidArgument("nonincreasing_from must be >= 1")

    def gamma_at(self, j: int) -> float:
        g = float(self.gamma(j))
        if not (g >= 0 and math.isfinite(g)):
            raise InvalidArgument(f"gamma_{j} = {g!r} is not a finite nonnegative number")
        return g

    def gammas(self, horizon: int) -> np.ndarray:
        j = np.arange(1, horizon + 1)
        try:
            g = np.broadcast_to(np.asarray(self.gamma(j), dtype=float), j.shape).copy()
        except (TypeError, ValueError):
            g = np.array([float(self.gamma(int(x))) for x in j])
        bad = ~(g >= 0) | ~np.isfinite(g)
        if np.any(bad):
            idx = int(j[np.argmax(bad)])
            raise InvalidArgument(f"gamma_{idx} is not a finite nonnegative number")
        return g

    def weight(self, u: SubsetU) -> float:
        return math.prod(self.gamma_at(j) for j in u)

    def summable_justified(self) -> bool:
        return self.gamma_summable is not None and bool(self.justifications.get("gamma_summable"))

    def describe(self) -> dict:
        ann = {}
        for name in ("gamma_limit", "gamma_summable", "nonincreasing_from"):
            if getattr(self, name) is not None:
                ann[name] = getattr(self, name)
        if self.large_indices is not None:
            ann["large_indices"] = sorted(self.large_indices)
        if self.justifications:
            ann["justifications"] = {k: self.justifications[k] for k in sorted(self.justifications)}
        return {"product": {"rule": self.name, "annotations": ann}}


WeightSchema = ExplicitWeights | ProductWeights


def product_rule(rule: str, annotations: dict | None = None, q: float | None = None) -> ProductWeights:
    """Built-in product weights, pre-annotated; ``custom`` reads ``annotations["expr"]``.

    Rules: ``pow2`` (``2^-j``), ``inverse_square`` (``1/j²``), ``geometric``
    (``q^j``, ``0 < q < 1``), ``harmonic`` (``1/j``), ``ones`` (``1``).
    """
    annotations = dict(annotations or {})
    if rule == "pow2":
        base = dict(
            gamma=Expression("2.0**(-j)", "j"),
            gamma_limit=0.0,
            gamma_summable=True,
            nonincreasing_from=1,
            tail_sum=lambda J: 2.0**-J,
            justifications={"gamma_summable": "geometric series with ratio 1/2"},
        )
    elif rule == "inverse_square":
        base = dict(
            gamma=Expression("1/j**2", "j"),
            gamma_limit=0.0,
            gamma_summable=True,
            nonincreasing_from=1,
            tail_sum=lambda J: 1.0 / J if J >= 1 else math.pi**2 / 6,
            justifications={"gamma_summable": "p-series with p = 2"},
        )
    elif rule == "geometric":
        if q is None or not 0 < q < 1:
            raise InvalidArgument(f"geometric rule needs 0 < q < 1, got {q!r}")
        base = dict(
            gamma=Expression(f"{float(q)!r}**j", "j"),
            gamma_limit=0.0,
            gamma_summable=True,
            nonincreasing_from=1,
            tail_sum=lambda J: q ** (J + 1) / (1 - q),
            justifications={"gamma_summable": f"geometric series with ratio {q!r}"},
        )
    elif rule == "harmonic":
        base = dict(
            gamma=Expression("1/j", "j"),
            gamma_limit=0.0,
            gamma_summable=False,
            nonincreasing_from=1,
            justifications={"gamma_summable": "harmonic series diverges"},
        )
    elif rule == "ones":
        base = dict(
            gamma=Expression("1 + 0*j", "j"),
            gamma_limit=1.0,
            gamma_summable=False,
            nonincreasing_from=1,
            justifications={"gamma_summable": "constant nonzero terms"},
        )
    elif rule == "custom":
        if "expr" not in annotations:
            raise InvalidArgument("custom product rule needs an 'expr' in j")
        base = dict(gamma=Expression(annotations.pop("expr"), "j"))
    else:
        raise InvalidArgument(f"unknown product rule {rule!r}")
    just = dict(base.pop("justifications", {}))
    just.update(annotations.pop("justifications", {}) or {})
    for key in annotations:
        if key not in ("gamma_limit", "gamma_summable", "nonincreasing_from", "large_indices"):
            raise InvalidArgument(f"unknown weight annotation {key!r}")
    base.update(annotations)
    if base.get("large_indices") is not None:
        base["large_indices"] = frozenset(base["large_indices"])
    label = rule if rule != "geometric" else f"geometric({q!r})"
    return ProductWeights(justifications=just, name=label, **base)


def weight_of(schema: WeightSchema, u: SubsetU) -> float:
    return schema.weight(tuple(u))


@dataclass(frozen=True, eq=False)
class IvarModel:
    """Univariate model plus weights.

    ``norm`` overrides the computed ``‖S‖``; otherwise ``‖S‖²`` is the top
    eigenvalue of the univariate ``S S*`` section and is kept unrounded.
    """

    univariate: EmbeddingModel
    schema: WeightSchema
    norm: float | None = None
    norm_sq: float = field(init=False)
    norm_level: int | None = field(init=False, default=None)

    def __post_init__(self):
        if not self.univariate.measure.is_probability:
            raise InvalidArgument("the univariate measure must be a probability measure")
        if self.univariate.kernel.name == "constant_plus":
            raise InvalidArgument(
                "constant_plus kernels contain nonzero constants; the empty subset already carries constants"
            )
        if self.norm is None:
            lam = max(spectrum(self.univariate, 1).raw_eigenvalues[0], 0.0)
            object.__setattr__(self, "norm_sq", lam)
            object.__setattr__(self, "norm", math.sqrt(lam))
            object.__setattr__(self, "norm_level", len(self.univariate))
        elif not (self.norm >= 0 and math.isfinite(self.norm)):
            raise InvalidArgument("declared operator norm must be finite and >= 0")
        else:
            object.__setattr__(self, "norm_sq", float(self.norm) ** 2)

    @property
    def C(self) -> float:
        return self.norm

    def norm_note(self) -> str:
        if self.norm_level is None:
            return f"conditional on declared ||S|| = {self.norm!r}"
        return f"conditional on ||S||^2 = {self.norm_sq!r} estimated at {self.norm_level} atoms"


def criterion_value(m: IvarModel, u: SubsetU) -> float:
    """``γ_u ‖S‖^{2|u|}``."""
    return weight_of(m.schema, u) * m.norm_sq ** len(u)


def component_embedding_norm(m: IvarModel, u: SubsetU) -> float:
    """Norm of ``H_u -> L²`` when ``H_u`` carries the norm induced by ``H_γ``."""
    return math.sqrt(weight_of(m.schema, u)) * m.C ** len(u)


def check_product_annotations(schema: ProductWeights, horizon: int = PROBE_HORIZON) -> np.ndarray:
    """Probe ``γ_1..γ_horizon`` against the declared annotations; returns the probe."""
    g = schema.gammas(horizon)
    lim = schema.gamma_limit
    if lim is not None:
        if not (math.isfinite(lim) and lim >= 0):
            raise AnnotationConflict(f"gamma_limit must be finite and >= 0, got {lim!r}")
        d0, dh = abs(g[0] - lim), abs(g[-1] - lim)
        if dh > max(0.5 * d0, LIMIT_ABS_TOL * max(1.0, lim)):
            raise AnnotationConflict(
                f"gamma_limit={lim!r} contradicted at j={horizon}: deviation {dh:.3g} vs initial {d0:.3g}",
                index=horizon,
            )
        if lim > 0 and schema.gamma_summable is True:
            raise AnnotationConflict("gamma cannot be summable with a positive limit")
    j0 = schema.nonincreasing_from
    if j0 is not None and j0 < horizon:
        tail = g[j0 - 1 :]
        up = np.nonzero(tail[1:] > tail[:-1])[0]
        if up.size:
            idx = j0 + int(up[0]) + 1
            raise AnnotationConflict(f"gamma increases at j={idx} despite nonincreasing_from={j0}", index=idx)
    return g


class CriterionStatus(str, Enum):
    COMPACT = "CompactCertified"
    NON_COMPACT = "NonCompactCertified"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class CriterionVerdict:
    verdict: CriterionStatus
    justification: str
    witness: dict | None = None
    evidence: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.verdict is not CriterionStatus.INCONCLUSIVE

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict.value, "certified": self.certified, "justification": self.justification}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.evidence:
            out["evidence"] = self.evidence
        return out


def _probe_table(values: np.ndarray) -> dict:
    out = {}
    j = 1
    while j <= len(values):
        out[str(j)] = float(values[j - 1])
        j *= 2
    return out


def thm2_verdict(m: IvarModel, horizon: int = PROBE_HORIZON) -> CriterionVerdict:
    schema = m.schema
    if isinstance(schema, ExplicitWeights):
        return CriterionVerdict(
            CriterionStatus.COMPACT,
            "finitely many subsets carry positive weight, so the criterion sequence is eventually 0",
            evidence={"support_size": len(schema.entries)},
        )
    g = check_product_annotations(schema, horizon)
    c2 = m.norm_sq
    table = {"c_j": _probe_table(g * c2)}
    note = m.norm_note()
    if c2 == 0.0:
        return CriterionVerdict(
            CriterionStatus.COMPACT,
            f"||S|| = 0 makes every criterion value with u nonempty vanish; {note}",
            evidence=table,
        )
    lim = schema.gamma_limit
    if lim == 0:
        return CriterionVerdict(
            CriterionStatus.COMPACT,
            "c_j = gamma_j ||S||^2 -> 0 (declared gamma_limit = 0, probe-consistent). "
            "Only finitely many c_j >= 1; with P their product, every u whose criterion is >= delta "
            "lies in the finite set {j : c_j >= delta / max(1, P)}, so the criterion sequence tends to 0 "
            f"along any enumeration. Requires only 0 < ||S|| < inf; {note}",
            evidence=table,
        )
    if lim is not None:
        limit_c = lim * c2
        first = [float(x) for x in g[:5] * c2]
        return CriterionVerdict(
            CriterionStatus.NON_COMPACT,
            f"singleton criterion values c_j -> {limit_c!r} > 0 (declared gamma_limit = {lim!r}), "
            f"so limsup of the criterion sequence is positive; {note}",
            witness={"family": "singletons {j}", "limit": limit_c, "first_values": first},
            evidence=table,
        )
    return CriterionVerdict(
        CriterionStatus.INCONCLUSIVE,
        "no gamma_limit annotation; probed decay table attached",
        evidence=table,
    )


# ---------------------------------------------------------------- enumeration


@dataclass(frozen=True)
class Term:
    """One enumerated item: a subset, eigen indices per coordinate, and its value."""

    subset: SubsetU
    value: float
    eigen_indices: tuple[int, ...] = ()

    def subset_label(self) -> str:
        return "{" + ",".join(map(str, self.subset)) + "}"


class _CoordinateStream:
    """Coordinates outside the large set in order of decreasing ``γ_j``, ties by ``j``.

    Zero weights end the stream: the order is nonincreasing, so every later
    weight is zero too.
    """

    def __init__(self, schema: ProductWeights, exclude: frozenset[int]):
        j0 = schema.nonincreasing_from
        head = [j for j in range(1, j0) if j not in exclude]
        head.sort(key=lambda j: (-schema.gamma_at(j), j))
        tail = (j for j in itertools.count(j0) if j not in exclude)
        self._gamma = schema.gamma_at
        self._it = heapq.merge(head, tail, key=lambda j: (-schema.gamma_at(j), j))
        self._items: list[int] = []
        self._done = False

    def get(self, rank: int) -> int | None:
        """Coordinate at 1-based ``rank``, or ``None`` past the end."""
        while len(self._items) < rank and not self._done:
            j = next(self._it)
            if self._gamma(j) == 0.0:
                self._done = True
            else:
                self._items.append(j)
        return self._items[rank - 1] if rank <= len(self._items) else None


def _large_set(schema: ProductWeights, top_factor: float) -> frozenset[int]:
    """Validated set of coordinates with ``γ_j * top_factor >= 1``."""
    if schema.nonincreasing_from is None:
        raise NotEnumerable("product weights need a nonincreasing_from annotation to be enumerated")
    j0 = schema.nonincreasing_from
    head_large = {j for j in range(1, j0) if schema.gamma_at(j) * top_factor >= 1}
    declared = schema.large_indices
    if declared is None:
        if head_large or schema.gamma_at(j0) * top_factor >= 1:
            raise NotEnumerable(
                "some factor gamma_j * scale is >= 1; declare the finite set of such j as large_indices"
            )
        return frozenset()
    for j in sorted(declared):
        if schema.gamma_at(j) * top_factor < 1:
            raise AnnotationConflict(f"declared large index {j} has factor < 1", index=j)
    missing = head_large - declared
    if missing:
        j = min(missing)
        raise AnnotationConflict(f"index {j} has factor >= 1 but is not declared large", index=j)
    first_tail = next(j for j in itertools.count(j0) if j not in declared)
    if schema.gamma_at(first_tail) * top_factor >= 1:
        raise AnnotationConflict(
            f"index {first_tail} has factor >= 1 but is not declared large", index=first_tail
        )
    return declared


def _product_terms(
    schema: ProductWeights,
    eigs: Sequence[float],
    value_fn: Callable[[SubsetU, tuple[int, ...]], float],
) -> Iterator[Term]:
    r = len(eigs)
    large = sorted(_large_set(schema, eigs[0]))
    n_seeds = (r + 1) ** len(large)
    if n_seeds > MAX_SEEDS:
        raise ResourceLimit(f"{len(large)} large coordinates with {r} eigenvalues give {n_seeds} seeds")
    coords = _CoordinateStream(schema, frozenset(large))

    heap = []

    def push(head: tuple, tail: tuple) -> None:
        pairs = sorted(head + tuple((coords.get(rank), a) for rank, a in tail))
        u = tuple(j for j, _ in pairs)
        a = tuple(a for _, a in pairs)
        v = value_fn(u, a)
        heapq.heappush(heap, ((-v, len(u), u, a), head, tail))

    for choice in itertools.product(range(r + 1), repeat=len(large)):
        push(tuple((j, a) for j, a in zip(large, choice) if a > 0), ())

    while heap:
        (neg_v, _, u, a), head, tail = heapq.heappop(heap)
        yield Term(u, -neg_v, a)
        if not tail:
            if coords.get(1) is not None:
                push(head, ((1, 1),))
            continue
        rank, idx = tail[-1]
        if idx < r:
            push(head, tail[:-1] + ((rank, idx + 1),))
        if coords.get(rank + 1) is not None:
            push(head, tail + ((rank + 1, 1),))
            if idx == 1:
                push(head, tail[:-1] + ((rank + 1, 1),))


def _explicit_terms(
    schema: ExplicitWeights,
    eigs: Sequence[float],
    value_fn: Callable[[SubsetU, tuple[int, ...]], float],
) -> Iterator[Term]:
    r = len(eigs)
    heap = []

    def push(u, a):
        heapq.heappush(heap, (-value_fn(u, a), len(u), u, a))

    for u, _ in schema.entries:
        push(u, (1,) * len(u))
    while heap:
        neg_v, _, u, a = heapq.heappop(heap)
        yield Term(u, -neg_v, a)
        last = max((q for q, x in enumerate(a) if x > 1), default=0)
        for q in range(last, len(a)):
            if a[q] < r:
                push(u, a[:q] + (a[q] + 1,) + a[q + 1 :])


def iter_by_criterion(m: IvarModel) -> Iterator[Term]:
    """All subsets with positive weight, in canonical criterion order."""
    schema = m.schema
    if isinstance(schema, ExplicitWeights):
        items = sorted(schema.entries, key=lambda e: (-criterion_value(m, e[0]), len(e[0]), e[0]))
        for u, _ in items:
            yield Term(u, criterion_value(m, u))
        return
    c2 = m.norm_sq
    if c2 == 0.0:
        yield Term((), 1.0)
        return
    check_product_annotations(schema)
    for t in _product_terms(schema, (c2,), lambda u, a: criterion_value(m, u)):
        yield Term(t.subset, t.value)


def enumerate_by_criterion(m: IvarModel, n: int) -> list[Term]:
    if n < 0:
        raise InvalidArgument("n must be >= 0")
    return list(itertools.islice(iter_by_criterion(m), n))


def _validate_eigs(eigs: Sequence[float]) -> tuple[float, ...]:
    eigs = tuple(float(x) for x in eigs)
    if not eigs:
        raise InvalidArgument("need at least one univariate eigenvalue")
    if any(not (x > 0 and math.isfinite(x)) for x in eigs):
        raise InvalidArgument("univariate eigenvalues must be positive and finite")
    if any(a < b for a, b in zip(eigs, eigs[1:])):
        raise InvalidArgument("univariate eigenvalues must be descending")
    return eigs


def iter_tensor_spectrum(m: IvarModel, univariate_eigs: Sequence[float], assume_l2_orthogonal: bool = False) -> Iterator[Term]:
    """Products ``γ_u ∏_{j∈u} λ_{a_j}`` in descending canonical order.

    These are the eigenvalues of ``S_γ* S_γ`` only if the component spaces
    ``H_u`` are mutually orthogonal in ``L²``, which the caller must assert.
    """
    if not assume_l2_orthogonal:
        raise Refused("tensor spectra need assume_l2_orthogonal=True (L2-orthogonality of the H_u)")
    eigs = _validate_eigs(univariate_eigs)
    schema = m.schema

    def value(u, a):
        return weight_of(schema, u) * math.prod(eigs[i - 1] for i in a)

    if isinstance(schema, ExplicitWeights):
        return _explicit_terms(schema, eigs, value)
    check_product_annotations(schema)
    return _product_terms(schema, eigs, value)


def tensor_spectrum_topn(
    m: IvarModel,
    univariate_eigs: Sequence[float],
    n: int,
    assume_l2_orthogonal: bool = False,
) -> list[float]:
    """Top ``n`` tensor eigenvalues (fewer if the support is finite and exhausted)."""
    terms = iter_tensor_spectrum(m, univariate_eigs, assume_l2_orthogonal)
    return [t.value for t in itertools.islice(terms, n)]


def terms_to_csv(terms: Sequence[Term], with_indices: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rank", "subset", "eigen_indices", "value"] if with_indices else ["rank", "subset", "value"])
    for rank, t in enumerate(terms, 1):
        row = [rank, t.subset_label()]
        if with_indices:
            row.append("(" + ",".join(map(str, t.eigen_indices)) + ")")
        row.append(format(t.value, ".17g"))
        w.writerow(row)
    return buf.getvalue()


# ------------------------------------------------------ kernel and norms


@dataclass(frozen=True)
class KGammaValue:
    value: float
    tail_bound: float | None

    @property
    def tail_available(self) -> bool:
        return self.tail_bound is not None

    def to_dict(self) -> dict:
        return {"value": self.value, "tail_bound": self.tail_bound, "tail_available": self.tail_available}


def kgamma_eval(m: IvarModel, x: Sequence, y: Sequence, J: int) -> KGammaValue:
    """``K_γ(x, y)`` over coordinates ``1..J`` with a bound on the neglected tail.

    Product weights resum ``Σ_{u⊆{1..J}} γ_u k_u(x, y)`` to
    ``∏_{j≤J} (1 + γ_j k(x_j, y_j))``. The tail bound
    ``|value| (exp(B Σ_{j>J} γ_j) - 1)`` uses the kernel's diagonal bound ``B``
    and the schema's declared tail sum; without either it is ``None``.
    Explicit weights sum their listed subsets exactly.
    """
    k = m.univariate.kernel
    schema = m.schema
    if isinstance(schema, ExplicitWeights):
        return KGammaValue(math.fsum(g * ku_eval(k, u, x, y) for u, g in schema.entries), 0.0)
    if J < 0:
        raise InvalidArgument("truncation J must be >= 0")
    if len(x) < J or len(y) < J:
        raise InvalidArgument(f"x and y must provide coordinates 1..{J}")
    for p in itertools.chain(x[:J], y[:J]):
        k.check_point(p)
    value = math.prod(1.0 + schema.gamma_at(j) * k(x[j - 1], y[j - 1]) for j in range(1, J + 1))
    tail = None
    if schema.tail_sum is not None and k.diag_bound is not None:
        tail = abs(value) * math.expm1(k.diag_bound * schema.tail_sum(J))
    return KGammaValue(value, tail)


@dataclass(frozen=True)
class DeclaredSequence:
    """A point sequence known through a finite prefix plus declared diagonal bounds.

    ``diag_majorant`` bounds ``k(x_j, x_j)`` from above for every ``j``,
    ``diag_minorant`` from below.
    """

    prefix: tuple = ()
    diag_majorant: float | None = None
    diag_minorant: float | None = None


def x_membership(m: IvarModel, x: DeclaredSequence) -> Finding:
    """Is ``Σ_u γ_u k_u(x, x)`` finite, i.e. does ``x`` lie in the domain of ``K_γ``?"""
    schema = m.schema
    k = m.univariate.kernel
    if isinstance(schema, ExplicitWeights):
        return Finding(Verdict.YES, "finitely many weighted subsets: the defining sum is finite")
    for p in x.prefix:
        k.check_point(p)
    diag = [k(p, p) for p in x.prefix]
    tol = 1e-12
    if x.diag_majorant is not None and any(d > x.diag_majorant + tol for d in diag):
        j = next(i for i, d in enumerate(diag, 1) if d > x.diag_majorant + tol)
        raise AnnotationConflict(f"k(x_{j}, x_{j}) exceeds the declared majorant", index=j)
    if x.diag_minorant is not None and any(d < x.diag_minorant - tol for d in diag):
        j = next(i for i, d in enumerate(diag, 1) if d < x.diag_minorant - tol)
        raise AnnotationConflict(f"k(x_{j}, x_{j}) is below the declared minorant", index=j)

    majorant, source = x.diag_majorant, "declared"
    if majorant is None and k.diag_bound is not None:
        majorant, source = k.diag_bound, f"kernel {k.name!r} diagonal bound on its domain"
    ev = {"prefix_diagonal": diag}
    # the product over (1 + γ_j k(x_j, x_j)) is finite iff Σ γ_j k(x_j, x_j) is
    if majorant == 0:
        return Finding(Verdict.YES, f"k(x_j, x_j) = 0 for all j ({source}); every u != {{}} contributes 0", ev)
    if majorant is not None and schema.gamma_summable is True and schema.summable_justified():
        return Finding(
            Verdict.YES,
            f"sum_j gamma_j k(x_j,x_j) <= {majorant!r} * sum_j gamma_j < inf "
            f"({source}; {schema.justifications['gamma_summable']})",
            ev,
        )
    lower = x.diag_minorant
    if lower is not None and lower > 0 and schema.gamma_summable is False and schema.summable_justified():
        return Finding(
            Verdict.NO,
            f"sum_j gamma_j k(x_j,x_j) >= {lower!r} * sum_j gamma_j = inf "
            f"({schema.justifications['gamma_summable']})",
            ev,
        )
    return Finding(Verdict.INCONCLUSIVE, "no diagonal bound and summability annotation combination decides membership", ev)


def hgamma_norm_sq(m: IvarModel, components: Sequence[tuple[SubsetU, float]]) -> float:
    """``‖f‖²_{H_γ} = Σ_u ‖f_u‖²_{H_u} / γ_u`` from per-component norms."""
    seen = set()
    total = []
    for u, norm_u in components:
        u = subset(u)
        if u in seen:
            raise InvalidArgument(f"component {u} listed twice")
        seen.add(u)
        g = weight_of(m.schema, u)
        if g == 0:
            raise InvalidArgument(f"gamma_{u} = 0: a nonzero component there is not in H_gamma")
        total.append(float(norm_u) ** 2 / g)
    return math.fsum(total)
