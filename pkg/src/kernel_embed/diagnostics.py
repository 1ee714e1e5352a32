"""Compactness evidence from sequences of refining finite models.

Any finite model is trivially compact, so nothing here is a certificate.
The verdicts describe how singular values behave as the discretization is
refined and are labeled as evidence accordingly.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidArgument, NumericFailure
from .kernel import Kernel
from .measure import DiscreteMeasure
from .operator import EmbeddingModel, l2_matrix, spectrum, t3_functional

MAX_EQUIVALENCE_ATOMS = 200
MASS_DRIFT_TOL = 1e-9
STABILIZATION_TOL = 1e-3
PLATEAU_RUN = 5
PLATEAU_SPREAD = 1e-3
DECAY_RATIO = 0.1


class Evidence(str, Enum):
    COMPACT = "EvidenceCompact"
    NON_COMPACT = "EvidenceNonCompact"
    INCONCLUSIVE = "Inconclusive"


def _eigvalsh(a: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigensolver failed: {exc}") from exc


def hh_section_eigenvalues(m: EmbeddingModel) -> np.ndarray:
    """Eigenvalues of ``S*S`` restricted to ``span{k(·, t_i)}``, ascending.

    Factor ``G = B Bᵀ``; the columns of ``B`` are the atom samples of an
    H-orthonormal basis, so ``Bᵀ W B`` is the Gram matrix of ``S*S`` there.
    This route never forms ``W^½ G W^½``.
    """
    g_vals, g_vecs = np.linalg.eigh(m.gram)
    b = g_vecs * np.sqrt(np.maximum(g_vals, 0.0))
    hh = b.T @ (m.measure.weights[:, None] * b)
    return _eigvalsh((hh + hh.T) / 2)


def spectral_equivalence_check(k: Kernel, measure: DiscreteMeasure) -> float:
    """Largest gap between the ``T_{H,H}`` and ``T_{L²,L²}`` spectra.

    Both sorted spectra are compared entrywise; gaps are relative to the
    largest eigenvalue.
    """
    if len(measure) > MAX_EQUIVALENCE_ATOMS:
        raise InvalidArgument(f"at most {MAX_EQUIVALENCE_ATOMS} atoms supported")
    m = EmbeddingModel(k, measure)
    l2 = _eigvalsh(l2_matrix(m))
    hh = hh_section_eigenvalues(m)
    scale = max(float(np.max(np.abs(l2))), float(np.max(np.abs(hh))))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(l2 - hh)) / scale)


@dataclass(frozen=True)
class RefinementLadder:
    model_factory: Callable[[int], EmbeddingModel]
    levels: tuple[int, ...]

    def __post_init__(self):
        levels = tuple(int(x) for x in self.levels)
        if not levels or any(a >= b for a, b in zip(levels, levels[1:])):
            raise InvalidArgument(f"levels must be strictly increasing, got {levels}")
        object.__setattr__(self, "levels", levels)

    def models(self) -> list[EmbeddingModel]:
        """Build every level and check the ladder invariants."""
        models = [self.model_factory(level) for level in self.levels]
        first = models[0]
        for level, m in zip(self.levels, models):
            if m.kernel.describe() != first.kernel.describe():
                raise InvalidArgument(f"level {level} uses a different kernel")
        if first.measure.domain.kind == "naturals":
            # truncation ladders: each level extends the previous one
            for prev, cur, level in zip(models, models[1:], self.levels[1:]):
                pw = dict(zip(prev.measure.atoms, prev.measure.weights))
                cw = dict(zip(cur.measure.atoms, cur.measure.weights))
                if any(a not in cw or cw[a] != w for a, w in pw.items()):
                    raise InvalidArgument(f"level {level} does not extend the previous truncation")
        else:
            mass = first.measure.total_mass
            for level, m in zip(self.levels, models):
                if abs(m.measure.total_mass - mass) > MASS_DRIFT_TOL * max(1.0, abs(mass)):
                    raise InvalidArgument(f"level {level} changes the total mass")
        return models


@dataclass(frozen=True)
class DecayTable:
    ns: tuple[int, ...]
    levels: tuple[int, ...]
    values: tuple[tuple[float, ...], ...]  # values[level_index][n_index]

    @property
    def decreasing(self) -> tuple[bool, ...]:
        """Per level: are the values strictly decreasing in n?"""
        return tuple(all(a > b for a, b in zip(row, row[1:])) for row in self.values)

    def to_dict(self) -> dict:
        return {
            "ns": list(self.ns),
            "levels": list(self.levels),
            "values": [list(r) for r in self.values],
            "decreasing": list(self.decreasing),
        }


def weak_null_decay_check(
    ladder: RefinementLadder,
    family: Callable[[int], Callable],
    ns: Sequence[int],
) -> DecayTable:
    """``t3_functional`` values for a declared bounded, pointwise-null family.

    ``family(n)`` returns a function evaluated at the atoms of each level.
    The H-norm bound and pointwise convergence are the caller's declaration;
    neither can be verified from samples.
    """
    ns = tuple(ns)
    rows = []
    for m in ladder.models():
        pts = m.measure.points()
        rows.append(tuple(t3_functional(m, family(n)(pts)) for n in ns))
    return DecayTable(ns, ladder.levels, tuple(rows))


@dataclass(frozen=True)
class CompactnessEvidence:
    levels: tuple[int, ...]
    sigma_table: tuple[tuple[float, ...], ...]  # sigma_table[level_index][j]
    stabilized: tuple[bool, ...]
    hs_traces: tuple[float, ...]
    verdict: Evidence
    notes: tuple[str, ...] = field(default=())

    @property
    def stabilized_sigmas(self) -> tuple[float, ...]:
        return self.sigma_table[-1]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "certified": False,
            "levels": list(self.levels),
            "sigma_table": [list(r) for r in self.sigma_table],
            "stabilized": list(self.stabilized),
            "hs_traces": list(self.hs_traces),
            "notes": list(self.notes),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["level", "n", "sigma"])
        for level, row in zip(self.levels, self.sigma_table):
            for j, s in enumerate(row, 1):
                w.writerow([level, j, format(s, ".17g")])
        return buf.getvalue()


def _rel_diff(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


def compactness_evidence(
    ladder: RefinementLadder,
    n: int,
    stabilization: float = STABILIZATION_TOL,
    plateau_run: int = PLATEAU_RUN,
) -> CompactnessEvidence:
    """Aggregate the leading ``n`` singular values over the ladder into a verdict.

    EvidenceNonCompact: the last ``plateau_run`` reported values at the finest
    level agree to ``1e-3`` relative spread and are nonzero.
    EvidenceCompact: every reported value changed by less than
    ``stabilization`` between the two finest levels and the last one has
    fallen below ``0.1 * σ_1``.
    """
    if len(ladder.levels) < 3:
        raise InvalidArgument("compactness evidence needs at least 3 levels")
    if not 1 <= n <= ladder.levels[0]:
        raise InvalidArgument(f"n must be in [1, {ladder.levels[0]}]")
    table = []
    traces = []
    for m in ladder.models():
        rep = spectrum(m, n)
        table.append(rep.singular_values)
        traces.append(rep.hs_trace)
    prev, last = table[-2], table[-1]
    stable = tuple(_rel_diff(a, b) < stabilization for a, b in zip(prev, last))
    notes = []

    tail = last[-plateau_run:]
    plateau = n >= plateau_run and tail[0] > 0 and (max(tail) - min(tail)) / max(tail) < PLATEAU_SPREAD
    ratio = last[-1] / last[0] if last[0] > 0 else 0.0
    decayed = last[-1] == 0.0 or ratio < DECAY_RATIO
    if plateau:
        verdict = Evidence.NON_COMPACT
        notes.append(f"sigma plateau at {tail[-1]:.6g} over the last {plateau_run} reported indices")
    elif all(stable) and decayed:
        verdict = Evidence.COMPACT
        notes.append(f"all {n} singular values stabilized; sigma_{n}/sigma_1 = {ratio:.3g}")
    else:
        verdict = Evidence.INCONCLUSIVE
        if not all(stable):
            notes.append(f"{stable.count(False)} of {n} singular values not yet stable")
        if not decayed:
            notes.append(f"sigma_{n}/sigma_1 = {ratio:.3g} has not fallen below {DECAY_RATIO}")

    if _rel_diff(traces[-2], traces[-1]) < stabilization:
        notes.append(f"hs_trace bounded across levels (last {traces[-1]:.6g})")
    else:
        notes.append(f"hs_trace partial sums growing (last {traces[-1]:.6g})")
    return CompactnessEvidence(ladder.levels, tuple(table), stable, tuple(traces), verdict, tuple(notes))

