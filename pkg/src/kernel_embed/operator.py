"""Exact finite-matrix realizations of the embedding ``S: H -> L²(μ)``.

For a discrete measure with atoms ``t_i`` and weights ``w_i`` the integral
operator ``f ↦ ∫ k(·, t) f(t) dμ(t)`` becomes ``G W`` on samples, and in the
weighted coordinates ``ĝ_i = √w_i g(t_i)`` the operator ``S S*`` on ``L²(μ)``
is the symmetric matrix ``A = W^½ G W^½``. Singular values of ``S`` are the
square roots of the eigenvalues of ``A``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .errors import InvalidArgument, NumericFailure
from .kernel import PSD_RELATIVE_TOL, Kernel, gram
from .measure import DiscreteMeasure

# dense eigvalsh below this size; Lanczos for a few leading eigenvalues above it
DENSE_LIMIT = 1024


@dataclass(frozen=True, eq=False)
class EmbeddingModel:
    kernel: Kernel
    measure: DiscreteMeasure

    def __post_init__(self):
        if self.measure.domain.dim != 1:
            raise InvalidArgument("embedding models need a univariate measure")
        if self.measure.domain.kind != self.kernel.domain.kind:
            raise InvalidArgument(
                f"measure on {self.measure.domain.kind} but kernel {self.kernel.name!r} "
                f"lives on {self.kernel.domain.kind}"
            )
        for p in self.measure.atoms:
            self.kernel.check_point(p)

    def __len__(self) -> int:
        return len(self.measure)

    @cached_property
    def gram(self) -> np.ndarray:
        g = gram(self.kernel, self.measure.atoms)
        g.flags.writeable = False
        return g

    @cached_property
    def _l2(self) -> np.ndarray:
        sw = np.sqrt(self.measure.weights)
        a = sw[:, None] * self.gram * sw[None, :]
        # exact on the diagonal: w_i k(t_i, t_i)
        np.fill_diagonal(a, self.measure.weights * np.diagonal(self.gram))
        a.flags.writeable = False
        return a

    def submodel(self, indices: Sequence[int]) -> "EmbeddingModel":
        return EmbeddingModel(self.kernel, self.measure.restrict(indices))

    def describe(self) -> dict:
        return {"kernel": self.kernel.describe(), "atoms_count": len(self), "total_mass": self.measure.total_mass}


@dataclass(frozen=True)
class SpectralReport:
    singular_values: tuple[float, ...]
    raw_eigenvalues: tuple[float, ...]
    hs_trace: float
    kernel_l2_sq: float
    atoms_count: int
    truncated_at: int | None = None

    def __post_init__(self):
        s = self.singular_values
        if any(x < 0 for x in s) or any(a < b for a, b in zip(s, s[1:])):
            raise InvalidArgument("singular values must be nonnegative and descending")

    @property
    def operator_norm(self) -> float:
        return self.singular_values[0] if self.singular_values else 0.0

    def to_dict(self) -> dict:
        out = {
            "singular_values": list(self.singular_values),
            "operator_norm": self.operator_norm,
            "hs_trace": self.hs_trace,
            "kernel_l2_sq": self.kernel_l2_sq,
            "atoms_count": self.atoms_count,
            "raw_eigenvalues": list(self.raw_eigenvalues),
        }
        if self.truncated_at is not None:
            out["truncated_at"] = self.truncated_at
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "sigma"])
        for i, s in enumerate(self.singular_values, 1):
            w.writerow([i, format(s, ".17g")])
        return buf.getvalue()


def l2_matrix(m: EmbeddingModel) -> np.ndarray:
    """``A_ij = √w_i k(t_i, t_j) √w_j``: the matrix of ``S S*``."""
    return m._l2


def top_eigenvalues(a: np.ndarray, n: int) -> np.ndarray:
    """The ``n`` largest eigenvalues of a symmetric matrix, descending."""
    size = a.shape[0]
    try:
        if size > DENSE_LIMIT and n <= size // 4:
            vals = eigsh(a, k=n, which="LA", v0=np.ones(size), tol=0, return_eigenvectors=False)
        else:
            vals = np.linalg.eigvalsh(a)
    except (ArpackNoConvergence, np.linalg.LinAlgError) as exc:
        raise NumericFailure(f"eigensolver failed: {exc}") from exc
    return np.sort(vals)[::-1][:n]


def spectrum(m: EmbeddingModel, n: int | None = None) -> SpectralReport:
    """Leading ``n`` singular values of ``S`` plus trace and kernel norm.

    Eigenvalues slightly below zero (within ``1e-8 * ||A||``) are clamped
    for the singular values but kept in ``raw_eigenvalues``.
    """
    size = len(m)
    if n is None:
        n = size
    if not 1 <= n <= size:
        raise InvalidArgument(f"n must be in [1, {size}], got {n}")
    lam = top_eigenvalues(l2_matrix(m), n)
    if not np.all(np.isfinite(lam)):
        raise NumericFailure("eigensolver returned non-finite values")
    scale = float(np.max(np.abs(lam)))
    if lam[-1] < -PSD_RELATIVE_TOL * scale:
        raise NumericFailure(
            f"eigenvalue {lam[-1]:.3e} is negative beyond tolerance; kernel is not PSD on these atoms"
        )
    sigma = np.sqrt(np.maximum(lam, 0.0))
    truncated = size if m.measure.domain.kind == "naturals" else None
    return SpectralReport(
        tuple(float(s) for s in sigma),
        tuple(float(x) for x in lam),
        hs_trace(m),
        kernel_l2_norm_sq(m),
        size,
        truncated,
    )


def hs_trace(m: EmbeddingModel) -> float:
    """``Σ w_i k(t_i, t_i)``; ``S`` is Hilbert–Schmidt iff the continuum version is finite."""
    p = m.measure.points()
    diag = m.kernel.evaluate(p, p)
    return math.fsum(m.measure.weights * diag)


def kernel_l2_norm_sq(m: EmbeddingModel) -> float:
    """``Σ_ij w_i w_j k(t_i, t_j)²``, the squared norm of ``k`` in ``L²(μ⊗μ)``."""
    a = l2_matrix(m)
    return float(np.sum(a * a))


def _samples(m: EmbeddingModel, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (len(m),):
        raise InvalidArgument(f"expected {len(m)} samples, got shape {f.shape}")
    return f


def apply_T(m: EmbeddingModel, f) -> np.ndarray:
    """``(T f)(t_i) = Σ_j w_j k(t_i, t_j) f(t_j)``.

    The same formula realizes ``T_{H,H}``, ``T_{H,L²}`` and ``T_{L²,L²}``;
    they differ only in which norm the caller measures with.
    """
    f = _samples(m, f)
    return m.gram @ (m.measure.weights * f)


def t3_functional(m: EmbeddingModel, f) -> float:
    """``∫ (∫ k(s, t) f(t) dμ(t))² dμ(s)`` on the discrete measure."""
    tf = apply_T(m, f)
    return math.fsum(m.measure.weights * tf * tf)
