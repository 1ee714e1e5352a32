"""Finite atomic measures.

Every integral against a measure becomes a weighted sum over its atoms.
Continuous measures on an interval enter through a composite midpoint rule;
measures on the natural numbers are given atom by atom.
"""
from __future__ import annotations

import itertools
import math
import numbers
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, ResourceLimit

PROBABILITY_TOL = 1e-12
DEFAULT_TENSOR_CAP = 10**6


@dataclass(frozen=True)
class Domain:
    """Where points live: an interval ``[a, b]`` or the naturals ``{1, 2, ...}``.

    ``dim > 1`` marks a Cartesian power, whose points are ``dim``-tuples.
    """

    kind: str
    a: float | None = None
    b: float | None = None
    dim: int = 1

    def __post_init__(self):
        if self.kind not in ("interval", "naturals"):
            raise InvalidArgument(f"unknown domain kind {self.kind!r}")
        if self.kind == "interval" and not (self.a is not None and self.b is not None and self.a <= self.b):
            raise InvalidArgument("interval domain needs a <= b")

    def contains(self, point) -> bool:
        if self.dim > 1:
            return (
                isinstance(point, tuple)
                and len(point) == self.dim
                and all(self._contains_scalar(p) for p in point)
            )
        return self._contains_scalar(point)

    def _contains_scalar(self, p) -> bool:
        if self.kind == "naturals":
            return _is_natural(p)
        if isinstance(p, bool) or not isinstance(p, numbers.Real):
            return False
        return self.a <= p <= self.b

    def power(self, d: int) -> "Domain":
        return Domain(self.kind, self.a, self.b, self.dim * d)

    def to_dict(self) -> dict:
        if self.kind == "naturals":
            return {"kind": "naturals", "dim": self.dim}
        return {"kind": "interval", "a": self.a, "b": self.b, "dim": self.dim}


NATURALS = Domain("naturals")


def interval(a: float, b: float) -> Domain:
    return Domain("interval", float(a), float(b))


def _is_natural(p) -> bool:
    return isinstance(p, numbers.Integral) and not isinstance(p, bool) and p >= 1


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    atoms: tuple
    weights: np.ndarray
    domain: Domain
    total_mass: float = field(init=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or len(w) != len(self.atoms):
            raise InvalidArgument("atoms and weights must have the same length")
        if len(w) == 0:
            raise InvalidArgument("a measure needs at least one atom")
        if not np.all(np.isfinite(w)):
            raise InvalidArgument("weights must be finite")
        if np.any(w < 0):
            i = int(np.argmax(w < 0))
            raise InvalidArgument(f"negative weight {w[i]!r} at atom {self.atoms[i]!r}")
        if len(set(self.atoms)) != len(self.atoms):
            raise InvalidArgument("atoms must be pairwise distinct")
        for p in self.atoms:
            if not self.domain.contains(p):
                raise InvalidArgument(f"atom {p!r} lies outside domain {self.domain}")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "total_mass", math.fsum(w))

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def is_probability(self) -> bool:
        return abs(self.total_mass - 1.0) <= PROBABILITY_TOL

    def points(self) -> np.ndarray:
        """Atoms as an array (integer dtype on the naturals)."""
        if self.domain.kind == "naturals":
            return np.array(self.atoms, dtype=np.int64)
        return np.array(self.atoms, dtype=float)

    def restrict(self, indices: Sequence[int]) -> "DiscreteMeasure":
        """Sub-measure on the atoms at ``indices``, keeping their weights."""
        idx = list(indices)
        return DiscreteMeasure(
            tuple(self.atoms[i] for i in idx), self.weights[idx], self.domain
        )

    def to_dict(self) -> dict:
        return {
            "atoms": list(self.atoms),
            "weights": [float(x) for x in self.weights],
            "domain": self.domain.to_dict(),
            "total_mass": self.total_mass,
            "is_probability": self.is_probability,
        }


def uniform_grid_measure(a: float, b: float, m: int) -> DiscreteMeasure:
    """Composite midpoint rule for Lebesgue measure on ``[a, b]`` with ``m`` cells."""
    if not isinstance(m, numbers.Integral) or m < 1:
        raise InvalidArgument(f"grid needs m >= 1, got {m!r}")
    if not a < b:
        raise InvalidArgument(f"grid needs a < b, got a={a!r}, b={b!r}")
    h = (b - a) / m
    atoms = tuple(a + (i + 0.5) * h for i in range(m))
    return DiscreteMeasure(atoms, np.full(m, h), interval(a, b))


def atomic_measure(atoms: Sequence, weights: Sequence[float], domain: Domain | None = None) -> DiscreteMeasure:
    """Measure with the given atoms and weights.

    Without an explicit ``domain``, integer atoms are read as naturals and real
    atoms as points of their interval hull. Mixing the two is rejected.
    """
    atoms = tuple(atoms)
    if len(atoms) != len(weights):
        raise InvalidArgument("atoms and weights must have the same length")
    if domain is None:
        domain = _infer_domain(atoms)
    return DiscreteMeasure(atoms, np.asarray(weights, dtype=float), domain)


def _infer_domain(atoms: tuple) -> Domain:
    if not atoms:
        raise InvalidArgument("a measure needs at least one atom")
    ints = [isinstance(p, numbers.Integral) and not isinstance(p, bool) for p in atoms]
    if all(ints):
        if all(p >= 1 for p in atoms):
            return NATURALS
        raise InvalidArgument("integer atoms must be natural indices >= 1")
    if any(ints):
        raise InvalidArgument("atoms mix natural indices and real points")
    if not all(isinstance(p, numbers.Real) and not isinstance(p, bool) for p in atoms):
        raise InvalidArgument("atoms must be real scalars or natural indices")
    return interval(min(atoms), max(atoms))


def tensor_power(m: DiscreteMeasure, d: int, cap: int = DEFAULT_TENSOR_CAP) -> DiscreteMeasure:
    """Product measure ``m ⊗ ... ⊗ m`` (``d`` factors) on ``d``-tuples."""
    if d < 1:
        raise InvalidArgument("tensor power needs d >= 1")
    if m.domain.dim != 1:
        raise InvalidArgument("tensor power of a product measure is not supported")
    size = len(m) ** d
    if size > cap:
        raise ResourceLimit(f"{len(m)}^{d} = {size} atoms exceeds cap {cap}")
    if d == 1:
        return m
    atoms = tuple(itertools.product(m.atoms, repeat=d))
    weights = np.array([math.prod(c) for c in itertools.product(m.weights.tolist(), repeat=d)])
    return DiscreteMeasure(atoms, weights, m.domain.power(d))
