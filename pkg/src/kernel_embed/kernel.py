"""Reproducing kernels: a small catalog, Gram matrices and product kernels.

The ``min`` kernel (Brownian motion on ``[0, 1]``) is the default exemplar
for the infinite-variate machinery: its RKHS contains no nonzero constant
function, which that construction requires of the univariate space.
``constant_plus`` wraps a kernel as ``1 + k`` and is rejected there.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidArgument
from .measure import NATURALS, Domain, interval

SYMMETRY_TOL = 1e-12
PSD_RELATIVE_TOL = 1e-8

SubsetU = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Kernel:
    """Symmetric positive-semidefinite kernel with a vectorized evaluator.

    ``evaluator(s, t)`` must broadcast over numpy arrays. ``diag_bound`` is an
    upper bound for ``k(s, s)`` over the whole domain when one is known.
    """

    name: str
    domain: Domain
    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    params: dict = field(default_factory=dict)
    diag_bound: float | None = None

    def __call__(self, s, t) -> float:
        return float(self.evaluator(np.asarray(s), np.asarray(t)))

    def evaluate(self, s, t) -> np.ndarray:
        return np.asarray(self.evaluator(np.asarray(s), np.asarray(t)), dtype=float)

    def check_point(self, p) -> None:
        if not self.domain.contains(p):
            raise InvalidArgument(f"point {p!r} outside domain of kernel {self.name!r}")

    def describe(self) -> dict:
        out = {"name": self.name}
        out["params"] = {k: (v.describe() if isinstance(v, Kernel) else _param_repr(v)) for k, v in self.params.items()}
        return out


def _param_repr(v):
    if isinstance(v, numbers.Real):
        return float(v)
    return str(v)


def _min_kernel(b: float = 1.0) -> Kernel:
    if not b > 0:
        raise InvalidArgument("min kernel needs b > 0")
    return Kernel("min", interval(0.0, b), np.minimum, {"b": b} if b != 1.0 else {}, diag_bound=b)


def _gaussian_kernel(sigma: float, a: float = -math.inf, b: float = math.inf) -> Kernel:
    if not (isinstance(sigma, numbers.Real) and sigma > 0):
        raise InvalidArgument(f"gaussian kernel needs sigma > 0, got {sigma!r}")
    two_s2 = 2.0 * sigma * sigma

    def ev(s, t):
        return np.exp(-((s - t) ** 2) / two_s2)

    return Kernel("gaussian", interval(a, b), ev, {"sigma": sigma}, diag_bound=1.0)


def _diagonal_kernel(nu: Callable) -> Kernel:
    """``k(i, j) = δ_ij / ν_i``: the reproducing kernel of ``ℓ²(ν)``."""
    if not callable(nu):
        raise InvalidArgument("diagonal_sequence needs a callable nu generator")

    def ev(s, t):
        s, t = np.broadcast_arrays(np.asarray(s), np.asarray(t))
        same = s == t
        out = np.zeros(s.shape)
        if np.any(same):
            vals = np.asarray(nu(s[same]), dtype=float)
            if np.any(~(vals > 0)):
                raise InvalidArgument("nu generator must be strictly positive")
            out[same] = 1.0 / vals
        return out

    return Kernel("diagonal_sequence", NATURALS, ev, {"nu": nu})


def _constant_plus(base: Kernel) -> Kernel:
    if not isinstance(base, Kernel):
        raise InvalidArgument("constant_plus wraps another kernel")

    def ev(s, t):
        return 1.0 + base.evaluator(s, t)

    bound = None if base.diag_bound is None else 1.0 + base.diag_bound
    return Kernel("constant_plus", base.domain, ev, {"base": base}, diag_bound=bound)


def _zero_kernel(domain: Domain = interval(0.0, 1.0)) -> Kernel:
    return Kernel("zero", domain, lambda s, t: np.zeros(np.broadcast(s, t).shape), diag_bound=0.0)


_CATALOG = {
    "min": _min_kernel,
    "gaussian": _gaussian_kernel,
    "diagonal_sequence": _diagonal_kernel,
    "constant_plus": _constant_plus,
    "zero": _zero_kernel,
}


def make_kernel(name: str, **params) -> Kernel:
    """Build a catalog kernel.

    ``min`` takes an optional right endpoint ``b``; ``gaussian`` needs
    ``sigma``; ``diagonal_sequence`` needs a generator ``nu``;
    ``constant_plus`` needs ``base``; ``zero`` takes an optional ``domain``.
    """
    try:
        factory = _CATALOG[name]
    except KeyError:
        raise InvalidArgument(f"unknown kernel {name!r}; known: {sorted(_CATALOG)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise InvalidArgument(f"bad parameters for kernel {name!r}: {exc}") from None


def gram(k: Kernel, points: Sequence) -> np.ndarray:
    """Gram matrix ``G[i, j] = k(p_i, p_j)``, exactly symmetric."""
    points = list(points)
    for p in points:
        k.check_point(p)
    if len(set(points)) != len(points):
        raise InvalidArgument("gram points must be pairwise distinct")
    dtype = np.int64 if k.domain.kind == "naturals" else float
    p = np.array(points, dtype=dtype)
    g = k.evaluate(p[:, None], p[None, :])
    # keep one evaluation per unordered pair
    g = np.triu(g)
    g += np.triu(g, 1).T
    return g


def psd_min_eig(g: np.ndarray) -> float:
    """Smallest eigenvalue of a symmetric matrix."""
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise InvalidArgument("expected a square matrix")
    if g.size and np.max(np.abs(g - g.T)) > SYMMETRY_TOL:
        raise InvalidArgument("matrix is not symmetric")
    return float(np.linalg.eigvalsh(g)[0])


def is_psd(g: np.ndarray, min_eig: float | None = None) -> bool:
    """PSD test with tolerance ``-1e-8 * ||G||``."""
    if min_eig is None:
        min_eig = psd_min_eig(g)
    scale = float(np.linalg.norm(g, 2)) if np.size(g) else 0.0
    return min_eig >= -PSD_RELATIVE_TOL * scale


def subset(elements=()) -> SubsetU:
    """Validate and normalize a finite subset of the naturals."""
    out = tuple(int(e) for e in elements)
    for e, raw in zip(out, elements):
        if e != raw or isinstance(raw, bool):
            raise InvalidArgument(f"subset element {raw!r} is not an integer")
    if any(e < 1 for e in out):
        raise InvalidArgument("subset elements must be >= 1")
    if any(a >= b for a, b in zip(out, out[1:])):
        raise InvalidArgument(f"subset {out} is not strictly increasing")
    return out


def ku_eval(k: Kernel, u: SubsetU, x: Sequence, y: Sequence) -> float:
    """``∏_{j∈u} k(x_j, y_j)`` with 1-based coordinates; the empty product is 1."""
    for j in u:
        if j < 1 or j > len(x) or j > len(y):
            raise InvalidArgument(f"coordinate {j} not provided (x has {len(x)}, y has {len(y)})")
    return math.prod(k(x[j - 1], y[j - 1]) for j in u)
