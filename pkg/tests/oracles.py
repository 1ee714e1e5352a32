"""Brute-force references for the enumeration and resummation tests."""
import itertools
import math

import numpy as np

from kernel_embed.ivar import ProductWeights, criterion_value, weight_of
from kernel_embed.kernel import ku_eval


def all_subsets(n):
    for size in range(n + 1):
        yield from itertools.combinations(range(1, n + 1), size)


def brute_criterion(m, universe):
    """Every supported u ⊆ {1..universe}, canonically sorted by criterion value."""
    rows = []
    for u in all_subsets(universe):
        if weight_of(m.schema, u) > 0:
            rows.append((criterion_value(m, u), u))
    rows.sort(key=lambda r: (-r[0], len(r[1]), r[1]))
    return rows


def brute_tensor(m, eigs, universe):
    rows = []
    r = len(eigs)
    for u in all_subsets(universe):
        g = weight_of(m.schema, u)
        if g == 0:
            continue
        for a in itertools.product(range(1, r + 1), repeat=len(u)):
            rows.append((g * math.prod(eigs[i - 1] for i in a), u, a))
    rows.sort(key=lambda t: (-t[0], len(t[1]), t[1], t[2]))
    return rows


def brute_kgamma(m, x, y, J):
    return math.fsum(weight_of(m.schema, u) * ku_eval(m.univariate.kernel, u, x, y) for u in all_subsets(J))


def finite_product(gammas, large=None, name="finite"):
    """Product weights with γ_j = gammas[j-1] and zero beyond; monotone from len+1 on."""
    g = np.asarray(gammas, dtype=float)

    def gamma(j):
        j = np.asarray(j)
        out = np.where(j <= len(g), g[np.clip(j, 1, len(g)) - 1], 0.0)
        return out if out.ndim else float(out)

    return ProductWeights(
        gamma,
        gamma_limit=0.0,
        gamma_summable=True,
        nonincreasing_from=len(g) + 1,
        large_indices=None if not large else frozenset(large),
        tail_sum=lambda J: float(np.sum(g[J:])),
        justifications={"gamma_summable": "finitely many nonzero terms"},
        name=name,
    )


def random_dyadic_gammas(rng, n, top=1.0, allow_large=False):
    """Powers of two, so products are exact and ties are common."""
    exps = rng.integers(0 if allow_large else 1, 7, n)
    g = 2.0 ** -exps.astype(float) * top
    if allow_large:
        g[rng.integers(0, n)] = 2.0
    return g
