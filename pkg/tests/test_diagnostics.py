import math

import numpy as np
import pytest

from kernel_embed.diagnostics import (
    Evidence,
    RefinementLadder,
    compactness_evidence,
    spectral_equivalence_check,
    weak_null_decay_check,
)
from kernel_embed.errors import InvalidArgument
from kernel_embed.expr import Expression
from kernel_embed.kernel import make_kernel
from kernel_embed.measure import atomic_measure, uniform_grid_measure
from kernel_embed.operator import EmbeddingModel
from kernel_embed.seqspace import equal_pair, finite_model, paper_example

MIN = make_kernel("min")


def min_ladder(levels=(256, 512, 1024)):
    return RefinementLadder(lambda m: EmbeddingModel(MIN, uniform_grid_measure(0, 1, m)), levels)


def seq_ladder(pair, levels):
    return RefinementLadder(lambda n: finite_model(pair, n), levels)


def test_equivalence_nu_equals_mu():
    i = np.arange(1, 11)
    k = make_kernel("diagonal_sequence", nu=Expression("1/i**2"))
    mu = atomic_measure(list(range(1, 11)), 1 / i**2)
    assert spectral_equivalence_check(k, mu) <= 1e-15


def test_equivalence_single_atom():
    for k in (MIN, make_kernel("gaussian", sigma=0.4)):
        assert spectral_equivalence_check(k, atomic_measure([0.3], [0.8])) <= 1e-15


def test_equivalence_random(rng):
    kernels = [MIN, make_kernel("gaussian", sigma=0.2), make_kernel("constant_plus", base=MIN)]
    for seed in range(30):
        n = int(rng.integers(2, 51))
        pts = rng.uniform(0, 1, n)
        w = rng.uniform(1e-3, 1, n)
        k = kernels[seed % 3]
        assert spectral_equivalence_check(k, atomic_measure(list(pts), w)) <= 1e-8


def test_equivalence_atom_cap():
    with pytest.raises(InvalidArgument):
        spectral_equivalence_check(MIN, uniform_grid_measure(0, 1, 201))


def test_weak_null_zero_family():
    table = weak_null_decay_check(min_ladder((16, 32, 64)), lambda n: (lambda t: np.zeros_like(t)), [1, 2, 3])
    assert all(v == 0 for row in table.values for v in row)


def test_weak_null_min_kernel_sections():
    # normalized kernel sections k(., 1/n) / sqrt(1/n) have unit H-norm
    fam = lambda n: (lambda t: np.minimum(t, 1 / n) * math.sqrt(n))
    # n = 1 and n = 2 give the same value to rounding, so start at 2
    ns = [2, 3, 4, 8, 16, 32]
    table = weak_null_decay_check(min_ladder((256, 512, 1024)), fam, ns)
    assert all(table.decreasing)
    # direct oracle: ∫ (∫ min(s,t) f(t) dt)² ds on the finest grid
    m = EmbeddingModel(MIN, uniform_grid_measure(0, 1, 1024))
    t = m.measure.points()
    f = fam(4)(t)
    tf = np.array([np.sum(np.minimum(s, t) * f) / 1024 for s in t])
    assert table.values[-1][2] == pytest.approx(np.sum(tf**2) / 1024, rel=1e-10)


def test_weak_null_log_pair_unit_vectors():
    pair = paper_example()
    fam = lambda n: (lambda i: (np.asarray(i) == n).astype(float) / math.sqrt(pair.nu(n)))
    ns = [1, 2, 5, 10, 50]
    table = weak_null_decay_check(seq_ladder(pair, (64, 128, 256)), fam, ns)
    expected = [(pair.mu(n) / pair.nu(n)) ** 3 for n in ns]
    np.testing.assert_allclose(table.values[-1], expected, rtol=1e-12)
    assert all(table.decreasing)


def test_evidence_min_kernel_compact():
    ev = compactness_evidence(min_ladder(), 10)
    assert ev.verdict is Evidence.COMPACT
    assert ev.stabilized_sigmas[0] ** 2 == pytest.approx(0.405, abs=1e-3)
    # continuum oracle: σ_1² = 4/π²
    assert ev.stabilized_sigmas[0] ** 2 == pytest.approx(4 / math.pi**2, rel=1e-5)
    assert ev.to_dict()["certified"] is False


def test_evidence_equal_pair_noncompact():
    ev = compactness_evidence(seq_ladder(equal_pair(Expression("1/i**2")), (64, 128, 256)), 10)
    assert ev.verdict is Evidence.NON_COMPACT


def test_evidence_log_pair_hs_note():
    # 1/log(i+1) decays too slowly to pass the 0.1 decay rule at desk scale,
    # so the honest answer is Inconclusive; the trace note still shows growth.
    ev = compactness_evidence(seq_ladder(paper_example(), (256, 512, 1024)), 10)
    assert ev.verdict in (Evidence.COMPACT, Evidence.INCONCLUSIVE)
    assert ev.verdict is Evidence.INCONCLUSIVE
    assert any("partial sums growing" in n for n in ev.notes)


def test_evidence_deterministic():
    a = compactness_evidence(min_ladder((64, 128, 256)), 5)
    b = compactness_evidence(min_ladder((64, 128, 256)), 5)
    assert a == b


def test_diagonal_sigmas_are_sorted_sqrt_ratios():
    pair = paper_example()
    ev = compactness_evidence(seq_ladder(pair, (32, 64, 128)), 8)
    for level, row in zip(ev.levels, ev.sigma_table):
        expected = np.sort(np.sqrt(pair.ratios(level)))[::-1][:8]
        np.testing.assert_allclose(row, expected, rtol=1e-12, atol=0)


def test_evidence_preconditions():
    with pytest.raises(InvalidArgument):
        compactness_evidence(min_ladder((64, 128)), 3)
    with pytest.raises(InvalidArgument):
        compactness_evidence(min_ladder((8, 16, 32)), 9)


def test_ladder_validation():
    with pytest.raises(InvalidArgument):
        RefinementLadder(lambda m: None, (4, 4, 8))
    drift = RefinementLadder(lambda m: EmbeddingModel(MIN, uniform_grid_measure(0, 1 if m < 8 else 0.5, m)), (4, 8, 16))
    with pytest.raises(InvalidArgument, match="mass"):
        drift.models()
    kernels = {4: MIN, 8: make_kernel("min", b=2.0), 16: MIN}
    mixed = RefinementLadder(lambda m: EmbeddingModel(kernels[m], uniform_grid_measure(0, 1, m)), (4, 8, 16))
    with pytest.raises(InvalidArgument, match="kernel"):
        mixed.models()


def test_evidence_csv():
    ev = compactness_evidence(min_ladder((16, 32, 64)), 3)
    lines = ev.to_csv().splitlines()
    assert lines[0] == "level,n,sigma" and len(lines) == 1 + 3 * 3
