import numpy as np
import pytest

from kernel_embed.kernel import make_kernel
from kernel_embed.measure import atomic_measure
from kernel_embed.operator import EmbeddingModel


def const_diag_model(nu: float) -> EmbeddingModel:
    """Two-atom probability model whose ||S||^2 is exactly 0.5 / nu."""
    k = make_kernel("diagonal_sequence", nu=lambda i: nu + 0 * np.asarray(i, dtype=float))
    return EmbeddingModel(k, atomic_measure([1, 2], [0.5, 0.5]))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
