import math

import numpy as np
import pytest

from kernel_embed.errors import InvalidArgument
from kernel_embed.expr import Expression


def test_scalar_and_vector_evaluation():
    e = Expression("log(i+1)/i**2")
    assert e(2) == pytest.approx(math.log(3) / 4)
    np.testing.assert_allclose(e(np.array([1.0, 2.0])), [math.log(2), math.log(3) / 4])


def test_constant_broadcasts():
    assert Expression("1")(5) == 1.0


def test_custom_variable():
    assert Expression("2**(-j)", "j")(3) == 0.125


@pytest.mark.parametrize("src", ["__import__('os')", "i.real", "foo(i)", "x + 1", "'a'", "log(i, 2)", "i +"])
def test_rejects_unsafe_or_invalid(src):
    with pytest.raises(InvalidArgument):
        Expression(src)


def test_str_round_trips_source():
    assert str(Expression("sqrt(i) + pi")) == "sqrt(i) + pi"
