import warnings

import pytest

from tamecount import make_group
from tamecount.fideals import LambdaAlgebra


def algebra(factors, weight="disc", modulus=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return LambdaAlgebra(make_group(factors), weight, modulus)


@pytest.fixture
def make_algebra():
    return algebra
