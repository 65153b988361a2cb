import numpy as np
import pytest

from scgframes.core import GOperatorFamily


def identity_family(n=2):
    return GOperatorFamily.from_blocks([[np.eye(n)]])


def single_block(matrix, weight=1.0):
    return GOperatorFamily.from_blocks([[np.asarray(matrix, dtype=complex)]], weights=[weight])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
