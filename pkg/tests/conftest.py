import numpy as np
import pytest

from fermiorder.fock_algebra import ModeId


@pytest.fixture
def abstract_modes():
    return [ModeId.named(x) for x in "abcdef"]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
