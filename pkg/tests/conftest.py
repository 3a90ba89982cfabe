import math

import numpy as np
import pytest

from gaplab.instances import InstanceSpec, generate

UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
EQUILATERAL = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def gline_instance(n: int, d: float, p: float = 2):
    return generate(InstanceSpec(n=n, d=d, p=p))
