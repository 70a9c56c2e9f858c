import numpy as np
import pytest

from chm.circuits import Circuit, EncoderGate, Layer, RotationGate
from chm.paulis import PauliString


@pytest.fixture(scope="session")
def analytic_circuit():
    """1-qubit Rx(x) encoder + Ry(theta0), O = Z; f = cos(theta0) cos(x)."""
    return Circuit(
        n=1,
        layers=(
            Layer(
                (EncoderGate("X", 0),),
                (RotationGate(PauliString.single(1, 0, "Y"), 0),),
            ),
        ),
        m=1,
        observable=((1.0, PauliString.single(1, 0, "Z")),),
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
