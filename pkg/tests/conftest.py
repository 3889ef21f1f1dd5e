import numpy as np
import pytest

from structlin.structure import ANTI, AUT, EigenspaceSpec

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def jblocks(k):
    return np.kron(np.eye(k), J2)


def type_specs():
    """One eigenspace per type in dimension 3..6, with non-orthogonal maps mixed in."""
    rng = np.random.default_rng(7)
    h = np.eye(4) + 0.3 * rng.standard_normal((4, 4))
    hi = np.linalg.inv(h)
    P6 = np.eye(6) + 0.2 * rng.standard_normal((6, 6))
    return {
        1: EigenspaceSpec.single(np.diag([1, 1, -1, -1, 1.0]), AUT, 1),
        2: EigenspaceSpec.single(h @ np.diag([1, 1, -1, -1.0]) @ hi, AUT, -1),
        3: EigenspaceSpec.single(jblocks(2), AUT, 1),
        4: EigenspaceSpec.single(2.0 * jblocks(3), AUT, -1),
        5: EigenspaceSpec.single(np.diag([1, -1, 1, 1.0]), ANTI, 1),
        6: EigenspaceSpec.single(np.diag([1, 1, -1, 1, 1.0]), ANTI, -1),
        7: EigenspaceSpec.single(jblocks(2), ANTI, 1),
        8: EigenspaceSpec.single(P6.T @ jblocks(3) @ P6, ANTI, -1),
    }


@pytest.fixture(scope="session")
def specs():
    return type_specs()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
