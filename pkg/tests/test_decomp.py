import numpy as np
import pytest

from structlin.decomp import (gl_chains, heights_by_class, invariant_blocks, jc_decompose,
                              nil_height)
from structlin.errors import IllConditionedSpectrumError, InvalidBlockError
from structlin.linalg import commutator, norm
from structlin.structure import membership, random_member
from structlin.tables import spec_of, unfolding_rows

J = np.array([[0.0, -1.0], [1.0, 0.0]])


def test_jc_of_jordan_block_with_shift():
    L = np.array([[2.0, 0.0], [1.0, 2.0]])
    jc = jc_decompose(L)
    assert np.allclose(jc.S, 2 * np.eye(2))
    assert np.allclose(jc.N, [[0, 0], [1, 0]])
    assert jc.height == 2


def test_jc_complex_height_two():
    L = np.block([[J, np.zeros((2, 2))], [np.eye(2), J]])
    jc = jc_decompose(L)
    assert np.allclose(jc.S, np.kron(np.eye(2), J))
    assert jc.height == 2
    assert norm(commutator(jc.S, jc.N)) < 1e-12


def test_jc_of_nonderogatory_mixture(rng):
    B = np.zeros((5, 5))
    B[:3, :3] = [[1, 0, 0], [1, 1, 0], [0, 1, 1]]
    B[3:, 3:] = [[0, -3], [3, 0]]
    P = np.eye(5) + 0.3 * rng.standard_normal((5, 5))
    L = P @ B @ np.linalg.inv(P)
    jc = jc_decompose(L)
    assert jc.height == 3
    assert norm(jc.S + jc.N - L) < 1e-10
    assert nil_height(jc.N, 1e-9) == 3
    z = np.linalg.eigvals(jc.S)
    assert np.allclose(sorted(z.real), sorted([1, 1, 1, 0, 0]), atol=1e-8)


def test_jc_residuals_reported():
    jc = jc_decompose(np.diag([1.0, 2.0]))
    assert set(jc.residuals) >= {"commutator", "sum", "nilpotency", "semisimple"}


def test_ambiguous_spectrum_raises():
    with pytest.raises(IllConditionedSpectrumError):
        jc_decompose(np.diag([0.0, 4e-5]))


def test_jc_membership_of_parts(specs, rng):
    for spec in specs.values():
        L = random_member(spec, rng)
        jc = jc_decompose(L)
        assert membership(jc.S, spec)[1] < 1e-8
        assert membership(jc.N, spec)[1] < 1e-8


def test_heights_by_class():
    L = np.zeros((3, 3))
    L[1, 0] = 1.0
    h = heights_by_class(jc_decompose(L))
    assert h == {(0.0, 0.0): [2, 1]}


def test_gl_chains_complex_seed_pairs():
    L = np.kron(np.eye(2), 2 * J)
    (cls, seeds), = gl_chains(jc_decompose(L))
    assert not cls.is_real
    assert [h for h, _ in seeds] == [1, 1]
    assert all(W.shape == (4, 2) for _, W in seeds)


@pytest.mark.parametrize("fx", unfolding_rows(), ids=lambda f: f["row"])
def test_blocks_decompose_every_table_fixture(fx):
    spec = spec_of(fx)
    L = fx["L"]
    from structlin.structure import orthogonalize_family
    spec_n, g = orthogonalize_family(spec)
    Ln = g @ L @ np.linalg.inv(g)
    blocks = invariant_blocks(Ln, jc_decompose(Ln), spec_n)
    assert sum(b.dim for b in blocks) == L.shape[0]
    s = spec_n.generators[0].s
    for b in blocks:
        X = b.X.basis
        assert b.X.contains(Ln @ X, 1e-8)
        if spec_n.generators[0].is_aut:
            assert b.X.contains(s @ X, 1e-8)


def test_blocks_reject_non_member():
    spec = spec_of(unfolding_rows()[5])
    with pytest.raises(InvalidBlockError):
        invariant_blocks(np.eye(2), jc_decompose(np.eye(2)), spec)
