"""Property tests over random structured matrices."""
import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import type_specs
from structlin.decomp import jc_decompose
from structlin.errors import IllConditionedSpectrumError
from structlin.linalg import commutator, norm, sylvester_kernel_dim
from structlin.normalform import classify, labels_equal
from structlin.structure import membership, project, random_group_element, random_member
from structlin.unfolding import centralizer_basis, miniversal_unfolding, transversality_rank

SPECS = type_specs()
settings.register_profile("ci", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

types = st.sampled_from(sorted(SPECS))
seeds = st.integers(0, 2 ** 32 - 1)


def member(t, seed):
    return random_member(SPECS[t], np.random.default_rng(seed))


@given(types, seeds)
def test_projection_idempotent(t, seed):
    spec = SPECS[t]
    A = np.random.default_rng(seed).standard_normal((spec.dim, spec.dim))
    P = project(A, spec)
    assert norm(project(P, spec) - P) < 1e-10 * (1 + norm(A))
    assert membership(P, spec)[0]


@given(types, seeds)
def test_jc_parts_structured_and_commuting(t, seed):
    L = member(t, seed)
    try:
        jc = jc_decompose(L)
    except IllConditionedSpectrumError:
        return
    assert norm(commutator(jc.S, jc.N)) < 1e-8
    assert membership(jc.S, SPECS[t])[1] < 1e-8
    assert norm(jc.S + jc.N - L) < 1e-10 * (1 + norm(L))


@given(types, seeds)
def test_classification_invariant_under_group(t, seed):
    rng = np.random.default_rng(seed)
    spec = SPECS[t]
    L = random_member(spec, rng)
    g = random_group_element(spec, rng)
    try:
        a = classify(L, spec)
        b = classify(g @ L @ np.linalg.inv(g), spec)
    except IllConditionedSpectrumError:
        return
    assert labels_equal(a.labels, b.labels)
    assert a.residual < 1e-8


@given(types, seeds)
def test_centralizer_matches_sylvester(t, seed):
    L = member(t, seed)
    try:
        cb = centralizer_basis(L)
    except IllConditionedSpectrumError:
        return
    assert cb.dim == sylvester_kernel_dim(L)


@given(types, seeds)
def test_unfolding_transverse(t, seed):
    spec = SPECS[t]
    L = member(t, seed)
    try:
        fam = miniversal_unfolding(L, spec)
    except IllConditionedSpectrumError:
        return
    r, dim = transversality_rank(fam, spec)
    assert r == dim
    assert all(membership(D, spec)[0] for D in fam.directions)


@given(st.sampled_from([6, 8]), seeds)
def test_spectrum_pairing_for_mu_minus_one(t, seed):
    z = np.linalg.eigvals(member(t, seed))
    for w in (-z, z.conj()):
        d = np.abs(w[:, None] - z[None, :]).min(axis=1)
        assert d.max() < 1e-6
