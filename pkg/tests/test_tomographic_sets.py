import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tomokit.operator_space import (
    RankOneProjector,
    mat_to_vec,
    projector_from_vector,
    random_density_matrix,
    random_hermitian,
    random_pure_state,
)
from tomokit.spin_tomography import spin_half_projector
from tomokit.tomographic_sets import (
    GramKernel,
    RankDeficientError,
    Tomogram,
    TomographicSet,
    gram_schmidt,
    identity_check,
    is_minimal_tomographic_set,
    mutually_unbiased_projectors,
    numerical_rank,
    povm_check,
    random_minimal_set,
    reconstruct,
    select_minimal_subset,
    set_from_unitary_family,
    six_projector_set,
    skew_pair_check,
    tomogram,
)


def su2(a, b):
    return np.array([[a, b], [-np.conj(b), np.conj(a)]])


def random_su2(rng):
    v = rng.standard_normal(4)
    v /= np.linalg.norm(v)
    return su2(v[0] + 1j * v[1], v[2] + 1j * v[3])


def dual_oracle(tset):
    """Duals from the inverse of the (transposed) vector matrix; independent of Gram-Schmidt."""
    m = tset.vector_matrix()  # columns |P_k>
    # want |K_l> with <K_l|P_k> = delta: K = (M^dagger)^{-1}
    k = np.linalg.inv(m.conj().T)
    n = tset.dim
    return np.array([k[:, l].reshape(n, n) for l in range(m.shape[1])])


def test_tomogram_trivial_cases(rng):
    tset = random_minimal_set(3, rng)
    p = tset.projectors[4].matrix
    assert tomogram(p, tset).values[4] == pytest.approx(1)
    assert np.allclose(tomogram(np.eye(3) / 3, tset).values, 1 / 3)


def test_tomogram_matches_trace_oracle(rng):
    tset = random_minimal_set(4, rng)
    rho = random_density_matrix(4, rng=rng)
    ref = [np.trace(p.matrix @ rho).real for p in tset.projectors]
    vals = tomogram(rho, tset).values
    assert np.allclose(vals, ref, atol=1e-14)
    assert vals.min() >= -1e-12 and vals.max() <= 1 + 1e-12


def test_tomogram_dimension_mismatch(rng):
    with pytest.raises(ValueError):
        tomogram(np.eye(2), random_minimal_set(3, rng))


def test_tomogram_length_check(rng):
    with pytest.raises(ValueError):
        Tomogram(random_minimal_set(2, rng), [0.1, 0.2])


def test_formatted_values_clamp_only_on_output(rng):
    tset = random_minimal_set(2, rng)
    tom = Tomogram(tset, [-1e-13, 0.5, 0.2, -0.1])
    assert tom.formatted_values()[0] == 0.0
    assert tom.formatted_values()[3] == -0.1
    assert tom.values[0] == -1e-13


def test_hadamard_like_pair_is_skew():
    s = 1 / np.sqrt(2)
    u1, u2 = su2(s, s), su2(s, 1j * s)
    rep = skew_pair_check(u1, u2)
    assert rep.determinant_value == pytest.approx(-0.25)
    assert rep.skew
    six = six_projector_set(u1, u2)
    assert numerical_rank(six.vector_matrix()) == 4
    sub = select_minimal_subset(six)
    assert len(sub) == 4 and is_minimal_tomographic_set(sub).minimal


def test_six_vector_entries_are_outer_products():
    # the projector vectors of U|e_1> and U|e_2> are (|a|^2, -ab, -a*b*, |b|^2)
    # and (|b|^2, ab, a*b*, |a|^2) up to the ordering of the middle entries
    a, b = 0.6, 0.8j
    six = six_projector_set(su2(a, b), su2(1, 0))
    v3 = mat_to_vec(six.projectors[2].matrix)
    v4 = mat_to_vec(six.projectors[3].matrix)
    assert np.allclose(v3, [abs(a) ** 2, -a * b, -np.conj(a * b), abs(b) ** 2])
    assert np.allclose(v4, [abs(b) ** 2, a * b, np.conj(a * b), abs(a) ** 2])


def test_non_skew_pairs():
    s = 1 / np.sqrt(2)
    u1 = su2(s, s)
    assert not skew_pair_check(u1, u1).skew
    assert skew_pair_check(su2(np.exp(0.3j), 0), su2(s, 1j * s)).determinant_value == 0
    assert not skew_pair_check(su2(np.exp(0.3j), 0), su2(s, 1j * s)).skew


def test_skew_check_input_validation():
    with pytest.raises(ValueError):
        skew_pair_check(np.eye(3), np.eye(2))
    with pytest.raises(ValueError):
        skew_pair_check(np.array([[1, 1], [0, 1]]), np.eye(2))
    with pytest.raises(ValueError):
        skew_pair_check(np.diag([1, -1]), np.eye(2))  # unitary but not [[a, b], [-b*, a*]]


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_skew_agrees_with_rank_and_is_symmetric(seed):
    rng = np.random.default_rng(seed)
    u1, u2 = random_su2(rng), random_su2(rng)
    if rng.random() < 0.3:  # make a non-skew pair: same a b phase
        a2, b2 = u2[0, 0], u2[0, 1]
        phase = np.angle(u1[0, 0] * u1[0, 1])
        a2, b2 = abs(a2) * np.exp(0.5j * phase), abs(b2) * np.exp(0.5j * phase)
        u2 = su2(a2, b2)
    rep = skew_pair_check(u1, u2)
    rank = numerical_rank(six_projector_set(u1, u2).vector_matrix())
    assert rep.skew == (rank == 4)
    assert skew_pair_check(u2, u1).skew == rep.skew


def test_minimality_trivial_and_errors(rng):
    p = projector_from_vector([1, 0, 0])
    rep = is_minimal_tomographic_set(TomographicSet(3, [p] * 9))
    assert not rep.minimal and rep.rank == 1
    with pytest.raises(ValueError, match="too few"):
        is_minimal_tomographic_set(TomographicSet(3, [p] * 8))
    with pytest.raises(ValueError, match="too many"):
        is_minimal_tomographic_set(TomographicSet(3, [p] * 10))


def test_mutually_unbiased_rank_matches_svd_oracle():
    tset = mutually_unbiased_projectors(3, 3)
    assert len(tset) == 9
    rep = is_minimal_tomographic_set(tset)
    oracle = np.linalg.matrix_rank(tset.vector_matrix(), tol=1e-10 * np.linalg.norm(tset.vector_matrix(), 2))
    assert rep.rank == oracle == 7  # three bases span 3*(3-1) + 1 dimensions
    assert not rep.minimal
    # all four bases for n = 3 are mutually unbiased and contain a minimal set
    full = mutually_unbiased_projectors(3, 4)
    overlaps = [abs(np.vdot(full.projectors[i].vector, full.projectors[j].vector)) ** 2
                for i in range(3) for j in range(3, 12)]
    assert np.allclose(overlaps, 1 / 3)
    assert len(select_minimal_subset(full)) == 9


def test_minimality_invariant_under_relabeling(rng):
    tset = random_minimal_set(3, rng)
    perm = rng.permutation(9)
    a, b = is_minimal_tomographic_set(tset), is_minimal_tomographic_set(tset.subset(perm))
    assert a.minimal == b.minimal and a.rank == b.rank
    assert a.condition_number == pytest.approx(b.condition_number)


def test_gram_schmidt_n1():
    k = gram_schmidt(TomographicSet(1, [projector_from_vector([1])]))
    assert np.allclose(k.gamma, [[1]])
    assert np.allclose(k.duals, [[[1]]])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_gram_schmidt_invariants(n, rng):
    tset = random_minimal_set(n, rng)
    k = gram_schmidt(tset)
    v = k.gamma @ tset.vector_matrix().T  # rows |V_j>
    assert np.max(np.abs(v.conj() @ v.T - np.eye(n * n))) < 1e-10
    bi = np.einsum("lij,kji->lk", k.duals, tset.matrices())
    assert np.max(np.abs(bi - np.eye(n * n))) < 1e-8
    assert max(np.max(np.abs(d - d.conj().T)) for d in k.duals) < 1e-8
    assert np.max(np.abs(k.duals - dual_oracle(tset))) < 1e-8


def test_gram_schmidt_rank_deficient():
    p = projector_from_vector([1, 0])
    q = projector_from_vector([0, 1])
    with pytest.raises(RankDeficientError) as err:
        gram_schmidt(TomographicSet(2, [p, q, p, q]))
    assert err.value.rank == 2


def test_matrix_element_identity(rng):
    for n in [2, 3]:
        tset = random_minimal_set(n, rng)
        k = gram_schmidt(tset)
        g = k.gamma
        p = tset.matrices()
        # sum_{j,k,l} conj(g_jk) g_jl conj(P_k)_{mu nu} (P_l)_{mu' nu'}
        coef = g.conj().T @ g  # [k, l]
        total = np.einsum("kl,kab,lcd->abcd", coef, p.conj(), p)
        delta = np.einsum("ac,bd->abcd", np.eye(n), np.eye(n))
        assert np.max(np.abs(total - delta)) < 1e-8


def test_identity_check_cases(rng):
    tset = random_minimal_set(2, rng)
    k = gram_schmidt(tset)
    assert identity_check(k, tset) < 1e-8
    zero = GramKernel(k.gamma, np.zeros_like(k.duals), k.labels)
    assert identity_check(zero, tset) == pytest.approx(2.0)  # sqrt(n^2)
    prev = identity_check(k, tset)
    for eps in [1e-4, 1e-3, 1e-2, 1e-1, 1.0]:
        duals = k.duals.copy()
        duals[0] = duals[0] + eps * np.eye(2)
        r = identity_check(GramKernel(k.gamma, duals, k.labels), tset)
        assert r > prev
        prev = r


def test_reconstruct_examples(rng):
    tset = random_minimal_set(2, rng)
    k = gram_schmidt(tset)
    assert np.allclose(reconstruct(tomogram(np.eye(2) / 2, tset), k), np.eye(2) / 2)
    psi = random_pure_state(2, rng=rng)
    p = np.outer(psi, psi.conj())
    assert np.linalg.norm(reconstruct(tomogram(p, tset), k) - p) < 1e-8
    t4 = random_minimal_set(4, rng)
    rho = random_density_matrix(4, rng=rng)
    assert np.linalg.norm(reconstruct(tomogram(rho, t4), gram_schmidt(t4)) - rho) < 1e-8
    with pytest.raises(ValueError):
        reconstruct(tomogram(rho, t4), k)


def test_kernel_reproduces_random_operators(rng):
    tset = random_minimal_set(2, rng)
    k = gram_schmidt(tset)
    for _ in range(20):
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        back = sum(kl * np.trace(p.matrix @ a) for kl, p in zip(k.duals, tset.projectors))
        assert np.max(np.abs(back - a)) < 1e-8


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 5), seed=st.integers(0, 2**32 - 1))
def test_round_trip_property(n, seed):
    rng = np.random.default_rng(seed)
    tset = random_minimal_set(n, rng)
    rho = random_hermitian(n, rng=rng)
    back = reconstruct(tomogram(rho, tset), gram_schmidt(tset))
    assert np.linalg.norm(back - rho) < 1e-8 * np.linalg.norm(rho)


def test_reconstruction_map_independent_of_order(rng):
    tset = random_minimal_set(3, rng)
    rho = random_density_matrix(3, rng=rng)
    perm = rng.permutation(9)
    other = tset.subset(perm)
    a = reconstruct(tomogram(rho, tset), gram_schmidt(tset))
    b = reconstruct(tomogram(rho, other), gram_schmidt(other))
    assert np.allclose(a, b, atol=1e-10)


def test_set_from_unitary_family():
    p0 = projector_from_vector([1, 0])
    out = set_from_unitary_family(p0, [np.eye(2)])
    assert np.allclose(out.projectors[0].matrix, p0.matrix)
    theta, phi = 1.1, 0.7
    u = np.array([[np.exp(-0.5j * phi) * np.cos(theta / 2), np.exp(-0.5j * phi) * np.sin(theta / 2)],
                  [np.exp(0.5j * phi) * np.sin(theta / 2), -np.exp(0.5j * phi) * np.cos(theta / 2)]])
    fam = set_from_unitary_family(p0, [u, np.eye(2)], labels=[(theta, phi), "id"])
    assert np.allclose(fam.projectors[0].matrix, spin_half_projector((theta, phi)).matrix)
    assert fam.labels == ((theta, phi), "id")
    for p in fam.projectors:
        assert np.allclose(np.linalg.eigvalsh(p.matrix), [0, 1])
    with pytest.raises(ValueError, match="member 1"):
        set_from_unitary_family(p0, [np.eye(2), np.array([[1, 1], [0, 1]])])


def test_povm_check():
    basis = TomographicSet.from_vectors(np.eye(3))
    assert povm_check(basis, [1, 1, 1]) == pytest.approx(0)
    assert povm_check(TomographicSet(3, [], []), []) == pytest.approx(np.sqrt(3))
    with pytest.raises(ValueError):
        povm_check(basis, [1, 1])


def test_povm_sphere_refines():
    from tomokit.spin_tomography import SphereQuadrature, spin_half_povm_weights

    def residual(nodes):
        quad = SphereQuadrature.gauss(nodes)
        tset = TomographicSet(2, [spin_half_projector(d) for d in [(t, p) for t, p, _ in quad.nodes()]])
        return povm_check(tset, spin_half_povm_weights(quad))

    # uniform-in-angle midpoint grids converge; Gauss nodes are exact already
    thetas = lambda n: (np.arange(n) + 0.5) * np.pi / n
    res = []
    for n in [4, 8, 16, 32]:
        t, ph = np.meshgrid(thetas(n), 2 * np.pi * np.arange(n) / n, indexing="ij")
        w = np.sin(t) * (np.pi / n) * (2 * np.pi / n) * 2 / (4 * np.pi)
        tset = TomographicSet(2, [spin_half_projector((a, b)) for a, b in zip(t.ravel(), ph.ravel())])
        res.append(povm_check(tset, w.ravel()))
    assert all(b < a for a, b in zip(res, res[1:]))
    assert residual(4) < 1e-12


def test_random_minimal_set_condition(rng):
    tset = random_minimal_set(3, rng, max_condition=1e3)
    assert is_minimal_tomographic_set(tset).condition_number < 1e3
