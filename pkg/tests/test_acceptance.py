"""Acceptance criteria, one test each, at the stated tolerances.

Each test prints a single ``criterion N: PASS|FAIL`` line; the lines are
also collected and listed in an "acceptance criteria" section at the end of
the pytest run.
"""
import math
from fractions import Fraction
import time

import numpy as np
import pytest
from scipy import integrate

from conftest import ACCEPTANCE_LINES
from tomokit.fock_tomography import (
    FockSpace,
    PolarGrid,
    kernel_position_element,
    kernel_position_resummed,
    photon_reconstruct,
    photon_tomogram_grid,
)
from tomokit.operator_space import random_density_matrix, random_hermitian
from tomokit.spin_tomography import (
    SphereQuadrature,
    default_spin_quadrature,
    spin_half_kernel,
    spin_half_povm_weights,
    spin_half_projector,
    spin_half_reconstruct,
    spin_half_tomogram,
    spin_j_reconstruct,
    spin_j_tomogram,
)
from tomokit.symplectic_tomography import (
    UniformGrid,
    ground_state,
    pauli_counterexample,
    reconstruction_nodes,
    squeeze_commutant_check,
    symplectic_reconstruct,
    symplectic_tomogram_grid,
)
from tomokit.tomographic_sets import (
    TomographicSet,
    gram_schmidt,
    povm_check,
    random_minimal_set,
    reconstruct,
    six_projector_set,
    skew_pair_check,
    tomogram,
)


def verdict(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, detail


def test_criterion_01_finite_round_trip():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    for n in (2, 3, 4, 5):
        for _ in range(50):
            tset = random_minimal_set(n, rng, max_condition=1e6)
            rho = random_density_matrix(n, rng=rng)
            err = np.linalg.norm(reconstruct(tomogram(rho, tset), gram_schmidt(tset)) - rho)
            worst = max(worst, err)
    elapsed = time.perf_counter() - t0
    verdict(1, worst < 1e-8 and elapsed < 10, f"max Frobenius error {worst:.2e}, {elapsed:.2f} s")


def test_criterion_02_biorthogonality():
    tset = random_minimal_set(3, np.random.default_rng(2))
    kernel = gram_schmidt(tset)
    gram = np.array([[np.trace(k @ p) for p in tset.matrices()] for k in kernel.duals])
    err = float(np.max(np.abs(gram - np.eye(9))))
    verdict(2, err < 1e-8, f"max |Tr(K_l P_k) - delta_lk| = {err:.2e}")


def _su2(a, b):
    return np.array([[a, b], [-np.conj(b), np.conj(a)]])


def _random_pair_member(rng, kind):
    # generic SU(2), or members that make the pair degenerate (real or diagonal)
    x = rng.normal(size=4)
    x /= np.linalg.norm(x)
    a, b = complex(x[0], x[1]), complex(x[2], x[3])
    if kind == "real":
        a, b = complex(np.hypot(x[0], x[1])), complex(np.hypot(x[2], x[3]))
    elif kind == "diagonal":
        a, b = np.exp(1j * rng.uniform(0, 2 * np.pi)), 0j
    return _su2(a, b)


def test_criterion_03_skewness_agrees_with_rank():
    rng = np.random.default_rng(3)
    disagreements = 0
    skew_count = 0
    for k in range(200):
        kind = ("generic", "generic", "real", "diagonal")[k % 4]
        u1 = _random_pair_member(rng, kind)
        u2 = _random_pair_member(rng, "real" if kind == "real" else "generic")
        m = six_projector_set(u1, u2).vector_matrix()
        sv = np.linalg.svd(m, compute_uv=False)
        full_rank = sv[3] > 1e-9 * sv[0]
        skew = skew_pair_check(u1, u2).skew
        skew_count += skew
        disagreements += skew != full_rank
    verdict(3, disagreements == 0, f"{disagreements} disagreements in 200 pairs ({skew_count} skew)")


def test_criterion_04_spin_half_both_decompositions():
    rng = np.random.default_rng(4)
    quad = SphereQuadrature.gauss(16, 16)
    t0 = time.perf_counter()
    theta, phi, w = np.array(quad.nodes()).T
    worst_formula = 0.0
    worst = 0.0
    for _ in range(20):
        a = random_hermitian(2, rng=rng)
        outside_kernel = np.zeros((2, 2), dtype=complex)
        outside_projector = np.zeros((2, 2), dtype=complex)
        for t, p, wt in zip(theta, phi, w):
            k = spin_half_kernel((t, p))
            exact = np.array([[1 + 3 * np.cos(t), 3 * np.exp(-1j * p) * np.sin(t)],
                              [3 * np.exp(1j * p) * np.sin(t), 1 - 3 * np.cos(t)]]) / (4 * np.pi)
            worst_formula = max(worst_formula, float(np.max(np.abs(k - exact))))
            proj = spin_half_projector((t, p)).matrix
            outside_kernel += wt * k * np.trace(proj @ a)
            outside_projector += wt * proj * np.trace(k @ a)
        worst = max(worst, float(np.max(np.abs(outside_kernel - a))), float(np.max(np.abs(outside_projector - a))))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-8 and worst_formula < 1e-14 and elapsed < 5
    verdict(4, ok, f"max error {worst:.2e}, kernel formula gap {worst_formula:.1e}, {elapsed:.2f} s")


def test_criterion_05_spin_j_round_trip():
    rng = np.random.default_rng(5)
    worst = 0.0
    worst_vs_half = 0.0
    for j in ("1/2", "1", "3/2"):
        quad = default_spin_quadrature(j)
        n = int(2 * Fraction(j) + 1)
        assert quad.shape == (8 * n, 8 * n)
        for _ in range(10):
            rho = random_density_matrix(n, rng=rng)
            rec = spin_j_reconstruct(spin_j_tomogram(rho, j, quad)).matrix
            worst = max(worst, float(np.max(np.abs(rec - rho))))
            if n == 2:
                half = spin_half_reconstruct(spin_half_tomogram(rho, quad), quad)
                worst_vs_half = max(worst_vs_half, float(np.max(np.abs(rec - half))))
    ok = worst < 1e-6 and worst_vs_half < 1e-6
    verdict(5, ok, f"max round-trip error {worst:.2e}, spin-1/2 agreement {worst_vs_half:.2e}")


def test_criterion_06_photon_inversion():
    t0 = time.perf_counter()
    grid = PolarGrid(4.0, 24, 24)
    big = FockSpace(40)
    coh = big.coherent_state(1.0)
    states = {
        "vacuum": np.diag([1.0] + [0.0] * 8).astype(complex),
        "fock1": np.diag([0.0, 1.0] + [0.0] * 7).astype(complex),
        "coherent": np.outer(coh, coh.conj()),
    }
    fidelities, traces, gaps = [], [], []
    for name, rho in states.items():
        tom = photon_tomogram_grid(rho, ncut=32, grid=grid)
        rec0 = photon_reconstruct(tom, 0.0, nmax=8).matrix
        rec3 = photon_reconstruct(tom, -0.3, nmax=8).matrix
        ref = rho[:9, :9]
        if name == "coherent":
            v = coh[:9]
            fidelities.append(float(np.real(v.conj() @ rec0 @ v)))
        else:
            fidelities.append(float(np.real(np.trace(ref @ rec0))))
        traces.append(float(np.trace(rec0).real))
        gaps.append(float(np.max(np.abs(rec0 - rec3))))
    elapsed = time.perf_counter() - t0
    ok = (min(fidelities) > 0.99 and all(0.98 <= t <= 1.02 for t in traces)
          and max(gaps) < 0.02 and elapsed < 60)
    verdict(6, ok, f"fidelities {np.round(fidelities, 6).tolist()}, traces {np.round(traces, 6).tolist()}, "
                   f"s-gap {max(gaps):.1e}, {elapsed:.2f} s")


def test_criterion_07_photon_kernel_position_cross_check():
    rng = np.random.default_rng(7)
    points = rng.uniform(-1.5, 1.5, size=(25, 2))
    space = FockSpace(40)
    resummed = np.array([kernel_position_resummed(x, y, 0, 0, 0.0, space) for x, y in points])
    try:
        closed = np.array([kernel_position_element(x, y, 0, 0, 0.0) for x, y in points])
        gap = float(np.max(np.abs(closed - resummed)))
        detail = f"max gap {gap:.2e}"
    except ValueError as exc:
        # at s = 0 the kernel is 4 D Pi D^dagger, whose position kernel is 4 delta(x + y):
        # zero off the anti-diagonal, while the truncated sum is a nascent delta
        gap = float(np.max(np.abs(resummed)))
        detail = f"closed form undefined ({exc}); truncated sum reaches {gap:.2f} where the limit is 0"
    verdict(7, gap < 1e-4, detail)


def test_criterion_08_symplectic_reconstruction():
    t0 = time.perf_counter()
    ygrid = UniformGrid(-8.0, 8.0, 64)
    nodes, w = reconstruction_nodes(ygrid)
    tom = symplectic_tomogram_grid(ground_state(), nodes, w)
    res = symplectic_reconstruct(tom, ygrid)
    elapsed = time.perf_counter() - t0
    y = ygrid.points
    target = np.exp(-(y[:, None] ** 2 + y[None, :] ** 2) / 2) / np.sqrt(np.pi)
    err = float(np.max(np.abs(res.matrix - target)))
    tr = res.trace()
    ok = err < 1e-2 and abs(tr - 1) < 1e-2 and elapsed < 30
    verdict(8, ok, f"max error {err:.2e}, trace {tr:.5f}, {elapsed:.2f} s")


def test_criterion_09_pauli():
    alpha = 1 + 1j
    res = pauli_counterexample(alpha, 0.0)

    def psi(x, a):
        return np.exp(-a * x * x)

    def integral(f):
        re = integrate.quad(lambda x: np.real(f(x)), -np.inf, np.inf, epsabs=1e-13)[0]
        im = integrate.quad(lambda x: np.imag(f(x)), -np.inf, np.inf, epsabs=1e-13)[0]
        return complex(re, im)

    n1 = integral(lambda x: abs(psi(x, alpha)) ** 2).real
    n2 = integral(lambda x: abs(psi(x, alpha.conjugate())) ** 2).real
    overlap = integral(lambda x: np.conj(psi(x, alpha)) * psi(x, alpha.conjugate()))
    oracle = abs(overlap) ** 2 / (n1 * n2)
    ok = (res.marginal_gap_q < 1e-12 and res.marginal_gap_p < 1e-12
          and abs(res.fidelity - 0.70711) < 1e-4 and abs(res.fidelity - oracle) < 1e-4)
    verdict(9, ok, f"gaps {res.marginal_gap_q:.1e}/{res.marginal_gap_p:.1e}, fidelity {res.fidelity:.6f}, "
                   f"oracle {oracle:.6f}")


def test_criterion_10_squeeze_commutant():
    rng = np.random.default_rng(10)
    norms = []
    for _ in range(5):
        lam, theta = rng.uniform(-0.8, 0.8), rng.uniform(-np.pi, np.pi)
        mu, nu = math.exp(lam) * math.cos(theta), math.exp(-lam) * math.sin(theta)
        norms.append(squeeze_commutant_check(mu, nu, FockSpace(40)).parity_commutator_norm)
    verdict(10, max(norms) < 1e-8, f"max ||[A_sq, Pi]|| = {max(norms):.2e}")


def test_criterion_11_povm():
    quad = SphereQuadrature.gauss(32, 32)
    theta, phi, _ = np.array(quad.nodes()).T
    tset = TomographicSet(2, [spin_half_projector((t, p)) for t, p in zip(theta, phi)])
    resid = povm_check(tset, spin_half_povm_weights(quad))
    verdict(11, resid < 1e-6, f"||sum w P - I|| = {resid:.2e}")
