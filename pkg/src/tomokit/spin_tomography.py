"""Spin tomography: the spin-1/2 family and its kernel, and the general spin-j kernel.

Sphere integrals use Gauss-Legendre nodes in cos(theta) (so the sin(theta)
Jacobian is folded into the theta weights) times a uniform rule in phi.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np

from .operator_space import DimensionError, RankOneProjector, as_matrix
from .parallel import ordered_sum
from .special_functions import (
    PASSIVE,
    HalfInteger,
    HalfLike,
    QuadratureRule,
    gauss_legendre,
    projections,
    twice,
    uniform_periodic,
    wigner_3j,
    wigner_D,
    wigner_D_matrix,
)

# How D^{(j3)}_{0 m3}(phi, theta, gamma) in the spin-j kernel is evaluated.
# With the active z-y-z form the gamma average kills every m3 != 0 and the
# kernel cannot resolve coherences; the passive reading (inverse rotation)
# is the one that reconstructs.
KERNEL_EULER_CONVENTION = PASSIVE

SIGMA = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


@dataclass(frozen=True)
class SphereDirection:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        object.__setattr__(self, "phi", float(np.mod(self.phi, 2 * np.pi)))

    @property
    def unit_vector(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])


@dataclass(frozen=True)
class SphereQuadrature:
    """Product rule on the sphere; theta weights already include sin(theta)."""

    theta: QuadratureRule
    phi: QuadratureRule

    @classmethod
    def gauss(cls, n_theta: int, n_phi: int | None = None) -> "SphereQuadrature":
        n_phi = n_theta if n_phi is None else n_phi
        gl = gauss_legendre(n_theta, -1.0, 1.0)
        # reverse so theta increases with the node index
        theta = QuadratureRule(np.arccos(gl.nodes)[::-1], gl.weights[::-1], (0.0, float(np.pi)))
        return cls(theta, uniform_periodic(n_phi, 2 * np.pi))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.theta), len(self.phi)

    def nodes(self) -> list[tuple[float, float, float]]:
        """Flat list of (theta, phi, weight)."""
        return [(t, p, wt * wp)
                for t, wt in zip(self.theta.nodes, self.theta.weights)
                for p, wp in zip(self.phi.nodes, self.phi.weights)]

    def directions(self) -> list[SphereDirection]:
        return [SphereDirection(t, p) for t, p, _ in self.nodes()]

    def flat_weights(self) -> np.ndarray:
        return np.outer(self.theta.weights, self.phi.weights).ravel()


def _angles(direction) -> tuple[float, float]:
    if isinstance(direction, SphereDirection):
        return direction.theta, direction.phi
    theta, phi = direction
    return float(theta), float(phi)


def spin_half_family(direction) -> np.ndarray:
    """n . sigma for the unit vector n(theta, phi)."""
    theta, phi = _angles(direction)
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, np.exp(-1j * phi) * s], [np.exp(1j * phi) * s, -c]])


def spin_half_projector(direction) -> RankOneProjector:
    """Projector onto the +1 eigenvector of n . sigma, i.e. (I + n . sigma)/2."""
    theta, phi = _angles(direction)
    if theta in (0.0, np.pi):
        phi = 0.0  # azimuth undefined at the poles
    v = np.array([np.exp(-0.5j * phi) * np.cos(theta / 2), np.exp(0.5j * phi) * np.sin(theta / 2)])
    return RankOneProjector(v)


def spin_half_kernel(direction) -> np.ndarray:
    theta, phi = _angles(direction)
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[1 + 3 * c, 3 * np.exp(-1j * phi) * s],
                     [3 * np.exp(1j * phi) * s, 1 - 3 * c]]) / (4 * np.pi)


def _grid_arrays(quad: SphereQuadrature):
    theta = np.repeat(quad.theta.nodes, len(quad.phi))
    phi = np.tile(quad.phi.nodes, len(quad.theta))
    return theta, phi, quad.flat_weights()


def _kernel_stack(theta, phi) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    e = np.exp(1j * phi)
    k = np.empty((theta.size, 2, 2), dtype=complex)
    k[:, 0, 0] = 1 + 3 * c
    k[:, 0, 1] = 3 * s / e
    k[:, 1, 0] = 3 * s * e
    k[:, 1, 1] = 1 - 3 * c
    return k / (4 * np.pi)


def _projector_stack(theta, phi) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    e = np.exp(1j * phi)
    p = np.empty((theta.size, 2, 2), dtype=complex)
    p[:, 0, 0] = 1 + c
    p[:, 0, 1] = s / e
    p[:, 1, 0] = s * e
    p[:, 1, 1] = 1 - c
    return p / 2


def spin_half_tomogram(a, quad: SphereQuadrature) -> np.ndarray:
    """Tr(P(theta, phi) A) on the quadrature grid, shape (n_theta, n_phi)."""
    a = as_matrix(a)
    theta, phi, _ = _grid_arrays(quad)
    values = np.einsum("kij,ji->k", _projector_stack(theta, phi), a)
    return values.reshape(quad.shape)


def spin_half_reconstruct(tomogram_values, quad: SphereQuadrature) -> np.ndarray:
    """sum over nodes of w * K(theta, phi) * W(theta, phi).

    ``tomogram_values`` is an (n_theta, n_phi) array, a callable of
    (theta, phi), or a mapping keyed by (theta_index, phi_index).
    """
    theta, phi, w = _grid_arrays(quad)
    if callable(tomogram_values):
        values = np.array([tomogram_values(t, p) for t, p in zip(theta, phi)])
    elif isinstance(tomogram_values, Mapping):
        keys = [(i, j) for i in range(quad.shape[0]) for j in range(quad.shape[1])]
        missing = [k for k in keys if k not in tomogram_values]
        if missing:
            raise KeyError(f"tomogram missing {len(missing)} nodes, e.g. {missing[:5]}")
        values = np.array([tomogram_values[k] for k in keys])
    else:
        values = np.asarray(tomogram_values)
        if values.shape != quad.shape:
            raise ValueError(f"tomogram shape {values.shape} does not match quadrature {quad.shape}")
        values = values.ravel()
    return np.einsum("k,kij->ij", w * values, _kernel_stack(theta, phi))


def _superoperator(outer: np.ndarray, inner: np.ndarray, w: np.ndarray) -> np.ndarray:
    # sum_k w_k |outer_k> <inner_k^dagger|  acting on row-major vectors
    o = outer.reshape(len(w), -1)
    i = inner.transpose(0, 2, 1).reshape(len(w), -1)
    return np.einsum("k,ka,kb->ab", w, o, i)


def kernel_identity_residual(quad: SphereQuadrature) -> float:
    """Max deviation of A -> int K Tr(P A) from the identity on B(C^2)."""
    theta, phi, w = _grid_arrays(quad)
    sup = _superoperator(_kernel_stack(theta, phi), _projector_stack(theta, phi), w)
    return float(np.max(np.abs(sup - np.eye(4))))


def dual_identity_check(quad: SphereQuadrature) -> float:
    """Max deviation of A -> int P Tr(K A) from the identity on B(C^2)."""
    theta, phi, w = _grid_arrays(quad)
    sup = _superoperator(_projector_stack(theta, phi), _kernel_stack(theta, phi), w)
    return float(np.max(np.abs(sup - np.eye(4))))


def spin_half_povm_weights(quad: SphereQuadrature) -> np.ndarray:
    """Weights 2 dOmega/(4 pi) that turn the sphere projectors into a POVM."""
    return 2 * quad.flat_weights() / (4 * np.pi)


# ----------------------------------------------------------------------------
# general spin j

@dataclass(frozen=True)
class SpinTomogramGrid:
    j: HalfInteger
    quad: SphereQuadrature
    values: np.ndarray  # shape (n_theta * n_phi, 2j+1), columns ordered m = j..-j

    def __post_init__(self):
        n = self.j.twice_value + 1
        values = np.asarray(self.values, dtype=float)
        expected = (self.quad.shape[0] * self.quad.shape[1], n)
        if values.shape != expected:
            raise ValueError(f"values shape {values.shape}, expected {expected}")
        object.__setattr__(self, "values", values)

    @property
    def directions(self) -> list[SphereDirection]:
        return self.quad.directions()


@dataclass
class SpinReconstruction:
    matrix: np.ndarray
    warnings: list[str] = field(default_factory=list)


def _as_half(j: HalfLike) -> HalfInteger:
    return j if isinstance(j, HalfInteger) else HalfInteger.of(j)


@lru_cache(maxsize=None)
def _kernel_coefficients(tj: int):
    """Angular-independent parts of the spin-j kernel.

    Returns a list of (j3, m3, C) with C[m_index, s1_index, s2_index] holding
    (2j3+1)^2 * phase * 3j(j j j3; m -m 0) * 3j(j j j3; s1 -s2 m3).
    """
    ms = projections(HalfInteger(tj))
    out = []
    for tj3 in range(0, 2 * tj + 1, 2):
        j3 = HalfInteger(tj3)
        first = np.array([wigner_3j(HalfInteger(tj), HalfInteger(tj), j3, m, -m, 0) for m in ms])
        phase_m = np.array([(-1) ** ((tj - m.twice_value) // 2) for m in ms])
        for tm3 in range(-tj3, tj3 + 1, 2):
            m3 = HalfInteger(tm3)
            second = np.zeros((len(ms), len(ms)))
            for a, s1 in enumerate(ms):
                for b, s2 in enumerate(ms):
                    # (-1)^(j - s'') column phase; see KERNEL_EULER_CONVENTION
                    sign = (-1) ** ((tj - s2.twice_value) // 2)
                    second[a, b] = sign * wigner_3j(HalfInteger(tj), HalfInteger(tj), j3, s1, -s2, m3)
            if not second.any():
                continue
            coeff = (tj3 + 1) ** 2 * np.einsum("m,ab->mab", phase_m * first, second)
            out.append((j3, m3, coeff))
    return out


def _gamma_averaged_D(j3: HalfInteger, m3: HalfInteger, theta: float, phi: float) -> complex:
    """int_0^{2 pi} D^{(j3)}_{0 m3}(phi, theta, gamma) dgamma / (8 pi^2), done analytically."""
    if KERNEL_EULER_CONVENTION == PASSIVE:
        # conj(e^{-i m3 phi} d_{m3 0}(theta)); no gamma dependence
        return wigner_D(j3, 0, m3, phi, theta, 0.0, PASSIVE) * (2 * np.pi) / (8 * np.pi ** 2)
    # active: exp(-i m3 gamma) averages to zero unless m3 = 0
    if m3.twice_value != 0:
        return 0.0
    return wigner_D(j3, 0, m3, phi, theta, 0.0, KERNEL_EULER_CONVENTION) * (2 * np.pi) / (8 * np.pi ** 2)


def spin_j_kernel_all(j: HalfLike, direction) -> np.ndarray:
    """Kernels K(m, theta, phi) for every m, shape (2j+1, 2j+1, 2j+1), m = j..-j first."""
    j = _as_half(j)
    theta, phi = _angles(direction)
    n = j.twice_value + 1
    out = np.zeros((n, n, n), dtype=complex)
    for j3, m3, coeff in _kernel_coefficients(j.twice_value):
        d = _gamma_averaged_D(j3, m3, theta, phi)
        if d != 0:
            out += d * coeff
    return out


def spin_j_kernel(j: HalfLike, m: HalfLike, direction) -> np.ndarray:
    """The (2j+1)x(2j+1) kernel K(m, theta, phi) pairing with the m-outcome tomogram."""
    j = _as_half(j)
    tm = twice(m)
    if abs(tm) > j.twice_value or (j.twice_value - tm) % 2:
        raise ValueError(f"projection m={HalfInteger(tm)} out of range for j={j}")
    index = (j.twice_value - tm) // 2
    return spin_j_kernel_all(j, direction)[index]


def rotated_basis(j: HalfLike, direction) -> np.ndarray:
    """Columns R(theta, phi)|m> for m = j..-j (third Euler angle fixed to 0)."""
    theta, phi = _angles(direction)
    return wigner_D_matrix(j, phi, theta, 0.0)


def spin_j_tomogram(rho, j: HalfLike, quad: SphereQuadrature) -> SpinTomogramGrid:
    """Tr(R|m><m|R^dagger rho) at every quadrature node and every m."""
    j = _as_half(j)
    rho = as_matrix(rho)
    n = j.twice_value + 1
    if rho.shape[0] != n:
        raise DimensionError(f"state has dim {rho.shape[0]}, spin {j} needs {n}")
    rows = []
    for theta, phi, _ in quad.nodes():
        r = rotated_basis(j, (theta, phi))
        rows.append(np.real(np.einsum("im,ij,jm->m", r.conj(), rho, r)))
    return SpinTomogramGrid(j, quad, np.array(rows))


def spin_j_tomogram_at(rho, j: HalfLike, directions: Sequence) -> np.ndarray:
    """Tomogram rows for arbitrary directions, shape (len(directions), 2j+1)."""
    rho = as_matrix(rho)
    out = []
    for d in directions:
        r = rotated_basis(j, d)
        out.append(np.real(np.einsum("im,ij,jm->m", r.conj(), rho, r)))
    return np.array(out)


def default_spin_quadrature(j: HalfLike) -> SphereQuadrature:
    n = 8 * (twice(j) + 1)
    return SphereQuadrature.gauss(n, n)


def spin_j_reconstruct(grid: SpinTomogramGrid, threads: int = 1) -> SpinReconstruction:
    """rho = sum_m int dOmega W(m, theta, phi) K(m, theta, phi) by quadrature.

    The node sum is an ordered chunked reduction, so ``threads`` does not
    change the result.
    """
    j = grid.j
    n = j.twice_value + 1
    warnings = []
    n_theta, n_phi = grid.quad.shape
    # integrand: harmonics up to degree 2j from each factor
    if n_theta < 2 * j.twice_value + 1 or n_phi < 2 * j.twice_value + 1:
        warnings.append(
            f"quadrature {n_theta}x{n_phi} under-resolves spin {j}: need at least "
            f"{2 * j.twice_value + 1} nodes per angle, default {8 * n}"
        )
    items = list(zip(grid.quad.nodes(), grid.values))

    def term(item):
        (theta, phi, w), row = item
        return w * np.einsum("m,mab->ab", row, spin_j_kernel_all(j, (theta, phi)))

    return SpinReconstruction(ordered_sum(term, items, threads), warnings)


def gamma_invariance_residual(j: HalfLike, direction, gamma: float) -> float:
    """Max change of the rotated projectors R|m><m|R^dagger when gamma is switched on."""
    theta, phi = _angles(direction)
    r0 = wigner_D_matrix(j, phi, theta, 0.0)
    r1 = wigner_D_matrix(j, phi, theta, gamma)
    p0 = np.einsum("im,jm->mij", r0, r0.conj())
    p1 = np.einsum("im,jm->mij", r1, r1.conj())
    return float(np.max(np.abs(p0 - p1)))


def spin_j_identity_residual(j: HalfLike, quad: SphereQuadrature) -> float:
    """Max deviation from identity of A -> sum_m int K(m) Tr(R|m><m|R^dagger A)."""
    j = _as_half(j)
    n = j.twice_value + 1
    sup = np.zeros((n * n, n * n), dtype=complex)
    for theta, phi, w in quad.nodes():
        r = rotated_basis(j, (theta, phi))
        proj = np.einsum("im,jm->mij", r, r.conj())
        kern = spin_j_kernel_all(j, (theta, phi))
        sup += w * _superoperator(kern, proj, np.ones(n))
    return float(np.max(np.abs(sup - np.eye(n * n))))


def equivalent_kernel(direction, coefficient: complex, matrix=None) -> np.ndarray:
    """Spin-1/2 kernel plus coefficient * (3 cos^2 theta - 1) * matrix.

    The added term is a degree-2 spherical harmonic and is orthogonal to every
    tomogram Tr(P(theta, phi) A), so reconstructions do not change.
    """
    theta, _ = _angles(direction)
    matrix = np.eye(2) if matrix is None else as_matrix(matrix)
    return spin_half_kernel(direction) + coefficient * (3 * np.cos(theta) ** 2 - 1) * matrix


def reconstruct_with_kernel(kernel: Callable, tomogram_values: np.ndarray, quad: SphereQuadrature) -> np.ndarray:
    theta, phi, w = _grid_arrays(quad)
    values = np.asarray(tomogram_values).ravel()
    return sum(wk * vk * kernel((t, p)) for t, p, wk, vk in zip(theta, phi, w, values))
