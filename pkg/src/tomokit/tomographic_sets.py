"""Tomographic sets of rank-one projectors and their Gram-Schmidt dual kernels.

A set {P_k} of n^2 projectors is *minimal* when the vectors |P_k> span
B(C^n).  Orthonormalizing them, |V_j> = sum_k gamma_jk |P_k>, gives the dual
operators K_l = sum_{j,k} conj(gamma_jl) gamma_jk P_k with
sum_l K_l Tr(P_l A) = A for every operator A.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .operator_space import (
    DimensionError,
    PROJECTOR_TOL,
    RankOneProjector,
    as_matrix,
    mat_to_vec,
    projector_from_vector,
)

RANK_RTOL = 1e-10
SKEW_TOL = 1e-10


class RankDeficientError(ValueError):
    def __init__(self, rank: int, expected: int):
        super().__init__(f"projector vectors have numerical rank {rank}, need {expected}")
        self.rank = rank
        self.expected = expected


@dataclass(frozen=True)
class TomographicSet:
    dim: int
    projectors: tuple[RankOneProjector, ...]
    labels: tuple[Hashable, ...] = None

    def __post_init__(self):
        projectors = tuple(self.projectors)
        labels = tuple(range(len(projectors))) if self.labels is None else tuple(self.labels)
        if len(labels) != len(projectors):
            raise ValueError(f"{len(labels)} labels for {len(projectors)} projectors")
        for k, p in enumerate(projectors):
            if p.dim != self.dim:
                raise DimensionError(f"projector {k} has dim {p.dim}, set has dim {self.dim}")
        object.__setattr__(self, "projectors", projectors)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_vectors(cls, vectors, labels=None) -> "TomographicSet":
        projectors = [projector_from_vector(v) for v in vectors]
        if not projectors:
            raise ValueError("cannot infer dimension of an empty set; use the constructor")
        return cls(projectors[0].dim, projectors, labels)

    def __len__(self) -> int:
        return len(self.projectors)

    def vector_matrix(self) -> np.ndarray:
        """n^2 x N matrix whose columns are mat_to_vec(P_k)."""
        if not self.projectors:
            return np.zeros((self.dim ** 2, 0), dtype=complex)
        return np.stack([mat_to_vec(p.matrix) for p in self.projectors], axis=1)

    def matrices(self) -> np.ndarray:
        return np.array([p.matrix for p in self.projectors]).reshape(len(self), self.dim, self.dim)

    def subset(self, indices: Sequence[int]) -> "TomographicSet":
        return TomographicSet(self.dim, [self.projectors[i] for i in indices],
                              [self.labels[i] for i in indices])


@dataclass(frozen=True)
class GramKernel:
    gamma: np.ndarray
    duals: np.ndarray  # shape (n^2, n, n)
    labels: tuple = field(default=())

    @property
    def dim(self) -> int:
        return self.duals.shape[1]


@dataclass(frozen=True)
class Tomogram:
    set: TomographicSet
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if values.size != len(self.set):
            raise ValueError(f"{values.size} values for a set of {len(self.set)} projectors")
        object.__setattr__(self, "values", values)

    def formatted_values(self) -> list[float]:
        # tiny negatives from rounding are shown as 0; never applied internally
        return [0.0 if -1e-12 <= v < 0 else float(v) for v in self.values]


@dataclass(frozen=True)
class MinimalityReport:
    minimal: bool
    rank: int
    condition_number: float


def numerical_rank(m: np.ndarray, rtol: float = RANK_RTOL) -> int:
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def tomogram(rho, tset: TomographicSet) -> Tomogram:
    """Values Re Tr(P_k rho) for every projector of the set."""
    rho = as_matrix(rho)
    if rho.shape[0] != tset.dim:
        raise DimensionError(f"state has dim {rho.shape[0]}, set has dim {tset.dim}")
    if len(tset) == 0:
        return Tomogram(tset, np.zeros(0))
    vecs = np.array([p.vector for p in tset.projectors])
    values = np.real(np.einsum("ki,ij,kj->k", vecs.conj(), rho, vecs))
    return Tomogram(tset, values)


def is_minimal_tomographic_set(tset: TomographicSet) -> MinimalityReport:
    expected = tset.dim ** 2
    if len(tset) < expected:
        raise ValueError(f"too few projectors: {len(tset)} < n^2 = {expected}")
    if len(tset) > expected:
        raise ValueError(f"too many projectors: {len(tset)} > n^2 = {expected}; "
                         "use select_minimal_subset")
    s = np.linalg.svd(tset.vector_matrix(), compute_uv=False)
    rank = int(np.sum(s > RANK_RTOL * s[0])) if s[0] > 0 else 0
    cond = float(s[0] / s[-1]) if s[-1] > 0 else float("inf")
    return MinimalityReport(rank == expected, rank, cond)


def _orthonormalize(columns: np.ndarray, rtol: float = RANK_RTOL):
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Returns (V, gamma) with V[:, j] = sum_k gamma[j, k] columns[:, k] and
    orthonormal columns V.  Raises RankDeficientError on a dependent column.
    """
    dim, count = columns.shape
    v = np.zeros((dim, count), dtype=complex)
    gamma = np.zeros((count, count), dtype=complex)
    scale = max(np.linalg.norm(columns, axis=0).max(), 1e-300)
    for j in range(count):
        w = columns[:, j].copy()
        coeff = np.zeros(count, dtype=complex)
        coeff[j] = 1.0
        for _ in range(2):
            for i in range(j):
                c = np.vdot(v[:, i], w)
                w -= c * v[:, i]
                coeff -= c * gamma[i]
        norm = np.linalg.norm(w)
        if norm <= rtol * scale:
            raise RankDeficientError(numerical_rank(columns, rtol), count)
        v[:, j] = w / norm
        gamma[j] = coeff / norm
    return v, gamma


def gram_schmidt(tset: TomographicSet) -> GramKernel:
    """Orthonormalize the projector vectors (label order) and build the dual kernel."""
    expected = tset.dim ** 2
    if len(tset) != expected:
        is_minimal_tomographic_set(tset)  # raises with the too few / too many message
    _, gamma = _orthonormalize(tset.vector_matrix())
    # K_l = sum_k (gamma^dagger gamma)_{lk} P_k
    coeffs = gamma.conj().T @ gamma
    duals = np.einsum("lk,kij->lij", coeffs, tset.matrices())
    return GramKernel(gamma, duals, tset.labels)


def identity_check(kernel: GramKernel, tset: TomographicSet) -> float:
    """Frobenius norm of sum_l |K_l><P_l| - I on B(C^n)."""
    if kernel.dim != tset.dim or len(kernel.duals) != len(tset):
        raise DimensionError("kernel and set do not match")
    k = np.stack([mat_to_vec(d) for d in kernel.duals], axis=1)
    resolution = k @ tset.vector_matrix().conj().T
    return float(np.linalg.norm(resolution - np.eye(tset.dim ** 2)))


def reconstruct(tom: Tomogram, kernel: GramKernel) -> np.ndarray:
    """sum_l K_l * W_l."""
    if tom.values.size != len(kernel.duals):
        raise ValueError(f"{tom.values.size} tomogram values for {len(kernel.duals)} duals")
    return np.tensordot(tom.values, kernel.duals, axes=(0, 0))


def set_from_unitary_family(p0, unitaries: Sequence, labels=None) -> TomographicSet:
    """Projectors U P0 U^dagger for each U in the family."""
    if not isinstance(p0, RankOneProjector):
        p0 = projector_from_vector(p0)
    projectors = []
    for k, u in enumerate(unitaries):
        u = as_matrix(u)
        if u.shape[0] != p0.dim:
            raise DimensionError(f"unitary {k} has dim {u.shape[0]}, projector has dim {p0.dim}")
        if np.max(np.abs(u.conj().T @ u - np.eye(p0.dim))) > PROJECTOR_TOL:
            raise ValueError(f"family member {k} is not unitary")
        projectors.append(RankOneProjector(u @ p0.vector))
    labels = list(range(len(projectors))) if labels is None else labels
    return TomographicSet(p0.dim, projectors, labels)


def _su2_entries(u, name: str) -> tuple[complex, complex]:
    u = as_matrix(u)
    if u.shape != (2, 2):
        raise ValueError(f"{name} must be 2x2, got {u.shape}")
    if np.max(np.abs(u.conj().T @ u - np.eye(2))) > PROJECTOR_TOL:
        raise ValueError(f"{name} is not unitary")
    a, b = u[0, 0], u[0, 1]
    if abs(u[1, 0] + np.conj(b)) > PROJECTOR_TOL or abs(u[1, 1] - np.conj(a)) > PROJECTOR_TOL:
        raise ValueError(f"{name} is not of the form [[a, b], [-b*, a*]]")
    return a, b


@dataclass(frozen=True)
class SkewReport:
    skew: bool
    determinant_value: float


def skew_pair_check(u1, u2) -> SkewReport:
    """Im(a1 b1 conj(a2 b2)) for two SU(2) matrices [[a, b], [-b*, a*]]."""
    a1, b1 = _su2_entries(u1, "U1")
    a2, b2 = _su2_entries(u2, "U2")
    value = float(np.imag(a1 * b1 * np.conj(a2 * b2)))
    return SkewReport(abs(value) > SKEW_TOL, value)


def six_projector_set(u1, u2) -> TomographicSet:
    """Standard basis of C^2 plus its images under U1 and U2 (six projectors)."""
    e = np.eye(2, dtype=complex)
    u1, u2 = as_matrix(u1), as_matrix(u2)
    vectors = [e[0], e[1], u1 @ e[0], u1 @ e[1], u2 @ e[0], u2 @ e[1]]
    labels = [("e", 0), ("e", 1), ("U1", 0), ("U1", 1), ("U2", 0), ("U2", 1)]
    return TomographicSet(2, [RankOneProjector(v) for v in vectors], labels)


def select_minimal_subset(tset: TomographicSet, rtol: float = RANK_RTOL) -> TomographicSet:
    """Greedy pivoted choice of n^2 linearly independent projectors.

    Walks the set in a column-pivoted order (largest residual first) and keeps
    a projector whenever it is independent of those already kept.
    """
    expected = tset.dim ** 2
    m = tset.vector_matrix()
    remaining = list(range(m.shape[1]))
    basis = np.zeros((m.shape[0], 0), dtype=complex)
    chosen: list[int] = []
    scale = np.linalg.norm(m, axis=0).max() if m.size else 0.0
    while remaining and len(chosen) < expected:
        resid = m[:, remaining] - basis @ (basis.conj().T @ m[:, remaining])
        norms = np.linalg.norm(resid, axis=0)
        best = int(np.argmax(norms))
        if norms[best] <= rtol * scale:
            break
        idx = remaining.pop(best)
        chosen.append(idx)
        basis = np.column_stack([basis, resid[:, best] / norms[best]])
    if len(chosen) < expected:
        raise RankDeficientError(len(chosen), expected)
    return tset.subset(sorted(chosen))


def povm_check(tset: TomographicSet, weights) -> float:
    """Frobenius norm of sum_mu w_mu P_mu - I."""
    weights = np.asarray(weights, dtype=float).ravel()
    if weights.size != len(tset):
        raise ValueError(f"{weights.size} weights for {len(tset)} projectors")
    total = np.zeros((tset.dim, tset.dim), dtype=complex)
    if len(tset):
        total = np.tensordot(weights, tset.matrices(), axes=(0, 0))
    return float(np.linalg.norm(total - np.eye(tset.dim)))


def random_minimal_set(n: int, rng: np.random.Generator, max_condition: float = 1e6,
                       max_tries: int = 1000) -> TomographicSet:
    """n^2 Haar-random projectors, resampled until the condition number is below max_condition."""
    for _ in range(max_tries):
        vecs = rng.standard_normal((n * n, n)) + 1j * rng.standard_normal((n * n, n))
        tset = TomographicSet.from_vectors(vecs)
        report = is_minimal_tomographic_set(tset)
        if report.minimal and report.condition_number < max_condition:
            return tset
    raise RuntimeError(f"no well-conditioned minimal set found in {max_tries} draws")


def mutually_unbiased_projectors(n: int, bases: int = 3) -> TomographicSet:
    """Standard basis plus the quadratic-phase Fourier bases.

    Basis b >= 1 has vectors exp(2 pi i ((b-1) k^2 + j k)/n)/sqrt(n).  For an
    odd prime n any collection of these is mutually unbiased.  Since every
    basis resolves the identity, ``bases`` of them span at most
    bases*(n-1) + 1 operator dimensions.
    """
    if bases < 1 or bases > n + 1:
        raise ValueError(f"bases must be in [1, {n + 1}]")
    vectors, labels = [], []
    for j in range(n):
        v = np.zeros(n, dtype=complex)
        v[j] = 1
        vectors.append(v)
        labels.append((0, j))
    k = np.arange(n)
    for b in range(1, bases):
        for j in range(n):
            v = np.exp(2j * np.pi * ((b - 1) * k * k + j * k) / n) / np.sqrt(n)
            vectors.append(v)
            labels.append((b, j))
    return TomographicSet.from_vectors(vectors, labels)
