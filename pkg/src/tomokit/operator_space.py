"""Operators on C^n viewed as vectors of the Hilbert space B(C^n).

Matrices are ordinary complex ``numpy`` arrays.  :class:`OperatorMatrix` is a
validated container used at I/O boundaries and wherever a Hermiticity flag is
worth carrying around; every function here accepts either form.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

HERMITIAN_TOL = 1e-12
PROJECTOR_TOL = 1e-10


class DimensionError(ValueError):
    """Operands live in spaces of different dimension."""


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a square complex array (accepts OperatorMatrix)."""
    if isinstance(a, OperatorMatrix):
        return a.entries
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    hermitian_hint: bool = False

    def __post_init__(self):
        arr = np.array(self.entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValueError(f"operator entries must be a non-empty n x n array, got shape {arr.shape}")
        if self.hermitian_hint and hermiticity_residual(arr) > HERMITIAN_TOL:
            raise ValueError("hermitian_hint set on a non-Hermitian matrix")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def hermitian(cls, entries) -> "OperatorMatrix":
        """Wrap ``entries``, setting the hint only if they really are Hermitian."""
        arr = np.asarray(entries, dtype=complex)
        return cls(arr, hermiticity_residual(arr) <= HERMITIAN_TOL)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


@dataclass(frozen=True)
class RankOneProjector:
    """P = |v><v| for a unit vector v."""

    vector: np.ndarray
    matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.array(self.vector, dtype=complex).ravel()
        if abs(np.linalg.norm(v) - 1.0) > HERMITIAN_TOL:
            raise ValueError("projector vector must be normalized; use projector_from_vector")
        m = np.outer(v, v.conj())
        v.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "vector", v)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.vector.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@dataclass(frozen=True)
class BlochPoint:
    """Coordinates of a Hermitian operator in the generator basis (see generator_basis)."""

    coeffs: np.ndarray

    @property
    def trace_part(self) -> float:
        return float(self.coeffs[0])

    @property
    def vector(self) -> np.ndarray:
        return self.coeffs[1:]


def hermiticity_residual(a) -> float:
    a = as_matrix(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt scalar product Tr(A^dagger B)."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"incompatible operands: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def mat_to_vec(a) -> np.ndarray:
    """Row-major flattening A -> (a_11, a_12, ..., a_nn)."""
    return as_matrix(a).reshape(-1).copy()


def vec_to_mat(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    n = int(round(np.sqrt(v.size)))
    if n * n != v.size or n == 0:
        raise ValueError(f"length {v.size} is not a perfect square")
    return v.reshape(n, n).copy()


@lru_cache(maxsize=64)
def _generator_basis(n: int) -> np.ndarray:
    # identity, symmetric, antisymmetric, then diagonal generalized Gell-Mann
    # matrices, each rescaled so that Tr(tau_j tau_k) = n delta_jk
    mats = [np.eye(n, dtype=complex)]
    scale = np.sqrt(n / 2)
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = m[k, j] = 1
            mats.append(scale * m)
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k], m[k, j] = -1j, 1j
            mats.append(scale * m)
    for l in range(1, n):
        diag = np.zeros(n)
        diag[:l] = 1
        diag[l] = -l
        mats.append(scale * np.sqrt(2 / (l * (l + 1))) * np.diag(diag).astype(complex))
    basis = np.array(mats)
    basis.setflags(write=False)
    return basis


def generator_basis(n: int) -> np.ndarray:
    """Orthogonal Hermitian basis tau_1 = I, tau_k traceless, Tr(tau_j tau_k) = n delta_jk.

    For n = 2 this is (I, sigma_x, sigma_y, sigma_z).  Returned as an array of
    shape (n*n, n, n).
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    return _generator_basis(n)


def hermitian_basis_decompose(a) -> np.ndarray:
    """Coefficients alpha with A = sum_k alpha_k tau_k in the generator basis.

    The coefficients are real exactly when A is Hermitian.
    """
    a = as_matrix(a)
    n = a.shape[0]
    basis = generator_basis(n)
    return np.einsum("kij,ji->k", basis, a) / n


def hermitian_basis_compose(coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs)
    n = int(round(np.sqrt(coeffs.size)))
    if n * n != coeffs.size:
        raise ValueError(f"{coeffs.size} coefficients do not match any dimension")
    return np.tensordot(coeffs, generator_basis(n), axes=(0, 0))


def projector_from_vector(v) -> RankOneProjector:
    v = np.asarray(v, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if v.size == 0 or norm == 0:
        raise ValueError("cannot build a projector from the zero vector")
    return RankOneProjector(v / norm)


def bloch_coordinates(p) -> BlochPoint:
    """Generator-basis coordinates of a projector; the first one is always 1/n."""
    m = p.matrix if isinstance(p, RankOneProjector) else as_matrix(p)
    return BlochPoint(np.real(hermitian_basis_decompose(m)))


def random_density_matrix(n: int, seed: int | None = None, rng: np.random.Generator | None = None) -> np.ndarray:
    """Full-rank random state G G^dagger / Tr(G G^dagger) with G complex Ginibre."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    rng = rng if rng is not None else np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_pure_state(n: int, seed: int | None = None, rng: np.random.Generator | None = None) -> np.ndarray:
    rng = rng if rng is not None else np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def random_hermitian(n: int, seed: int | None = None, rng: np.random.Generator | None = None) -> np.ndarray:
    rng = rng if rng is not None else np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (g + g.conj().T)


def random_unitary(n: int, seed: int | None = None, rng: np.random.Generator | None = None) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    rng = rng if rng is not None else np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    Negative eigenvalues (reconstruction noise) are clipped to zero first.
    """
    rho, sigma = as_matrix(rho), as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise DimensionError(f"incompatible operands: {rho.shape} vs {sigma.shape}")
    sr = _psd_sqrt(rho)
    inner = sr @ _psd_sqrt(sigma) @ _psd_sqrt(sigma) @ sr
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    return float(np.sum(np.sqrt(np.clip(w, 0, None))) ** 2)
