"""Photon-number tomography in a truncated Fock space.

Matrix elements of D(alpha) and of T(alpha, s) = D(alpha) q_s^{a^dagger a} D(alpha)^dagger
are evaluated from closed forms, so every entry that is computed is the exact
infinite-dimensional matrix element; truncation only decides which entries
are kept.  This matters for T when |q| > 1, where D t^N D^dagger built from
truncated matrices does not converge.

Kernel normalization: the operators K^(s)(n, alpha) used here are

    K^(s)(n, alpha) = 4/(1 - s^2) * q_s^n * T(alpha, -s),   q_s = (s+1)/(s-1),

which satisfy rho = sum_n int d^2alpha/pi W(n, alpha) K^(s)(n, alpha).  At s = 0
this is 4 (-1)^n D(alpha) Pi D(alpha)^dagger with Pi the parity operator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .operator_space import DimensionError, as_matrix
from .parallel import ordered_sum
from .special_functions import gauss_legendre, uniform_periodic

LOG_OVERFLOW = math.log(1e300)
DEFAULT_NMAX = 32
DEFAULT_RADIUS = 4.0
DEFAULT_NODES = 24


@dataclass(frozen=True)
class FockSpace:
    """States |0>..|nmax>."""

    nmax: int

    def __post_init__(self):
        if int(self.nmax) != self.nmax or self.nmax < 1:
            raise ValueError(f"nmax must be an integer >= 1, got {self.nmax}")

    @property
    def dim(self) -> int:
        return self.nmax + 1

    def annihilation(self) -> np.ndarray:
        return np.diag(np.sqrt(np.arange(1, self.dim)), 1).astype(complex)

    def number(self) -> np.ndarray:
        return np.diag(np.arange(self.dim)).astype(complex)

    def parity(self) -> np.ndarray:
        return np.diag((-1.0) ** np.arange(self.dim)).astype(complex)

    def basis_state(self, n: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[n] = 1
        return v

    def coherent_state(self, alpha: complex) -> np.ndarray:
        """Truncated coherent state, renormalized on the truncated space."""
        n = np.arange(self.dim)
        logc = -0.5 * abs(alpha) ** 2 - 0.5 * gammaln(n + 1)
        v = np.exp(logc) * np.power(complex(alpha), n)
        return v / np.linalg.norm(v)

    def embed(self, rho) -> np.ndarray:
        rho = as_matrix(rho)
        if rho.shape[0] > self.dim:
            raise DimensionError(f"state of dim {rho.shape[0]} does not fit in nmax={self.nmax}")
        out = np.zeros((self.dim, self.dim), dtype=complex)
        k = rho.shape[0]
        out[:k, :k] = rho
        return out


def _displacement_rect(alpha: complex, rows: int, cols: int) -> np.ndarray:
    """<m|D(alpha)|n> for m < rows, n < cols."""
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    m = np.arange(rows)[:, None]
    n = np.arange(cols)[None, :]
    lo, hi = np.minimum(m, n), np.maximum(m, n)
    diff = hi - lo
    lag = eval_genlaguerre(lo, diff, x)
    mag = 0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) - 0.5 * x
    # alpha^{m-n} for m >= n, (-alpha^*)^{n-m} otherwise
    base = np.where(m >= n, alpha, -np.conj(alpha))
    with np.errstate(invalid="ignore"):
        powers = np.where(diff == 0, 1.0, base ** diff)
    return np.exp(mag) * powers * lag


@dataclass
class DisplacementResult:
    matrix: np.ndarray
    unitarity_residual: float


def displacement_matrix(alpha: complex, space: FockSpace, with_metadata: bool = False):
    """Truncated displacement operator from the Laguerre closed form.

    With ``with_metadata`` the Frobenius norm of D^dagger D - I is returned
    alongside, as a measure of how much of D the truncation cuts off.
    """
    d = _displacement_rect(alpha, space.dim, space.dim)
    if not with_metadata:
        return d
    resid = float(np.linalg.norm(d.conj().T @ d - np.eye(space.dim)))
    return DisplacementResult(d, resid)


def q_factor(s: float) -> float:
    """(s+1)/(s-1), negative on the open interval (-1, 1)."""
    _check_s(s)
    return (s + 1) / (s - 1)


def _check_s(s: float) -> None:
    if not -1 < s < 1:
        raise ValueError(f"s={s} outside the open interval (-1, 1)")


def _t_closed(alpha: complex, t: float, dim: int) -> np.ndarray:
    """<m|D(alpha) t^N D(alpha)^dagger|n> for real t, exact entries.

    With lam = t-1, A = -lam alpha, B = conj(A):
        <m|T|n> = sqrt(n!/m!) e^{lam|alpha|^2} A^{m-n} t^n L_n^{(m-n)}(-|A|^2/t),  m >= n,
    and T is Hermitian.  The Laguerre argument has a fixed sign, so there is
    no cancellation in the sum.
    """
    alpha = complex(alpha)
    lam = t - 1.0
    a_coef = -lam * alpha
    x = -abs(a_coef) ** 2 / t
    m = np.arange(dim)[:, None]
    n = np.arange(dim)[None, :]
    lower = m >= n
    mm, nn = np.where(lower, m, n), np.where(lower, n, m)
    diff = mm - nn
    lag = eval_genlaguerre(nn, diff, x)
    log_mag = 0.5 * (gammaln(nn + 1) - gammaln(mm + 1)) + lam * abs(alpha) ** 2 + nn * math.log(abs(t))
    if abs(a_coef) > 0:
        log_mag = log_mag + diff * math.log(abs(a_coef))
        phase = np.exp(1j * diff * np.angle(a_coef))
    else:
        log_mag = np.where(diff == 0, log_mag, -np.inf)
        phase = np.ones_like(log_mag, dtype=complex)
    sign_t = np.where(nn % 2 == 1, np.sign(t), 1.0)
    low = np.exp(log_mag) * phase * sign_t * lag
    return np.where(lower, low, np.conj(low.T))


def t_operator(alpha: complex, s: float, space: FockSpace) -> np.ndarray:
    """T(alpha, s) = D(alpha) q_s^{a^dagger a} D(alpha)^dagger on the truncated space."""
    return _t_closed(alpha, q_factor(s), space.dim)


def _log_prefactor_bound(s: float, n: int) -> float:
    return n * math.log(abs(q_factor(s))) + math.log(4 / (1 - s * s))


def _guard(s: float, nmax: int) -> None:
    if _log_prefactor_bound(s, nmax) > LOG_OVERFLOW:
        # |q_s| grows without bound as s -> 1
        s_max = math.tanh(LOG_OVERFLOW / (2 * nmax)) if nmax else 1.0
        raise OverflowError(
            f"|q_s|^n overflows for s={s} at n={nmax}; use s <= {s_max:.6f} or a smaller cutoff"
        )


def photon_kernel(n: int, alpha: complex, s: float, space: FockSpace) -> np.ndarray:
    """K^(s)(n, alpha) = 4/(1-s^2) q_s^n T(alpha, -s)."""
    _check_s(s)
    if not 0 <= n <= space.nmax:
        raise ValueError(f"n={n} outside [0, {space.nmax}]")
    _guard(s, n)
    return 4 / (1 - s * s) * q_factor(s) ** n * t_operator(alpha, -s, space)


def photon_tomogram(rho, n: int, alpha: complex, space: FockSpace) -> float:
    """<n|D(alpha)^dagger rho D(alpha)|n>."""
    rho = as_matrix(rho)
    if rho.shape[0] != space.dim:
        raise DimensionError(f"rho has dim {rho.shape[0]}, space has {space.dim}")
    if not 0 <= n <= space.nmax:
        raise ValueError(f"n={n} outside [0, {space.nmax}]")
    col = _displacement_rect(alpha, space.dim, n + 1)[:, n]
    return float(np.real(np.vdot(col, rho @ col)))


@dataclass(frozen=True)
class PolarGrid:
    """Gauss-Legendre in r on [0, R] with the r dr Jacobian folded in, uniform in angle."""

    radius: float = DEFAULT_RADIUS
    n_radial: int = DEFAULT_NODES
    n_angular: int = DEFAULT_NODES

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def radial(self) -> tuple[np.ndarray, np.ndarray]:
        rule = gauss_legendre(self.n_radial, 0.0, self.radius)
        return rule.nodes, rule.weights * rule.nodes

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Complex alpha nodes and weights for int d^2 alpha (not yet divided by pi)."""
        r, wr = self.radial()
        ang = uniform_periodic(self.n_angular)
        alphas = (r[:, None] * np.exp(1j * ang.nodes[None, :])).ravel()
        weights = (wr[:, None] * ang.weights[None, :]).ravel()
        return alphas, weights


@dataclass(frozen=True)
class PhotonTomogram:
    space: FockSpace  # outcomes n = 0..space.nmax (the n cutoff)
    grid: PolarGrid
    values: np.ndarray  # shape (ncut + 1, number of alpha nodes)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        expected = (self.space.dim, self.grid.n_radial * self.grid.n_angular)
        if values.shape != expected:
            raise ValueError(f"values shape {values.shape}, expected {expected}")
        object.__setattr__(self, "values", values)

    @property
    def ncut(self) -> int:
        return self.space.nmax

    def alphas(self) -> np.ndarray:
        return self.grid.nodes()[0]


def photon_tomogram_grid(rho, ncut: int = DEFAULT_NMAX, grid: PolarGrid | None = None) -> PhotonTomogram:
    """W(n, alpha) for n = 0..ncut at every grid node.

    ``rho`` may live on any number of Fock levels; only the displacement
    entries <k|D|n> with k < dim(rho) are needed, and those are exact.
    """
    grid = grid or PolarGrid()
    rho = as_matrix(rho)
    k = rho.shape[0]
    alphas, _ = grid.nodes()
    values = np.empty((ncut + 1, alphas.size))
    for i, a in enumerate(alphas):
        d = _displacement_rect(a, k, ncut + 1)
        values[:, i] = np.real(np.einsum("in,ij,jn->n", d.conj(), rho, d))
    return PhotonTomogram(FockSpace(ncut), grid, values)


@dataclass
class PhotonReconstruction:
    matrix: np.ndarray
    warnings: list[str] = field(default_factory=list)
    # 1 - sum_n W(n, alpha), worst node: probability beyond the n cutoff
    number_truncation: float = 0.0
    # 1 - int Q d^2 alpha over the grid: weight outside the radius
    radial_truncation: float = 0.0


def photon_reconstruct(tom: PhotonTomogram, s: float, nmax: int = 8,
                       loss_warning: float = 1e-3, threads: int = 1) -> PhotonReconstruction:
    """rho = sum_n sum_nodes (w/pi) W(n, alpha) K^(s)(n, alpha) on |0>..|nmax>.

    The n-sum only involves the scalar q_s^n, so it is done first; one T
    matrix per grid node remains.
    """
    _check_s(s)
    _guard(s, tom.ncut)
    alphas, weights = tom.grid.nodes()
    n = np.arange(tom.space.dim)
    log_q = np.log(abs(q_factor(s)))
    qn = np.exp(n * log_q) * np.where(n % 2, -1.0, 1.0)
    scalars = (weights / np.pi) * (4 / (1 - s * s)) * (qn @ tom.values)
    t_minus = q_factor(-s)
    dim = nmax + 1
    rho = ordered_sum(lambda ca: ca[0] * _t_closed(ca[1], t_minus, dim),
                      list(zip(scalars, alphas)), threads)
    rho = 0.5 * (rho + rho.conj().T)

    warnings = []
    number_loss = float(np.max(1 - tom.values.sum(axis=0)))
    radial_loss = float(1 - np.sum(weights * tom.values[0]) / np.pi)
    if number_loss > loss_warning:
        warnings.append(f"tomogram cutoff n<={tom.ncut} misses up to {number_loss:.2e} probability")
    if radial_loss > loss_warning:
        warnings.append(
            f"grid radius {tom.grid.radius} misses an estimated {radial_loss:.2e} of the Q-function"
        )
    return PhotonReconstruction(rho, warnings, number_loss, radial_loss)


# --------------------------------------------------------------------------
# position representation

def hermite_functions(nmax: int, x) -> np.ndarray:
    """psi_0..psi_nmax at x, shape (nmax+1, *x.shape), by the normalized recurrence."""
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = np.pi ** -0.25 * np.exp(-x * x / 2)
    if nmax >= 1:
        out[1] = np.sqrt(2) * x * out[0]
    for k in range(2, nmax + 1):
        out[k] = np.sqrt(2 / k) * x * out[k - 1] - np.sqrt((k - 1) / k) * out[k - 2]
    return out


def tau(s: float) -> complex:
    """tau_s = i ln q_s with ln(-x) = ln x - i pi, so tau_0 = pi."""
    q = q_factor(s)
    return 1j * (math.log(-q) - 1j * math.pi)


def mehler_element(x: float, y: float, t: float) -> complex:
    """<x| t^N |y> in closed form, continued to |t| > 1 on the tau branch.

    1/sqrt(pi (1 - t^2)) exp(-((1+t^2)(x^2+y^2) - 4txy) / (2(1-t^2))); the
    prefactor is written as i/sqrt(pi (t^2 - 1)) with the principal root,
    which is what e^{i tau/2}/sqrt(2 pi i sin tau) gives for t = e^{-i tau}.
    """
    gap = t * t - 1
    if abs(gap) < 1e-14:
        raise ValueError("sin(tau) = 0: the position kernel is a distribution here (t = -1)")
    pref = 1j / np.sqrt(complex(np.pi * gap))
    expo = ((1 + t * t) * (x * x + y * y) - 4 * t * x * y) / (2 * gap)
    return complex(pref * np.exp(expo))


def kernel_position_element(x: float, y: float, n: int, alpha: complex, s: float) -> complex:
    """<x|K^(s)(n, alpha)|y> with alpha = (nu - i mu)/sqrt(2).

    D(alpha) translates by nu in position and -mu in momentum, so
    <x|T(alpha, -s)|y> = e^{-i mu (x - y)} M(x - nu, y - nu) with M the Mehler
    kernel of q_{-s}^N.  Raises at s = 0, where sin(tau_{-s}) = 0.
    """
    _check_s(s)
    if n < 0:
        raise ValueError("n must be non-negative")
    nu = math.sqrt(2) * complex(alpha).real
    mu = -math.sqrt(2) * complex(alpha).imag
    t = q_factor(-s)
    core = mehler_element(x - nu, y - nu, t)
    pref = 4 / (1 - s * s) * q_factor(s) ** n
    return pref * np.exp(-1j * mu * (x - y)) * core


def kernel_position_resummed(x: float, y: float, n: int, alpha: complex, s: float,
                             space: FockSpace) -> complex:
    """sum_{m,k <= nmax} psi_m(x) K_{mk} psi_k(y) from the truncated Fock kernel."""
    k = photon_kernel(n, alpha, s, space)
    hx = hermite_functions(space.nmax, x)
    hy = hermite_functions(space.nmax, y)
    return complex(hx @ k @ hy)
