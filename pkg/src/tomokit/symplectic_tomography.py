"""Symplectic tomography on a position grid (hbar = 1).

The tomogram W(X, mu, nu) is the probability density of mu Q + nu P at the
value X.  For the grid computations two choices keep the numbers honest:

* X is stored in units of lambda = sqrt(mu^2 + nu^2): the tomogram at (mu, nu)
  is the unit-direction tomogram stretched by lambda, so a fixed X' grid covers
  every node without truncating the wide ones.
* The chirp e^{i mu q^2 / (2 nu)} becomes very fast for small |nu|.  The wave
  function is resampled (band-limited, by FFT zero padding) onto a grid fine
  enough for each node, and the X-transform is a chirp-z transform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm
from scipy.signal import czt, resample

from .fock_tomography import FockSpace
from .special_functions import gauss_legendre

CHIRP_LIMIT = np.pi / 4
DEFAULT_Q = (-8.0, 8.0, 128)
DEFAULT_X = (6.0, 96)
DEFAULT_MU = (6.0, 64)
DEFAULT_Y_POINTS = 64
DELTA_EXTENT = 24.0


@dataclass(frozen=True)
class UniformGrid:
    """npoints equally spaced points from lo to hi inclusive."""

    lo: float
    hi: float
    npoints: int

    def __post_init__(self):
        if self.npoints < 2 or not self.hi > self.lo:
            raise ValueError(f"bad grid [{self.lo}, {self.hi}] with {self.npoints} points")

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.npoints - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.npoints)

    @property
    def max_abs(self) -> float:
        return max(abs(self.lo), abs(self.hi))


@dataclass(frozen=True)
class GridWavefunction:
    qgrid: UniformGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.qgrid.npoints,):
            raise ValueError(f"{values.size} values on a {self.qgrid.npoints}-point grid")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, f, grid: UniformGrid | None = None, normalize: bool = True):
        grid = grid or UniformGrid(*DEFAULT_Q)
        psi = cls(grid, f(grid.points))
        return psi.normalized() if normalize else psi

    def norm2(self) -> float:
        return float(np.trapezoid(np.abs(self.values) ** 2, dx=self.qgrid.step))

    def normalized(self) -> "GridWavefunction":
        n2 = self.norm2()
        if n2 == 0:
            raise ValueError("zero wave function")
        return GridWavefunction(self.qgrid, self.values / math.sqrt(n2))


def ground_state(grid: UniformGrid | None = None) -> GridWavefunction:
    return GridWavefunction.from_function(lambda q: np.pi ** -0.25 * np.exp(-q * q / 2), grid)


def _check_nu(nu: float) -> None:
    if nu == 0:
        raise ValueError("nu = 0 is a pure position measurement; <q|X mu nu> is not a function there")


def symplectic_eigenfunction(q, X: float, mu: float, nu: float):
    """<q|X mu nu> = exp(-i(mu q^2/(2 nu) - X q/nu)) / sqrt(2 pi |nu|)."""
    _check_nu(nu)
    q = np.asarray(q, dtype=float)
    return np.exp(-1j * (mu * q * q / (2 * nu) - X * q / nu)) / np.sqrt(2 * np.pi * abs(nu))


def chirp_parameter(mu: float, nu: float, qmax: float, dq: float) -> float:
    return abs(mu) * qmax * dq / (2 * abs(nu))


def required_points(grid: UniformGrid, mu: float, nu: float) -> int:
    """Points on the same interval that satisfy the chirp criterion."""
    dq = CHIRP_LIMIT * 2 * abs(nu) / (abs(mu) * grid.max_abs) if mu else grid.step
    return max(grid.npoints, int(math.ceil((grid.hi - grid.lo) / dq)) + 2)


def symplectic_tomogram_psi(psi: GridWavefunction, X: float, mu: float, nu: float) -> float:
    """|int conj(<q|X mu nu>) psi(q) dq|^2 by the trapezoid rule."""
    _check_nu(nu)
    g = psi.qgrid
    if chirp_parameter(mu, nu, g.max_abs, g.step) >= CHIRP_LIMIT:
        raise ValueError(
            f"grid under-resolves the chirp at mu={mu}, nu={nu}: "
            f"need at least {required_points(g, mu, nu)} points"
        )
    amp = np.trapezoid(np.conj(symplectic_eigenfunction(g.points, X, mu, nu)) * psi.values, dx=g.step)
    return float(abs(amp) ** 2)


# --------------------------------------------------------------------------
# grid tomograms

@dataclass(frozen=True)
class SymplecticTomogram:
    """values[i, k] is the density of mu_k Q + nu_k P at X = lambda_k * xgrid[i],
    expressed per unit of the scaled variable (so every column integrates to 1).
    """

    xgrid: UniformGrid
    munu_nodes: np.ndarray  # shape (K, 2)
    weights: np.ndarray  # mu-quadrature weight of each node
    values: np.ndarray  # shape (len(xgrid), K)
    scaled: bool = True

    def __post_init__(self):
        nodes = np.asarray(self.munu_nodes, dtype=float).reshape(-1, 2)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.xgrid.npoints, nodes.shape[0]):
            raise ValueError(f"values shape {values.shape} does not match grid x nodes")
        object.__setattr__(self, "munu_nodes", nodes)
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "values", values)

    def lambdas(self) -> np.ndarray:
        if not self.scaled:
            return np.ones(len(self.munu_nodes))
        return np.hypot(self.munu_nodes[:, 0], self.munu_nodes[:, 1])

    def x_normalization(self) -> np.ndarray:
        return np.trapezoid(self.values, dx=self.xgrid.step, axis=0)


def _refinement(grid: UniformGrid, mu: float, nu: float, xmax: float, qmax: float) -> int:
    """Integer refinement making the chirp (criterion < pi/4) and the X-phase resolved."""
    chirp_freq = abs(mu) * qmax / abs(nu)
    x_freq = xmax / abs(nu)
    dq = min(CHIRP_LIMIT * 2 / chirp_freq if mu else np.inf, (np.pi / 2) / (chirp_freq + x_freq))
    return max(1, int(math.ceil(grid.step / dq)))


class _Resampler:
    """Band-limited refinements of one wave function, cached by factor."""

    def __init__(self, psi: GridWavefunction):
        self.psi = psi
        self.cache: dict[int, np.ndarray] = {}

    def __call__(self, factor: int) -> np.ndarray:
        if factor not in self.cache:
            n = self.psi.qgrid.npoints
            self.cache[factor] = self.psi.values if factor == 1 else resample(self.psi.values, n * factor)
        return self.cache[factor]


def _unit_tomogram(res: _Resampler, xgrid: UniformGrid, mu: float, nu: float) -> np.ndarray:
    g = res.psi.qgrid
    xmax = max(abs(xgrid.lo), abs(xgrid.hi))
    f = _refinement(g, mu, nu, xmax, g.max_abs + g.step)
    fine = res(f)
    dq = g.step / f
    q = g.lo + dq * np.arange(fine.size)
    phi = np.exp(1j * mu * q * q / (2 * nu)) * fine
    # sum_n phi_n exp(-i X_k q_n / nu),  X_k = x0 + k dx
    a = np.exp(1j * xgrid.lo * dq / nu)
    w = np.exp(-1j * xgrid.step * dq / nu)
    amp = czt(phi, xgrid.npoints, w, a) * np.exp(-1j * xgrid.points * g.lo / nu)
    return np.abs(amp * dq) ** 2 / (2 * np.pi * abs(nu))


def symplectic_tomogram_grid(state, munu_nodes, weights=None, xgrid: UniformGrid | None = None,
                             scaled: bool = True) -> SymplecticTomogram:
    """Tomogram of a wave function, or of a mixture given as [(p, psi), ...]."""
    xgrid = xgrid or UniformGrid(-DEFAULT_X[0], DEFAULT_X[0], DEFAULT_X[1])
    mixture = [(1.0, state)] if isinstance(state, GridWavefunction) else list(state)
    nodes = np.asarray(munu_nodes, dtype=float).reshape(-1, 2)
    weights = np.ones(len(nodes)) if weights is None else np.asarray(weights, dtype=float)
    values = np.zeros((xgrid.npoints, len(nodes)))
    for p, psi in mixture:
        res = _Resampler(psi)
        for k, (mu, nu) in enumerate(nodes):
            _check_nu(nu)
            lam = math.hypot(mu, nu) if scaled else 1.0
            values[:, k] += p * _unit_tomogram(res, xgrid, mu / lam, nu / lam)
    return SymplecticTomogram(xgrid, nodes, weights, values, scaled)


def reconstruction_nodes(ygrid: UniformGrid, mu_extent: float = DEFAULT_MU[0],
                         n_mu: int = DEFAULT_MU[1]) -> tuple[np.ndarray, np.ndarray]:
    """(mu, nu) nodes: Gauss-Legendre in mu times every nonzero lattice difference nu = k dy."""
    rule = gauss_legendre(n_mu, -mu_extent, mu_extent)
    ks = [k for k in range(-(ygrid.npoints - 1), ygrid.npoints) if k != 0]
    nus = np.array(ks) * ygrid.step
    mu, nu = np.meshgrid(rule.nodes, nus, indexing="ij")
    w = np.broadcast_to(rule.weights[:, None], mu.shape)
    return np.column_stack([mu.ravel(), nu.ravel()]), w.ravel().copy()


@dataclass
class SymplecticReconstruction:
    ygrid: UniformGrid
    matrix: np.ndarray  # rho(y_i, y_j)
    warnings: list[str] = field(default_factory=list)

    def trace(self) -> float:
        return float(np.real(np.trapezoid(np.diag(self.matrix), dx=self.ygrid.step)))


def _characteristic(tom: SymplecticTomogram) -> np.ndarray:
    """int W(X) e^{iX} dX per node, trapezoid on the stored X' grid."""
    lam = tom.lambdas()
    phase = np.exp(1j * np.outer(tom.xgrid.points, lam))
    return np.trapezoid(tom.values * phase, dx=tom.xgrid.step, axis=0)


def symplectic_reconstruct(tom: SymplecticTomogram, ygrid: UniformGrid) -> SymplecticReconstruction:
    """rho(y, y') = (1/2pi) int dmu C(mu, y - y') e^{-i mu (y + y')/2},  C = int W e^{iX} dX.

    The nu-integral is taken by the delta function, so nu-nodes must sit on
    the differences y - y'.  The diagonal (nu = 0) has no eigenfunction; C is
    extrapolated there from nu = +-dy, +-2dy with the symmetric fourth-order rule
    (4 (f(d) + f(-d)) - (f(2d) + f(-2d))) / 6.
    """
    dy = ygrid.step
    nodes = tom.munu_nodes
    kfloat = nodes[:, 1] / dy
    kint = np.rint(kfloat).astype(int)
    if np.max(np.abs(kfloat - kint)) > 1e-9:
        raise ValueError("nu-nodes are not aligned with the y-grid spacing")
    mus = np.unique(nodes[:, 0])
    index = {(m, k): i for i, (m, k) in enumerate(zip(nodes[:, 0], kint))}
    n = ygrid.npoints
    needed = set(range(-(n - 1), n)) - {0}
    missing = [(m, k) for m in mus for k in needed if (m, k) not in index]
    if missing:
        raise ValueError(f"{len(missing)} (mu, nu) nodes missing, e.g. mu={missing[0][0]}, nu={missing[0][1] * dy}")
    char = _characteristic(tom)
    # table[mu, k + n - 1]
    table = np.zeros((len(mus), 2 * n - 1), dtype=complex)
    mu_pos = {m: i for i, m in enumerate(mus)}
    w_mu = np.zeros(len(mus))
    for i, (m, k) in enumerate(zip(nodes[:, 0], kint)):
        table[mu_pos[m], k + n - 1] = char[i]
        w_mu[mu_pos[m]] = tom.weights[i]
    c = n - 1
    table[:, c] = (4 * (table[:, c + 1] + table[:, c - 1]) - (table[:, c + 2] + table[:, c - 2])) / 6
    y = ygrid.points
    rho = np.empty((n, n), dtype=complex)
    for i in range(n):
        # all y' at once; nu = y_i - y'_j is k = i - j
        cols = table[:, i - np.arange(n) + c]
        phase = np.exp(-0.5j * np.outer(mus, y[i] + y))
        rho[i] = (w_mu[:, None] * cols * phase).sum(axis=0) / (2 * np.pi)
    rho = 0.5 * (rho + rho.conj().T)
    return SymplecticReconstruction(ygrid, rho)


def density_on_grid(psi: GridWavefunction, ygrid: UniformGrid) -> np.ndarray:
    """psi(y) conj(psi(y')) with psi carried onto ygrid by sinc (band-limited) interpolation."""
    g = psi.qgrid
    kernel = np.sinc((ygrid.points[:, None] - g.points[None, :]) / g.step)
    vals = kernel @ psi.values
    return np.outer(vals, vals.conj())


# --------------------------------------------------------------------------
# delta identity

def _sinc_window(z, extent: float):
    """int_{-R}^{R} e^{i t z} dt = 2 sin(R z)/z (2R at z = 0)."""
    z = np.asarray(z, dtype=float)
    return 2 * extent * np.sinc(extent * z / np.pi)


def delta_identity_probe(y: float, yp: float, q: float, qp: float,
                         x_extent: float = DELTA_EXTENT, mu_extent: float = DELTA_EXTENT,
                         method: str = "analytic", n_quad: int = 400) -> complex:
    """The inversion applied to the tomogram of |q><q'| and read at (y, y').

    With the X and mu integrals cut to [-R, R] this is a product of two nascent
    deltas: S_X(a) S_mu(b) / ((2 pi)^2 |nu|), nu = y - y',
        a = 1 - (q - q')/nu,  b = (q^2 - q'^2)/(2 nu) - y' - nu/2,
    peaked at (q, q') = (y, y').  ``method="quadrature"`` does the two
    integrals numerically instead.
    """
    nu = y - yp
    _check_nu(nu)
    a = 1 - (q - qp) / nu
    b = (q * q - qp * qp) / (2 * nu) - yp - nu / 2
    pref = 1 / ((2 * np.pi) ** 2 * abs(nu))
    if method == "analytic":
        return complex(pref * _sinc_window(a, x_extent) * _sinc_window(b, mu_extent))
    if method == "quadrature":
        rx = gauss_legendre(n_quad, -x_extent, x_extent)
        rm = gauss_legendre(n_quad, -mu_extent, mu_extent)
        ix = rx.integrate(np.exp(1j * rx.nodes * a))
        im = rm.integrate(np.exp(1j * rm.nodes * b))
        return complex(pref * ix * im)
    raise ValueError(f"unknown method {method!r}")


def delta_peak_ratio(y: float, yp: float, grid: UniformGrid | None = None, offset: int = 5,
                     **kwargs) -> float:
    """|I| at the peak over the largest |I| with (q, q') displaced by ``offset`` grid steps."""
    grid = grid or UniformGrid(*DEFAULT_Q)
    d = offset * grid.step
    peak = abs(delta_identity_probe(y, yp, y, yp, **kwargs))
    off = max(abs(delta_identity_probe(y, yp, y + sx * d, yp + sy * d, **kwargs))
              for sx in (-1, 0, 1) for sy in (-1, 0, 1) if (sx, sy) != (0, 0))
    return peak / off


# --------------------------------------------------------------------------
# Pauli problem

@dataclass(frozen=True)
class PauliResult:
    marginal_gap_q: float
    marginal_gap_p: float
    fidelity: float


def symmetric_grid(half_width: float = 10.0, npoints: int = 401) -> UniformGrid:
    if npoints % 2 == 0:
        raise ValueError("use an odd point count so the grid is symmetric about 0")
    return UniformGrid(-half_width, half_width, npoints)


def pauli_counterexample(alpha: complex, beta: float, grid: UniformGrid | None = None) -> PauliResult:
    """Two Gaussians e^{-alpha x^2 + i beta x} and e^{-alpha^* x^2 + i beta x}.

    psi_2(x) = conj(psi_1(-x)), so both position and momentum densities agree.
    The momentum densities use an explicit DFT matrix on a symmetric p grid,
    which keeps that mirror symmetry exact up to rounding.
    """
    alpha = complex(alpha)
    if alpha.real <= 0:
        raise ValueError("Re(alpha) must be positive")
    grid = grid or symmetric_grid()
    x = grid.points
    dx = grid.step
    psi1 = np.exp(-alpha * x * x + 1j * beta * x)
    psi2 = np.exp(-alpha.conjugate() * x * x + 1j * beta * x)
    psi1 /= np.sqrt(np.sum(np.abs(psi1) ** 2) * dx)
    psi2 /= np.sqrt(np.sum(np.abs(psi2) ** 2) * dx)
    gap_q = float(np.max(np.abs(np.abs(psi1) ** 2 - np.abs(psi2) ** 2)))
    p = x * (np.pi / grid.max_abs)  # symmetric momentum grid
    dft = np.exp(-1j * np.outer(p, x)) * dx / np.sqrt(2 * np.pi)
    gap_p = float(np.max(np.abs(np.abs(dft @ psi1) ** 2 - np.abs(dft @ psi2) ** 2)))
    fid = float(abs(np.sum(psi1.conj() * psi2) * dx) ** 2)
    return PauliResult(gap_q, gap_p, fid)


# --------------------------------------------------------------------------
# squeeze tomography

def squeeze_parameters(mu: float, nu: float) -> tuple[float, float]:
    """(lambda, theta) with mu = e^lambda cos(theta), nu = e^{-lambda} sin(theta).

    sin(2 theta) = 2 mu nu fixes theta up to the choice between theta0 and
    pi/2 - theta0; we take |tan(theta)| <= 1 where possible (theta0 =
    asin(2|mu nu|)/2 in [0, pi/4]) and place theta in the quadrant given by the
    signs of mu and nu.  mu = 0 gives theta = +-pi/2.
    """
    if mu == 0 and nu == 0:
        raise ValueError("(mu, nu) = (0, 0) has no squeeze parameters")
    if abs(2 * mu * nu) > 1 + 1e-15:
        raise ValueError(f"|2 mu nu| = {abs(2 * mu * nu)} > 1: not reachable by S(lambda, theta)")
    if mu == 0:
        theta = math.copysign(np.pi / 2, nu)
        return -math.log(abs(nu)), theta
    theta0 = 0.5 * math.asin(min(1.0, abs(2 * mu * nu)))
    theta = theta0 if mu > 0 else np.pi - theta0
    if nu < 0:
        theta = -theta
    lam = math.log(abs(mu) / math.cos(theta0))
    return lam, theta


def quadratures(space: FockSpace) -> tuple[np.ndarray, np.ndarray]:
    a = space.annihilation()
    ad = a.conj().T
    return (a + ad) / np.sqrt(2), (a - ad) / (1j * np.sqrt(2))


def default_pad(lam: float) -> int:
    # squeezing by e^|lam| spreads |n> over roughly e^{2|lam|} n levels
    return int(60 + 40 * math.exp(2 * abs(lam)))


def squeeze_operator(lam: float, theta: float, space: FockSpace, pad: int | None = None) -> np.ndarray:
    """exp(i lam/2 (QP + PQ)) exp(i theta/2 (Q^2 + P^2)), built in a padded space and cut back.

    With this ordering S Q S^dagger = mu Q + nu P.
    """
    pad = default_pad(lam) if pad is None else pad
    big = FockSpace(space.nmax + pad)
    q, p = quadratures(big)
    s = expm(0.5j * lam * (q @ p + p @ q)) @ expm(0.5j * theta * (q @ q + p @ p))
    return s[: space.dim, : space.dim]


@dataclass(frozen=True)
class SqueezeReport:
    lam: float
    theta: float
    parity_commutator_norm: float
    even_dim: int
    even_rank: int
    even_commutant_dim: int
    full_dim: int
    full_rank: int
    full_commutant_dim: int

    @property
    def even_complete(self) -> bool:
        """Linear span of the projected family is all of B(even block)."""
        return self.even_rank == self.even_dim ** 2

    @property
    def full_complete(self) -> bool:
        return self.full_rank == self.full_dim ** 2


def _squeezed_projectors(params: Sequence[tuple[float, float]], levels: int, nmax: int):
    space = FockSpace(nmax)
    out = []
    for lam, theta in params:
        s = squeeze_operator(lam, theta, space)
        for n in range(levels):
            v = s[:, n]
            out.append(np.outer(v, v.conj()))
    return out


def _svd_rank(rows: np.ndarray) -> int:
    sv = np.linalg.svd(rows, compute_uv=False)
    return int(np.sum(sv > 1e-10 * sv[0]))


def completeness_rank(projectors, basis: Sequence[int]) -> int:
    """Dimension of the linear span of {B^dagger P B} on the coordinate block ``basis``."""
    idx = np.asarray(basis)
    return _svd_rank(np.array([p[np.ix_(idx, idx)].ravel() for p in projectors]))


def commutant_dimension(projectors, basis: Sequence[int]) -> int:
    """Dimension of {C : [C, B^dagger P B] = 0 for every P}; 1 means trivial."""
    idx = np.asarray(basis)
    d = len(idx)
    eye = np.eye(d)
    rows = []
    for p in projectors:
        b = p[np.ix_(idx, idx)]
        # row-major vec: vec(C B - B C) = (I kron B^T - B kron I) vec(C)
        rows.append(np.kron(eye, b.T) - np.kron(b, eye))
    return d * d - _svd_rank(np.vstack(rows))


def squeeze_commutant_check(mu: float, nu: float, space: FockSpace | None = None,
                            even_dim: int = 3, probe_points: int = 6, seed: int = 0) -> SqueezeReport:
    """||[S a^dagger a S^dagger, Pi]|| on the truncated block, plus completeness probes.

    The probes sample squeezed number-state projectors S|n><n|S^dagger at
    random squeeze parameters and look at two coordinate blocks: the first
    ``even_dim`` even number states, and the first 2*even_dim states of both
    parities.  For each block they report the span rank (informational
    completeness needs d^2) and the commutant dimension (trivial means 1).
    """
    space = space or FockSpace(40)
    lam, theta = squeeze_parameters(mu, nu)
    big = FockSpace(space.nmax + default_pad(lam))
    s = squeeze_operator(lam, theta, big, 0)
    a_sq = (s @ big.number() @ s.conj().T)[: space.dim, : space.dim]
    parity = space.parity()
    comm = float(np.linalg.norm(a_sq @ parity - parity @ a_sq))

    rng = np.random.default_rng(seed)
    params = [(rng.uniform(-0.6, 0.6), rng.uniform(-np.pi, np.pi)) for _ in range(probe_points)]
    projectors = _squeezed_projectors(params, 2 * even_dim + 2, 2 * even_dim + 10)
    even = range(0, 2 * even_dim, 2)
    full = range(2 * even_dim)
    return SqueezeReport(
        lam, theta, comm,
        even_dim, completeness_rank(projectors, even), commutant_dimension(projectors, even),
        2 * even_dim, completeness_rank(projectors, full), commutant_dimension(projectors, full),
    )
