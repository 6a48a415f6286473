"""Concrete two-point matrices, grids and smearing builders.

Two models are provided: a harmonic oscillator sampled on a time grid, and a
periodic chain of coupled oscillators (a lattice scalar field) sampled on a
time x site grid. Measure factors are folded into the matrices so that
``f @ W @ g`` approximates the smeared continuum pairing.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, ModelError
from .quasifree import TwoPointMatrix


@dataclass(frozen=True)
class TimeGrid:
    size: int
    spacing: float = 1.0
    periodic: bool = True

    def __post_init__(self):
        if self.size < 1:
            raise ConfigurationError("time grid needs at least one point")
        if not self.spacing > 0:
            raise ConfigurationError(f"grid spacing must be positive, got {self.spacing}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.size,)

    @property
    def spacings(self) -> tuple[float, ...]:
        return (self.spacing,)

    @property
    def measure(self) -> float:
        return self.spacing

    @cached_property
    def times(self) -> np.ndarray:
        return np.arange(self.size) * self.spacing


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Time x site grid; flattened index is ``t * sites + x``. Space is periodic."""

    times: TimeGrid
    sites: int
    spacing: float = 1.0

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.times.size, self.sites)

    @property
    def size(self) -> int:
        return self.times.size * self.sites

    @property
    def periodic(self) -> bool:
        return self.times.periodic

    @property
    def spacings(self) -> tuple[float, ...]:
        return (self.times.spacing, self.spacing)

    @property
    def measure(self) -> float:
        return self.times.spacing * self.spacing


@dataclass(frozen=True)
class OscillatorModel:
    omega: float
    grid: TimeGrid

    def __post_init__(self):
        if not self.omega > 0:
            raise ModelError(f"oscillator frequency must be positive, got {self.omega}")


@dataclass(frozen=True)
class ChainModel:
    mass: float
    sites: int
    grid: TimeGrid
    spacing: float = 1.0

    def __post_init__(self):
        if self.sites < 1:
            raise ConfigurationError("chain needs at least one site")
        if not self.mass > 0:
            raise ModelError(f"chain mass must be positive (zero mode), got {self.mass}")

    @property
    def space_time(self) -> SpaceTimeGrid:
        return SpaceTimeGrid(self.grid, self.sites, self.spacing)

    @cached_property
    def momenta(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.sites) / self.sites

    @cached_property
    def dispersion(self) -> np.ndarray:
        k = self.momenta
        return np.sqrt(self.mass ** 2 + 4.0 * np.sin(k / 2) ** 2 / self.spacing ** 2)


def oscillator_two_point(model: OscillatorModel) -> TwoPointMatrix:
    """W[a, b] = dt^2 exp(-i w (t_a - t_b)) / (2 w); a rank-one positive kernel."""
    # built from integer lags so that W[a, b] depends on a - b only, bit for bit
    idx = np.arange(model.grid.size)
    lag = np.subtract.outer(idx, idx) * model.grid.spacing
    W = model.grid.measure ** 2 / (2 * model.omega) * np.exp(-1j * model.omega * lag)
    tp = TwoPointMatrix(W, f"oscillator(omega={model.omega!r}, points={model.grid.size}, "
                          f"dt={model.grid.spacing!r}, measure=dt^2)")
    tp.check_positive_type()
    return tp


def chain_two_point(model: ChainModel) -> TwoPointMatrix:
    """Ground-state correlator of the periodic chain via its normal modes."""
    t = model.grid.times
    x = np.arange(model.sites)
    k, w = model.momenta, model.dispersion
    dt = t[:, None] - t[None, :]
    dx = x[:, None] - x[None, :]
    # C[t, s, x, y] = (1/L) sum_k exp(-i w_k (t-s)) exp(i k (x-y)) / (2 w_k)
    time_phase = np.exp(-1j * dt[..., None] * w)
    space_phase = np.exp(1j * dx[..., None] * k)
    C = np.einsum("tsk,xyk,k->txsy", time_phase, space_phase, 1 / (2 * w)) / model.sites
    n = model.grid.size * model.sites
    W = model.space_time.measure ** 2 * C.reshape(n, n)
    tp = TwoPointMatrix(W, f"chain(mass={model.mass!r}, sites={model.sites}, points={model.grid.size}, "
                          f"dt={model.grid.spacing!r}, dx={model.spacing!r}, measure=(dt*dx)^2)")
    tp.check_positive_type()
    return tp


def chain_stiffness(model: ChainModel) -> np.ndarray:
    """K = m^2 + discrete periodic Laplacian, so H = (pi.pi + phi.K.phi) / 2."""
    L, a = model.sites, model.spacing
    S = np.roll(np.eye(L), 1, axis=1)
    return model.mass ** 2 * np.eye(L) + (2 * np.eye(L) - S - S.T) / a ** 2


def chain_hamiltonian_correlator(model: ChainModel) -> np.ndarray:
    """Same correlator from diagonalizing the real-space quadratic Hamiltonian.

    <phi_x(t) phi_y(s)> = (K^{-1/2} exp(-i K^{1/2} (t - s)))_{xy} / 2 in the
    Gaussian ground state. Independent of the normal-mode sum above.
    """
    K = chain_stiffness(model)
    evals, U = np.linalg.eigh(K)
    if evals[0] <= 0:
        raise ModelError("chain stiffness matrix is not positive definite")
    w = np.sqrt(evals)
    t = model.grid.times
    n_t, L = t.size, model.sites
    out = np.empty((n_t, L, n_t, L), dtype=complex)
    for a in range(n_t):
        for b in range(n_t):
            out[a, :, b, :] = (U * (np.exp(-1j * w * (t[a] - t[b])) / (2 * w))) @ U.T
    return model.space_time.measure ** 2 * out.reshape(n_t * L, n_t * L)


# ---------------------------------------------------------------------------
# difference operators and smearing functions


def _difference_1d(order: int, size: int, h: float, periodic: bool, kind: str) -> np.ndarray:
    if order not in (1, 2):
        raise ConfigurationError(f"difference order must be 1 or 2, got {order}")
    need = 3 if (order == 2 or kind == "centered") else 2
    if size < need:
        raise ConfigurationError(f"grid of {size} points too small for this order-{order} stencil")
    D = np.zeros((size, size))
    if order == 1 and kind == "forward":
        stencil = {0: -1.0, 1: 1.0}
    elif order == 1 and kind == "centered":
        stencil = {-1: -0.5, 1: 0.5}
    elif order == 1:
        raise ConfigurationError(f"unknown first-difference kind {kind!r}")
    else:
        stencil = {-1: 1.0, 0: -2.0, 1: 1.0}
    for a in range(size):
        for off, c in stencil.items():
            b = a + off
            if periodic:
                D[a, b % size] += c
            elif 0 <= b < size:
                D[a, b] += c
    if not periodic:
        # one-sided rows where the stencil leaves the grid
        lo, hi = min(stencil), max(stencil)
        for a in list(range(0, -lo)) + list(range(size - hi, size)):
            D[a] = 0.0
            shift = -lo - a if a < -lo else (size - hi - 1) - a
            for off, c in stencil.items():
                D[a, a + shift + off] += c
    return D / h ** order


def finite_difference(order: int, grid, axis: int = 0, kind: str = "forward") -> np.ndarray:
    """Real difference matrix along one grid axis; its transpose is the formal adjoint."""
    shape, spacings = grid.shape, grid.spacings
    if not 0 <= axis < len(shape):
        raise ConfigurationError(f"grid has no axis {axis}")
    periodic = grid.periodic if axis == 0 else True
    D = _difference_1d(order, shape[axis], spacings[axis], periodic, kind)
    mats = [np.eye(s) for s in shape]
    mats[axis] = D
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def stencil_matrix(stencil: dict[int, float], grid, axis: int = 0) -> np.ndarray:
    """Matrix with ``(Q f)[a] = sum_o c_o f[a + o]`` along ``axis``; coefficients taken as given."""
    shape = grid.shape
    periodic = grid.periodic if axis == 0 else True
    n = shape[axis]
    D = np.zeros((n, n))
    for a in range(n):
        for off, c in stencil.items():
            b = a + off
            if periodic:
                D[a, b % n] += c
            elif 0 <= b < n:
                D[a, b] += c
    mats = [np.eye(s) for s in shape]
    mats[axis] = D
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


@dataclass(frozen=True, eq=False)
class SumOfSquares:
    f: np.ndarray
    witnesses: tuple[np.ndarray, ...]

    def residual(self) -> float:
        return float(np.max(np.abs(self.f - sum(g ** 2 for g in self.witnesses))))


def sum_of_squares_smearing(generators) -> SumOfSquares:
    gens = tuple(np.asarray(g, dtype=float).copy() for g in generators)
    if not gens:
        raise ConfigurationError("need at least one generator")
    if any(np.iscomplexobj(g) for g in generators):
        raise ConfigurationError("class-S generators must be real")
    return SumOfSquares(sum(g ** 2 for g in gens), gens)


def _axis_distance(grid_size: int, spacing: float, periodic: bool, center: float) -> np.ndarray:
    x = np.arange(grid_size) * spacing
    d = x - center
    if periodic:
        span = grid_size * spacing
        d = (d + span / 2) % span - span / 2
    return d


def gaussian_bump(grid: TimeGrid, center: float, width: float) -> np.ndarray:
    d = _axis_distance(grid.size, grid.spacing, grid.periodic, center)
    return np.exp(-0.5 * (d / width) ** 2)


def triangle_bump(grid: TimeGrid, center: float, half_width: float) -> np.ndarray:
    d = _axis_distance(grid.size, grid.spacing, grid.periodic, center)
    return np.clip(1.0 - np.abs(d) / half_width, 0.0, None)


def product_function(time_part, site_part) -> np.ndarray:
    """Flattened ``f(t, x) = time_part[t] * site_part[x]`` on a :class:`SpaceTimeGrid`."""
    return np.outer(np.asarray(time_part, dtype=float), np.asarray(site_part, dtype=float)).ravel()
