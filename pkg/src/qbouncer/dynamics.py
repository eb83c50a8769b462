"""
Time evolution of the bouncer packet on a uniform grid and its momentum
representation.

The position amplitude is synthesised from the eigenbasis,

    psi(z, t) = sum_n C_n exp(-i z_n t) phi_n(z),

and the momentum amplitude uses the symmetric convention

    phi(p) = (2 pi)^{-1/2} int_0^inf psi(z) exp(-i p z) dz.

The hard wall makes ``psi`` kink at ``z = 0`` (``psi(0) = 0`` but
``psi'(0) != 0``), so ``|phi(p)|^2`` decays only like ``p^{-4}``.  A plain FFT
of such a function converges slowly and aliases the tail back into the band.
The transform here splits off an edge function

    h(z) = exp(-kappa z) sum_{k=1}^{K} b_k z^k / k!

whose first ``K`` derivatives at the wall match those of ``psi``.  The
smooth remainder ``psi - h`` goes through the FFT and ``h`` is transformed
in closed form.  The closed form also supplies the momentum density beyond
the FFT band, which is integrated separately (see :class:`EdgeTail`).
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .airy import airy_ai, airy_derivatives_at
from .basis import BouncerBasis
from .errors import AliasingError, DomainError, GridError

__all__ = [
    "PositionGrid",
    "GridState",
    "EdgeTail",
    "Propagator",
    "evolve_to",
    "to_momentum",
    "autocorrelation",
    "write_snapshot",
    "EDGE_ORDER",
    "EDGE_DECAY",
]

# Edge-function order and decay rate.
EDGE_ORDER = 10
EDGE_DECAY = 20.0

WALL_TOL = 1e-6  # largest |psi| allowed at z_max
ALIAS_TOL = 1e-8  # largest remainder probability in the outer 10% of the band

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class PositionGrid:
    """Uniform grid ``z_j = j dz``, ``j = 0..num_points-1``, ``dz = z_max / num_points``."""

    z_max: float = 256.0
    num_points: int = 16384

    def __post_init__(self):
        n = self.num_points
        if isinstance(n, bool) or int(n) != n or n < 1024 or (int(n) & (int(n) - 1)):
            raise GridError(f"num_points must be a power of two >= 1024, got {n!r}")
        if not (math.isfinite(self.z_max) and self.z_max > 0):
            raise GridError(f"z_max must be positive, got {self.z_max!r}")

    @property
    def dz(self) -> float:
        return self.z_max / self.num_points

    @property
    def z(self) -> np.ndarray:
        return np.arange(self.num_points) * self.dz

    @property
    def dp(self) -> float:
        return 2.0 * math.pi / self.z_max

    @property
    def p(self) -> np.ndarray:
        """Momentum grid in ascending order."""
        return (np.arange(self.num_points) - self.num_points // 2) * self.dp

    def refined(self) -> "PositionGrid":
        """Same extent with twice the points."""
        return PositionGrid(self.z_max, 2 * self.num_points)

    def validate(self, basis: BouncerBasis) -> None:
        """Check that the grid is wide enough for the packet."""
        need = max(basis.z0 + 12.0 * max(basis.sigma, 1.0 / basis.sigma), 2.0 * basis.z0)
        if self.z_max < need:
            raise GridError(f"z_max = {self.z_max} is too small; need at least {need:g}")


class EdgeTail:
    """Momentum density outside the FFT band, from the closed-form edge term.

    Beyond the band the remainder spectrum is negligible (this is what the
    aliasing check enforces), so ``gamma(p) = |H(p)|^2 / (2 pi)`` with
    ``H(p) = sum_k b_k / (kappa + i p)^{k+1}``.  Each side is integrated with
    Gauss-Legendre panels in ``s = ln(p / p_edge)`` up to ``1e5 p_edge``; the
    rest follows from the leading ``|b_1|^2 / (2 pi p^4)`` behaviour.

    All integrals are vectorised over the leading axes of ``b``.
    """

    _SPAN = math.log(1e5)
    _PANELS = 24
    _NODES = 8

    def __init__(self, b: np.ndarray, kappa: float, p_low: float, p_high: float):
        self.b = np.asarray(b, dtype=complex)
        self.kappa = float(kappa)
        self.p_low = float(p_low)
        self.p_high = float(p_high)
        self._gamma = None

    @classmethod
    @lru_cache(maxsize=1)
    def _reference_nodes(cls):
        x, w = np.polynomial.legendre.leggauss(cls._NODES)
        h = cls._SPAN / cls._PANELS
        s = (np.arange(cls._PANELS)[:, None] + 0.5 * (x[None, :] + 1.0)) * h
        return s.ravel(), np.tile(0.5 * h * w, cls._PANELS)

    def _sides(self):
        """(p nodes, weights dp) for the lower and upper tail."""
        s, ws = self._reference_nodes()
        e = np.exp(s)
        return ((self.p_low * e, abs(self.p_low) * e * ws),
                (self.p_high * e, self.p_high * e * ws))

    def _densities(self):
        if self._gamma is None:
            out = []
            k = np.arange(1, self.b.shape[-1])
            for p, w in self._sides():
                basis = 1.0 / (self.kappa + 1j * p[None, :]) ** (k[:, None] + 1)
                h = self.b[..., 1:] @ basis
                out.append((p, w, (h.real ** 2 + h.imag ** 2) / (2.0 * math.pi)))
            self._gamma = out
        return self._gamma

    def _far_constant(self) -> np.ndarray:
        return np.abs(self.b[..., 1]) ** 2 / (2.0 * math.pi)

    def _ends(self):
        return abs(self.p_low) * math.exp(self._SPAN), self.p_high * math.exp(self._SPAN)

    def mass(self) -> np.ndarray:
        total = sum(g @ w for p, w, g in self._densities())
        c = self._far_constant()
        return total + sum(c / (3.0 * q ** 3) for q in self._ends())

    def moment(self, k: int) -> np.ndarray:
        """``int p^k gamma`` over both tails (``k`` = 1 or 2)."""
        total = sum(g @ (w * p ** k) for p, w, g in self._densities())
        c = self._far_constant()
        lo, hi = self._ends()
        if k == 1:
            total = total + c / (2.0 * hi ** 2) - c / (2.0 * lo ** 2)
        elif k == 2:
            total = total + c / hi + c / lo
        else:
            raise DomainError("only first and second tail moments are available")
        return total

    def power_integral(self, a: float) -> np.ndarray:
        """``int gamma^a`` over both tails, for ``a > 1/4``."""
        if not a > 0.25:
            raise DomainError("tail power integral diverges for a <= 1/4")
        total = 0.0
        for p, w, g in self._densities():
            g = np.where(g < 1e-30, 0.0, g)
            total = total + g ** a @ w
        c = self._far_constant()
        for q in self._ends():
            total = total + c ** a * q ** (1.0 - 4.0 * a) / (4.0 * a - 1.0)
        return total

    def entropy_integral(self) -> np.ndarray:
        """``-int gamma ln gamma`` over both tails."""
        total = 0.0
        for p, w, g in self._densities():
            g = np.where(g < 1e-30, 0.0, g)
            with np.errstate(divide="ignore", invalid="ignore"):
                ent = np.where(g > 0, -g * np.log(np.where(g > 0, g, 1.0)), 0.0)
            total = total + ent @ w
        c = self._far_constant()
        logc = np.log(np.where(c > 0, c, 1.0))
        for q in self._ends():
            # -int_q^inf c p^-4 ln(c p^-4) dp
            total = total - c * (logc / (3.0 * q ** 3)
                                 - 4.0 * (math.log(q) / (3.0 * q ** 3) + 1.0 / (9.0 * q ** 3)))
        return total


@dataclass(frozen=True, eq=False)
class GridState:
    """Wave function at one instant on a :class:`PositionGrid`.

    ``wall_derivatives[k]`` holds ``d^k psi / dz^k`` at ``z = 0`` for
    ``k = 0..EDGE_ORDER``; it may be ``None`` for states without a wall, in
    which case the momentum transform reduces to a plain FFT.  Momentum
    fields are filled in by :func:`to_momentum`.
    """

    time: float
    grid: PositionGrid
    psi: np.ndarray
    wall_derivatives: np.ndarray | None = None
    phi: np.ndarray | None = None
    tail: EdgeTail | None = field(default=None, repr=False)

    @property
    def z(self) -> np.ndarray:
        return self.grid.z

    @property
    def p(self) -> np.ndarray:
        return self.grid.p

    @property
    def rho(self) -> np.ndarray:
        return self.psi.real ** 2 + self.psi.imag ** 2

    @property
    def gamma(self) -> np.ndarray:
        if self.phi is None:
            raise DomainError("momentum amplitudes not computed; call to_momentum first")
        return self.phi.real ** 2 + self.phi.imag ** 2

    def position_density(self):
        from .measures import Density
        return Density(self.rho, self.grid.dz, 0.0)

    def momentum_density(self):
        from .measures import Density
        return Density(self.gamma, self.grid.dp, float(self.grid.p[0]), self.tail)


def _edge_mixing(kappa: float, order: int) -> np.ndarray:
    """Matrix taking wall derivatives d_i to edge coefficients b_j.

    ``b_j = sum_{i<=j} C(j, i) kappa^{j-i} d_i`` makes
    ``exp(-kappa z) sum b_k z^k / k!`` share derivatives 0..order with psi.
    """
    m = np.zeros((order + 1, order + 1))
    for j in range(order + 1):
        for i in range(j + 1):
            m[i, j] = math.comb(j, i) * kappa ** (j - i)
    return m


class Propagator:
    """Precomputed basis functions on a grid; evaluates batches of states."""

    def __init__(self, basis: BouncerBasis, grid: PositionGrid, block: int = 64):
        grid.validate(basis)
        self.basis = basis
        self.grid = grid
        z = grid.z
        zn = basis.energies
        norm = basis.normalizations
        # basis matrix phi_n(z_j), built in row blocks
        mat = np.empty((basis.n_max, grid.num_points))
        for lo in range(0, basis.n_max, block):
            hi = min(lo + block, basis.n_max)
            mat[lo:hi] = airy_ai(z[None, :] - zn[lo:hi, None]) * norm[lo:hi, None]
        # subnormal tails slow BLAS down several-fold and carry no information
        mat[np.abs(mat) < 1e-250] = 0.0
        self.matrix = mat
        # Ai'(-z_n) alternates in sign, starting positive, and |Ai'(-z_n)| = 1 / N_n
        slopes = np.where(np.arange(zn.size) % 2 == 0, 1.0, -1.0) / norm
        self.wall = airy_derivatives_at(-zn, 0.0, slopes, EDGE_ORDER) * norm[:, None]
        self.edge = _edge_setup(grid)

    def amplitudes(self, times) -> tuple[np.ndarray, np.ndarray]:
        """Position amplitudes ``(B, N)`` and wall derivatives ``(B, K+1)``."""
        t = np.atleast_1d(np.asarray(times, dtype=float))
        phase = np.outer(t, self.basis.energies)
        c = self.basis.coefficients
        re = (c * np.cos(phase)) @ self.matrix
        im = -(c * np.sin(phase)) @ self.matrix
        psi = re + 1j * im
        coeff = c * np.exp(-1j * phase)
        return psi, coeff @ self.wall

    def check_extent(self, psi: np.ndarray, times) -> None:
        edge = np.abs(psi[..., -1])
        if np.any(edge > WALL_TOL):
            j = int(np.argmax(edge))
            raise GridError(f"|psi(z_max)| = {edge.flat[j]:.2e} at t = "
                            f"{float(np.atleast_1d(times)[j])!r}; enlarge z_max")

    def momentum(self, psi: np.ndarray, wall: np.ndarray | None, times=None):
        """Momentum amplitudes on the band and the tail model.

        Returns ``(phi, tail)`` with ``phi`` in ascending-``p`` order.
        """
        return _momentum(psi, wall, self.grid, times)


@dataclass(frozen=True, eq=False)
class _EdgeSetup:
    kappa: float
    mixing: np.ndarray
    edge_grid: np.ndarray
    edge_band: np.ndarray
    outer: np.ndarray


@lru_cache(maxsize=4)
def _edge_setup(grid: PositionGrid) -> _EdgeSetup:
    kappa = EDGE_DECAY
    k = np.arange(1, EDGE_ORDER + 1)
    # h(z) is below 1e-22 of its scale beyond z = 80 / kappa
    reach = int(min(grid.num_points, math.ceil(80.0 / kappa / grid.dz) + 1))
    zh = grid.z[:reach]
    fact = np.array([math.factorial(int(i)) for i in k], dtype=float)
    edge_grid = np.exp(-kappa * zh)[None, :] * zh[None, :] ** k[:, None] / fact[:, None]
    p = grid.p
    edge_band = 1.0 / (kappa + 1j * p[None, :]) ** (k[:, None] + 1)
    outer = np.abs(p) > 0.9 * abs(p[0])
    return _EdgeSetup(kappa, _edge_mixing(kappa, EDGE_ORDER), edge_grid, edge_band, outer)


def _momentum(psi, wall, grid: PositionGrid, times=None):
    setup = _edge_setup(grid)
    kappa, mixing, edge_grid = setup.kappa, setup.mixing, setup.edge_grid
    edge_band, outer = setup.edge_band, setup.outer
    psi = np.asarray(psi, dtype=complex)
    if wall is None:
        wall = np.zeros(psi.shape[:-1] + (EDGE_ORDER + 1,), dtype=complex)
    b = np.asarray(wall, dtype=complex) @ mixing
    rem = psi.copy()
    reach = edge_grid.shape[-1]
    rem[..., :reach] -= b[..., 1:] @ edge_grid
    amp = np.fft.fftshift(np.fft.fft(rem, axis=-1), axes=-1) * (grid.dz / _SQRT_2PI)
    leak = np.sum(np.abs(amp[..., outer]) ** 2, axis=-1) * grid.dp
    if np.any(leak > ALIAS_TOL):
        j = int(np.argmax(leak))
        when = "" if times is None else f" at t = {float(np.atleast_1d(times)[j])!r}"
        raise AliasingError(f"momentum remainder carries {leak.flat[j]:.2e} of the "
                            f"probability near the band edge{when}; refine the grid")
    amp += (b[..., 1:] @ edge_band) / _SQRT_2PI
    p = grid.p
    tail = EdgeTail(b, kappa, p[0], p[-1])
    return amp, tail


@lru_cache(maxsize=2)
def _propagator(basis: BouncerBasis, grid: PositionGrid) -> Propagator:
    return Propagator(basis, grid)


def evolve_to(basis: BouncerBasis, grid: PositionGrid, t: float) -> GridState:
    """Position amplitude at time ``t`` (momentum side left empty).

    Raises
    ------
    GridError
        If the grid is too short for the packet or ``|psi(z_max)|`` exceeds
        ``1e-6``.
    """
    if not math.isfinite(t):
        raise DomainError("time must be finite")
    prop = _propagator(basis, grid)
    psi, wall = prop.amplitudes([t])
    prop.check_extent(psi, [t])
    return GridState(float(t), grid, psi[0], wall[0])


def to_momentum(state: GridState) -> GridState:
    """Attach momentum amplitudes ``phi(p)`` and the tail model to ``state``.

    Raises
    ------
    AliasingError
        If the FFT remainder holds more than ``1e-8`` probability in the
        outer 10% of the momentum band.
    """
    phi, tail = _momentum(state.psi, state.wall_derivatives, state.grid, [state.time])
    return replace(state, phi=phi, tail=tail)


def autocorrelation(basis: BouncerBasis, t):
    """``A(t) = <Psi(0)|Psi(t)> = sum_n |C_n|^2 exp(-i z_n t)``."""
    t_arr = np.asarray(t, dtype=float)
    out = np.exp(-1j * np.multiply.outer(t_arr, basis.energies)) @ basis.weights
    return complex(out) if t_arr.ndim == 0 else out


def _fmt(x: float) -> str:
    s = format(float(x), ".12g")
    return "0" if s in ("-0", "0") else s


def write_snapshot(state: GridState, directory) -> tuple[str, str]:
    """Write ``snapshot_<t>.csv`` (position) and ``snapshot_<t>_momentum.csv``.

    Returns both paths.
    """
    if state.phi is None:
        state = to_momentum(state)
    os.makedirs(directory, exist_ok=True)
    stem = os.path.join(directory, f"snapshot_{_fmt(state.time)}")
    pos, mom = stem + ".csv", stem + "_momentum.csv"
    with open(pos, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["z", "re_psi", "im_psi", "rho"])
        for row in zip(state.z, state.psi.real, state.psi.imag, state.rho):
            w.writerow([_fmt(v) for v in row])
    with open(mom, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["p", "re_phi", "im_phi", "gamma"])
        for row in zip(state.p, state.phi.real, state.phi.imag, state.gamma):
            w.writerow([_fmt(v) for v in row])
    return pos, mom
