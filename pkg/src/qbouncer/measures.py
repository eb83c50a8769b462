"""
Information-theoretic and statistical functionals of one-dimensional
probability densities, and the uncertainty relations built from them.

Densities are sampled on uniform grids and integrated with the composite
trapezoidal rule.  A density may carry a ``tail`` object contributing the
mass outside the sampled band (see :class:`qbouncer.dynamics.EdgeTail`).
All functionals broadcast over leading axes of ``values``.

Entropies are in nats.  With ``hbar = 1`` and one dimension,

* Renyi entropy   ``R_a = ln(int rho^a) / (1 - a)``,
* Shannon entropy ``S = -int rho ln rho``,
* entropy power   ``N_a = (a / (2a - 1))^{(2a-1)/(a-1)} exp(2 R_a) / (2 pi)``,
  with the ``a -> 1`` limit ``exp(2 S - 1) / (2 pi)``.

For a Gaussian of variance ``s^2``, ``N_1 = s^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError

__all__ = [
    "Density",
    "norm",
    "renyi_entropy",
    "shannon_entropy",
    "entropy_power",
    "variance",
    "conjugate_index",
    "renyi_sum_bound",
    "SHANNON_BOUND",
    "MeasureSample",
    "BoundRow",
    "check_bounds",
    "measure_batch",
    "measure_state",
]

FLOOR = 1e-30  # densities below this are treated as zero
NORM_TOL = 1e-4
BOUND_TOL = 1e-6
SHANNON_BOUND = 1.0 + math.log(math.pi)
QUARTER = 0.25
HALF = 0.5


@dataclass(frozen=True, eq=False)
class Density:
    """Nonnegative samples ``values[..., j]`` at ``origin + j * spacing``."""

    values: np.ndarray
    spacing: float
    origin: float = 0.0
    tail: object | None = field(default=None, repr=False)

    @property
    def coords(self) -> np.ndarray:
        return self.origin + np.arange(self.values.shape[-1]) * self.spacing


def _trapz(f: np.ndarray, dx: float) -> np.ndarray:
    return (np.sum(f, axis=-1) - 0.5 * (f[..., 0] + f[..., -1])) * dx


def _clamped(d: Density) -> np.ndarray:
    cached = d.__dict__.get("_clamped")
    if cached is not None:
        return cached
    v = np.asarray(d.values, dtype=float)
    if np.any(v < -FLOOR):
        raise DomainError("density has negative samples")
    v = np.where(v < FLOOR, 0.0, v)
    object.__setattr__(d, "_clamped", v)
    return v


def norm(density: Density) -> np.ndarray:
    """Total probability, including the tail if present."""
    total = _trapz(_clamped(density), density.spacing)
    if density.tail is not None:
        total = total + density.tail.mass()
    return total


def _check_norm(density: Density) -> None:
    total = norm(density)
    if np.any(np.abs(total - 1.0) > NORM_TOL):
        raise DomainError(f"density integrates to {np.ravel(total)[0]!r}, not 1")


def _check_alpha(alpha: float) -> None:
    if not (math.isfinite(alpha) and alpha > 0):
        raise DomainError(f"entropic index must be positive and finite, got {alpha!r}")


def renyi_entropy(density: Density, alpha: float, check: bool = True) -> np.ndarray:
    """Renyi entropy of order ``alpha``.

    Parameters
    ----------
    density : Density
        Normalised density (to within ``1e-4``).
    alpha : float
        Positive order other than 1; use :func:`shannon_entropy` for 1.
    check : bool
        Verify the normalisation first.
    """
    _check_alpha(alpha)
    if alpha == 1.0:
        raise DomainError("alpha = 1 is the Shannon limit; call shannon_entropy")
    if check:
        _check_norm(density)
    v = _clamped(density)
    integral = _trapz(v ** alpha, density.spacing)
    if density.tail is not None:
        integral = integral + density.tail.power_integral(alpha)
    return np.log(integral) / (1.0 - alpha)


def shannon_entropy(density: Density, check: bool = True) -> np.ndarray:
    """``-int rho ln rho`` in nats, with ``0 ln 0 = 0``."""
    if check:
        _check_norm(density)
    v = _clamped(density)
    safe = np.where(v > 0, v, 1.0)
    total = _trapz(-v * np.log(safe), density.spacing)
    if density.tail is not None:
        total = total + density.tail.entropy_integral()
    return total


def conjugate_index(alpha: float) -> float:
    """``beta`` with ``1/alpha + 1/beta = 2``; requires ``alpha > 1/2``."""
    if not alpha > 0.5:
        raise DomainError(f"conjugate index needs alpha > 1/2, got {alpha!r}")
    return alpha / (2.0 * alpha - 1.0)


def _power_prefactor(alpha: float) -> float:
    if alpha == 1.0:
        return math.exp(-1.0)
    return conjugate_index(alpha) ** ((2.0 * alpha - 1.0) / (alpha - 1.0))


def entropy_power(renyi_value, alpha: float):
    """Renyi entropy power ``N_alpha`` from an entropy value (any ``alpha > 1/2``)."""
    _check_alpha(alpha)
    if not alpha > 0.5:
        raise DomainError(f"entropy power needs alpha > 1/2, got {alpha!r}")
    return _power_prefactor(alpha) * np.exp(2.0 * np.asarray(renyi_value)) / (2.0 * math.pi)


def renyi_sum_bound(alpha: float) -> float:
    """Lower bound on ``R_alpha[rho] + R_beta[gamma]`` for conjugate indices."""
    if alpha == 1.0:
        return SHANNON_BOUND
    conjugate_index(alpha)  # domain check
    # the ln(pi) parts of the two terms add up to exactly ln(pi); writing the
    # rest in terms of d = alpha - 1 avoids cancellation as alpha -> 1
    d = alpha - 1.0
    la, l2 = math.log1p(d), math.log1p(2.0 * d)
    return math.log(math.pi) + (la - (la - l2) * (2.0 * alpha - 1.0)) / (2.0 * d)


def _moments(density: Density):
    v = _clamped(density)
    x = density.coords
    dx = density.spacing
    m0 = _trapz(v, dx)
    m1 = _trapz(v * x, dx)
    if density.tail is not None:
        m0 = m0 + density.tail.mass()
        m1 = m1 + density.tail.moment(1)
    mean = m1 / m0
    centred = x - mean[..., None] if np.ndim(mean) else x - mean
    m2 = _trapz(v * centred ** 2, dx)
    if density.tail is not None:
        t0, t1, t2 = density.tail.mass(), density.tail.moment(1), density.tail.moment(2)
        m2 = m2 + t2 - 2.0 * mean * t1 + mean ** 2 * t0
    return m0, mean, m2 / m0


def variance(density: Density, check: bool = True) -> np.ndarray:
    """Second central moment (mass-normalised)."""
    if check:
        _check_norm(density)
    var = _moments(density)[2]
    if np.any(var < -1e-12):
        raise DomainError("variance came out negative; the density is not resolved")
    return np.maximum(var, 0.0)


def mean(density: Density) -> np.ndarray:
    return _moments(density)[1]


@dataclass(frozen=True)
class MeasureSample:
    """Entropic and statistical measures at one instant.

    Per-index quantities are keyed by ``alpha``.  ``renyi_gamma_conj[a]`` is
    the momentum Renyi entropy at the conjugate index ``beta(a)``.
    """

    time: float
    alphas: tuple
    shannon_rho: float
    shannon_gamma: float
    renyi_rho: Mapping[float, float]
    renyi_gamma: Mapping[float, float]
    renyi_gamma_conj: Mapping[float, float]
    var_rho: float
    var_gamma: float
    autocorr_abs: float = float("nan")
    norm_rho: float = float("nan")
    norm_gamma: float = float("nan")

    @property
    def shannon_sum(self) -> float:
        return self.shannon_rho + self.shannon_gamma

    def renyi_sum(self, alpha: float) -> float:
        return self.renyi_rho[alpha] + self.renyi_gamma_conj[alpha]

    def power_rho(self, alpha: float) -> float:
        return float(entropy_power(self.renyi_rho[alpha], alpha))

    def power_gamma(self, alpha: float) -> float:
        return float(entropy_power(self.renyi_gamma[alpha], alpha))

    def power_gamma_conj(self, alpha: float) -> float:
        return float(entropy_power(self.renyi_gamma_conj[alpha], conjugate_index(alpha)))

    @property
    def stddev_product(self) -> float:
        return math.sqrt(self.var_rho * self.var_gamma)

    def products(self, alpha: float) -> dict[str, float]:
        """The three entropy-power products at index ``alpha``."""
        nr, ng = self.power_rho(alpha), self.power_gamma(alpha)
        return {
            "rho_var_gamma": nr * self.var_gamma,
            "gamma_var_rho": ng * self.var_rho,
            "rho_gamma": nr * ng,
        }


@dataclass(frozen=True)
class BoundRow:
    relation: str
    alpha: float | None
    value: float
    bound: float

    @property
    def slack(self) -> float:
        return self.value - self.bound

    @property
    def holds(self) -> bool:
        return self.slack >= -BOUND_TOL


def check_bounds(sample: MeasureSample, alphas: Iterable[float] | None = None) -> list[BoundRow]:
    """Evaluate every uncertainty relation for ``sample``.

    Relations, all with ``hbar = 1``:

    * ``shannon``: ``S_rho + S_gamma >= 1 + ln pi``
    * ``renyi_sum``: ``R_a[rho] + R_b[gamma] >= bound(a, b)`` for conjugate ``a, b``
    * ``power_conjugate``: ``N_a[rho] N_b[gamma] >= 1/4``
    * ``power_rho_var_gamma``: ``N_a[rho] var_gamma >= 1/4``
    * ``power_gamma_var_rho``: ``N_a[gamma] var_rho >= 1/4``
    * ``power_product``: ``N_a[rho] N_a[gamma] >= 1/4``
    * ``stddev_quarter`` and ``stddev_half``: ``sigma_rho sigma_gamma`` against
      ``1/4`` and the Heisenberg value ``1/2``.
    """
    rows = [BoundRow("shannon", None, sample.shannon_sum, SHANNON_BOUND)]
    for a in (sample.alphas if alphas is None else alphas):
        if a != 1.0:
            rows.append(BoundRow("renyi_sum", a, sample.renyi_sum(a), renyi_sum_bound(a)))
        rows.append(BoundRow("power_conjugate", a,
                             sample.power_rho(a) * sample.power_gamma_conj(a), QUARTER))
        prods = sample.products(a)
        rows.append(BoundRow("power_rho_var_gamma", a, prods["rho_var_gamma"], QUARTER))
        rows.append(BoundRow("power_gamma_var_rho", a, prods["gamma_var_rho"], QUARTER))
        rows.append(BoundRow("power_product", a, prods["rho_gamma"], QUARTER))
    rows.append(BoundRow("stddev_quarter", None, sample.stddev_product, QUARTER))
    rows.append(BoundRow("stddev_half", None, sample.stddev_product, HALF))
    return rows


def measure_batch(times: Sequence[float], rho: Density, gamma: Density,
                  alphas: Sequence[float], autocorr=None) -> list[MeasureSample]:
    """Build :class:`MeasureSample` rows for a batch of densities.

    ``rho`` and ``gamma`` carry one density per time along their leading axis.
    """
    alphas = tuple(float(a) for a in alphas)
    n_rho, n_gamma = norm(rho), norm(gamma)
    for total, label in ((n_rho, "position"), (n_gamma, "momentum")):
        if np.any(np.abs(total - 1.0) > NORM_TOL):
            j = int(np.argmax(np.abs(total - 1.0)))
            raise DomainError(f"{label} density integrates to {float(total[j])!r} at t = {float(times[j])!r}")
    s_rho = shannon_entropy(rho, check=False)
    s_gamma = shannon_entropy(gamma, check=False)
    r_rho, r_gamma, r_conj = {}, {}, {}
    for a in alphas:
        r_rho[a] = s_rho if a == 1.0 else renyi_entropy(rho, a, check=False)
        r_gamma[a] = s_gamma if a == 1.0 else renyi_entropy(gamma, a, check=False)
        b = conjugate_index(a)
        r_conj[a] = s_gamma if b == 1.0 else renyi_entropy(gamma, b, check=False)
    v_rho = variance(rho, check=False)
    v_gamma = variance(gamma, check=False)
    ac = np.full(len(times), np.nan) if autocorr is None else np.abs(autocorr)
    out = []
    for j, t in enumerate(times):
        out.append(MeasureSample(
            time=float(t), alphas=alphas,
            shannon_rho=float(s_rho[j]), shannon_gamma=float(s_gamma[j]),
            renyi_rho={a: float(r_rho[a][j]) for a in alphas},
            renyi_gamma={a: float(r_gamma[a][j]) for a in alphas},
            renyi_gamma_conj={a: float(r_conj[a][j]) for a in alphas},
            var_rho=float(v_rho[j]), var_gamma=float(v_gamma[j]),
            autocorr_abs=float(ac[j]), norm_rho=float(n_rho[j]), norm_gamma=float(n_gamma[j]),
        ))
    return out


def measure_state(state, alphas: Sequence[float], autocorr: complex | None = None) -> MeasureSample:
    """Measures for a single state exposing ``position_density``/``momentum_density``."""
    def batched(d: Density) -> Density:
        # tail integrals broadcast against the added axis
        return Density(d.values[None, :], d.spacing, d.origin, d.tail)

    rho, gamma = batched(state.position_density()), batched(state.momentum_density())
    ac = None if autocorr is None else np.array([autocorr])
    return measure_batch([state.time], rho, gamma, alphas, ac)[0]
