"""
Energy eigenbasis of the quantum bouncer and the Gaussian packet's expansion.

Units are rescaled so that the Hamiltonian reads ``H = p^2 + z`` on
``z >= 0`` with a hard wall at ``z = 0``.  Eigenfunctions are

    phi_n(z) = N_n Ai(z - z_n),   N_n = 1 / |Ai'(-z_n)|,

with eigenvalues ``z_n`` (the zero magnitudes of ``Ai(-z)``).  The initial
state is the real Gaussian ``(2 / (pi sigma^2))^{1/4} exp(-(z - z0)^2 / sigma^2)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .airy import AiryZeroTable, airy_ai, airy_ai_scaled, airy_zeros
from .errors import ConsistencyError, DomainError, TruncationError

__all__ = [
    "BouncerBasis",
    "build_basis",
    "coefficient_closed_form",
    "coefficient_quadrature",
    "estimate_time_scales",
    "auto_n_max",
    "classical_period",
    "revival_time",
    "dump_spectrum",
    "load_spectrum",
]

COMPLETENESS_TOL = 1e-6
SPOT_CHECKS = 20
SPOT_TOL = 1e-4


@dataclass(frozen=True, eq=False)
class BouncerBasis:
    """Truncated eigenbasis together with the packet coefficients.

    Attributes
    ----------
    z0, sigma : float
        Initial height and width of the Gaussian packet.
    zero_table : AiryZeroTable
        Airy zeros; ``energies`` is ``zero_table.zeros``.
    normalizations : ndarray
        ``N_n = 1 / |Ai'(-z_n)|``.
    coefficients : ndarray
        Real expansion coefficients ``C_n``.
    spot_checks : ndarray
        Indices (0-based) whose coefficients were checked by quadrature.
    """

    z0: float
    sigma: float
    zero_table: AiryZeroTable
    normalizations: np.ndarray
    coefficients: np.ndarray
    spot_checks: np.ndarray

    @property
    def n_max(self) -> int:
        return self.coefficients.size

    @property
    def energies(self) -> np.ndarray:
        return self.zero_table.zeros

    @property
    def weights(self) -> np.ndarray:
        """Populations ``|C_n|^2``."""
        return self.coefficients ** 2

    @property
    def completeness(self) -> float:
        return float(np.sum(self.weights))

    @property
    def mean_energy(self) -> float:
        return float(np.sum(self.weights * self.energies))

    @property
    def n0(self) -> int:
        """1-based index of the level closest to the classical energy ``z0``."""
        return int(np.argmin(np.abs(self.energies - self.z0))) + 1

    @property
    def n_peak(self) -> int:
        """1-based index of the largest ``|C_n|``."""
        return int(np.argmax(np.abs(self.coefficients))) + 1

    def tail_weight(self, count: int = 10) -> float:
        """Largest ``|C_n|`` among the last ``count`` levels."""
        return float(np.max(np.abs(self.coefficients[-count:])))


def classical_period(z0: float) -> float:
    """Classical bounce period ``2 sqrt(z0)`` for a particle dropped from ``z0``."""
    return 2.0 * math.sqrt(z0)


def revival_time(z0: float) -> float:
    """Revival time ``4 z0^2 / pi`` used to scale fractional revivals."""
    return 4.0 * z0 ** 2 / math.pi


def _check_packet(z0: float, sigma: float) -> None:
    if not (math.isfinite(z0) and z0 > 0):
        raise DomainError(f"z0 must be positive and finite, got {z0!r}")
    if not (math.isfinite(sigma) and sigma > 0):
        raise DomainError(f"sigma must be positive and finite, got {sigma!r}")


def _as_index(n, count: int) -> np.ndarray:
    idx = np.asarray(n)
    if idx.dtype.kind not in "iu" or np.any(idx < 1) or np.any(idx > count):
        raise DomainError(f"level index must be an integer in [1, {count}]")
    return idx - 1


def coefficient_closed_form(n, z0: float, sigma: float, zero_table: AiryZeroTable):
    """Expansion coefficient of the Gaussian packet in the analytic form

        C_n = N_n (2 pi sigma^2)^{1/4} exp[(sigma^2/4)(z0 - z_n + sigma^4/24)]
              Ai(z0 - z_n + sigma^4/16).

    The exponential growth and Airy decay are combined in log form, so the
    result never overflows for realistic packets.  ``n`` is 1-based and may
    be an array.
    """
    _check_packet(z0, sigma)
    idx = _as_index(n, zero_table.count)
    zn = zero_table.zeros[idx]
    norm = 1.0 / zero_table.derivative_magnitudes[idx]
    s2 = sigma * sigma
    arg = z0 - zn + s2 * s2 / 16.0
    expo = 0.25 * s2 * (z0 - zn + s2 * s2 / 24.0)
    scaled = airy_ai_scaled(arg)
    # Ai(arg) = scaled * exp(-2/3 arg^{3/2}) for arg > 0
    expo = expo - np.where(arg > 0, 2.0 / 3.0 * np.abs(arg) ** 1.5, 0.0)
    pref = norm * (2.0 * math.pi * s2) ** 0.25
    with np.errstate(over="raise"):
        try:
            value = pref * scaled * np.exp(expo)
        except FloatingPointError as exc:
            raise DomainError("coefficient overflows double precision") from exc
    return float(value) if np.ndim(value) == 0 else value


def coefficient_quadrature(n, z0: float, sigma: float, zero_table: AiryZeroTable,
                           dz: float = 2e-3):
    """Overlap ``<phi_n | Psi(0)>`` by the composite trapezoidal rule.

    Integrates over ``[0, z_n + 15]`` restricted to where the Gaussian
    exceeds ``exp(-100)`` of its peak.  Independent of the analytic form and
    used to validate it.
    """
    _check_packet(z0, sigma)
    if not dz > 0:
        raise DomainError("dz must be positive")
    idx = np.atleast_1d(_as_index(n, zero_table.count))
    out = np.empty(idx.size)
    for j, i in enumerate(idx):
        zn = zero_table.zeros[i]
        lo = max(0.0, z0 - 10.0 * sigma)
        hi = min(zn + 15.0, z0 + 10.0 * sigma)
        if hi <= lo:
            out[j] = 0.0
            continue
        m = max(2, int(math.ceil((hi - lo) / dz)) + 1)
        z = np.linspace(lo, hi, m)
        f = (airy_ai(z - zn) / zero_table.derivative_magnitudes[i]
             * (2.0 / (math.pi * sigma ** 2)) ** 0.25
             * np.exp(-((z - z0) / sigma) ** 2))
        out[j] = np.trapezoid(f, z)
    return float(out[0]) if np.ndim(n) == 0 else out


def auto_n_max(z0: float, sigma: float, tol: float = 1e-9) -> int:
    """Basis size whose neglected coefficients are below ``tol``.

    For ``z_n > z0`` the coefficients decay roughly like
    ``exp(-sigma^2 (z_n - z0) / 4)``, so the cut-off energy is
    ``z0 + 4 ln(1 / tol) / sigma^2`` (plus a ``sigma^4 / 16`` shift of the
    Airy argument), never less than ``z0 + 12 max(sigma, 1/sigma)``.
    The level count follows from the leading zero asymptotics plus a margin
    of 20 levels.
    """
    _check_packet(z0, sigma)
    excess = 4.0 * math.log(1.0 / tol) / sigma ** 2 + sigma ** 4 / 16.0
    excess = max(excess, 12.0 * max(sigma, 1.0 / sigma))
    e_cut = z0 + excess
    n = int(math.ceil(2.0 * e_cut ** 1.5 / (3.0 * math.pi) + 0.25))
    return n + 20


def build_basis(z0: float, sigma: float, n_max: int | str = 500,
                p0: float = 0.0) -> BouncerBasis:
    """Eigenbasis, normalizations and packet coefficients.

    Parameters
    ----------
    z0, sigma : float
        Gaussian initial height and width (both positive).
    n_max : int or "auto"
        Number of levels kept.
    p0 : float
        Initial mean momentum.  Only ``0`` is supported.

    Raises
    ------
    TruncationError
        If ``sum C_n^2`` misses 1 by more than ``1e-6``.
    ConsistencyError
        If the analytic coefficients disagree with quadrature on the
        largest components.
    """
    _check_packet(z0, sigma)
    if p0 != 0:
        raise DomainError("only p0 = 0 is supported: the coefficient formula "
                          "assumes a real initial packet")
    if n_max == "auto":
        n_max = auto_n_max(z0, sigma)
    if (isinstance(n_max, bool) or not isinstance(n_max, (int, np.integer, float))
            or int(n_max) != n_max or n_max < 3):
        raise DomainError(f"n_max must be an integer >= 3 or 'auto', got {n_max!r}")
    n_max = int(n_max)
    table = airy_zeros(n_max)
    levels = np.arange(1, n_max + 1)
    coef = coefficient_closed_form(levels, z0, sigma, table)
    total = float(np.sum(coef ** 2))
    if abs(total - 1.0) > COMPLETENESS_TOL:
        raise TruncationError(
            f"sum C_n^2 = {total:.9f} for n_max = {n_max}; increase n_max")
    spots = np.sort(np.argsort(-np.abs(coef), kind="stable")[:SPOT_CHECKS])
    quad = coefficient_quadrature(spots + 1, z0, sigma, table)
    scale = np.max(np.abs(coef))
    err = np.abs(quad - coef[spots]) / scale
    if np.any(err > SPOT_TOL):
        worst = int(spots[np.argmax(err)]) + 1
        raise ConsistencyError(
            f"closed-form C_{worst} disagrees with quadrature by {err.max():.2e}")
    norm = 1.0 / table.derivative_magnitudes
    for arr in (coef, norm, spots):
        arr.setflags(write=False)
    return BouncerBasis(float(z0), float(sigma), table, norm, coef, spots)


def estimate_time_scales(basis: BouncerBasis) -> tuple[float, float]:
    """Classical period and revival time from finite differences.

    Returns ``(2 pi / |E'(n0)|, 4 pi / |E''(n0)|)`` with centred differences
    of the spectrum at ``n0``, the level closest to ``z0``.
    """
    i = basis.n0 - 1
    if i < 1 or i > basis.n_max - 2:
        raise DomainError("n0 has no neighbours inside the basis")
    e = basis.energies
    d1 = 0.5 * (e[i + 1] - e[i - 1])
    d2 = e[i + 1] - 2.0 * e[i] + e[i - 1]
    return 2.0 * math.pi / abs(d1), 4.0 * math.pi / abs(d2)


def spectrum_records(basis: BouncerBasis) -> list[dict]:
    return [
        {"n": n + 1, "z_n": float(basis.energies[n]),
         "N_n": float(basis.normalizations[n]), "C_n": float(basis.coefficients[n])}
        for n in range(basis.n_max)
    ]


def dump_spectrum(basis: BouncerBasis, path) -> None:
    """Write ``{n, z_n, N_n, C_n}`` records as JSON (round-trip precision)."""
    doc = {"z0": basis.z0, "sigma": basis.sigma, "levels": spectrum_records(basis)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_spectrum(path) -> dict[str, np.ndarray]:
    """Read a spectrum file back into arrays keyed by field name."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    levels: Sequence[dict] = doc["levels"]
    return {key: np.array([rec[key] for rec in levels])
            for key in ("n", "z_n", "N_n", "C_n")}
