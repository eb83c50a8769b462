"""
Time scans of the uncertainty diagnostics and fractional-revival detection.

A scan samples the packet on a uniform time grid and records every entropic
and statistical measure.  Fractional revivals at ``t = (p/q) T_rev`` show up
as local minima of the uncertainty products once the fast classical
bouncing (period ``T_cl``) is averaged out.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.signal import find_peaks

from .basis import BouncerBasis, classical_period, estimate_time_scales, revival_time
from .dynamics import PositionGrid, _propagator, autocorrelation
from .errors import BoundViolation, DomainError
from .measures import Density, MeasureSample, check_bounds, conjugate_index, measure_batch

__all__ = [
    "RevivalTimeline",
    "AnnotatedMinimum",
    "scan",
    "detect_minima",
    "fractional_revival_times",
    "match_fractions",
    "smooth",
    "alpha_label",
    "timeline_columns",
    "DIAGNOSTIC_PREFIXES",
]

CHUNK = 128  # time samples per batch; fixed so results do not depend on threads


def alpha_label(x: float) -> str:
    return f"{x:.4f}"


@dataclass(frozen=True)
class AnnotatedMinimum:
    t: float
    value: float
    fraction: tuple[int, int] | None

    @property
    def fraction_label(self) -> str | None:
        return None if self.fraction is None else f"{self.fraction[0]}/{self.fraction[1]}"


def timeline_columns(alphas: Sequence[float]) -> list[str]:
    """CSV column names for a timeline with the given entropic indices."""
    cols = ["t", "S_rho", "S_gamma", "shannon_sum"]
    for a in alphas:
        la, lb = alpha_label(a), alpha_label(conjugate_index(a))
        cols += [f"R_rho_a{la}", f"R_gamma_b{lb}", f"renyi_sum_a{la}",
                 f"N_rho_a{la}", f"N_gamma_a{la}"]
    cols += ["var_rho", "var_gamma"]
    for a in alphas:
        la = alpha_label(a)
        cols += [f"prod_Nrho_vargamma_a{la}", f"prod_Ngamma_varrho_a{la}",
                 f"prod_Nrho_Ngamma_a{la}"]
    cols += ["stddev_product", "autocorr_abs"]
    return cols


# Columns treated as uncertainty diagnostics for minima detection.
DIAGNOSTIC_PREFIXES = ("shannon_sum", "renyi_sum_a", "prod_", "stddev_product")


def _row(sample: MeasureSample) -> list[float]:
    row = [sample.time, sample.shannon_rho, sample.shannon_gamma, sample.shannon_sum]
    for a in sample.alphas:
        row += [sample.renyi_rho[a], sample.renyi_gamma_conj[a], sample.renyi_sum(a),
                sample.power_rho(a), sample.power_gamma(a)]
    row += [sample.var_rho, sample.var_gamma]
    for a in sample.alphas:
        pr = sample.products(a)
        row += [pr["rho_var_gamma"], pr["gamma_var_rho"], pr["rho_gamma"]]
    row += [sample.stddev_product, sample.autocorr_abs]
    return row


@dataclass
class RevivalTimeline:
    """Time-ordered measures plus detected minima.

    ``t_rev`` is ``4 z0^2 / pi`` and anchors the fraction labels;
    ``t_rev_fd`` and ``t_cl_fd`` come from finite differences of the
    spectrum and are kept for diagnostics.
    """

    samples: list[MeasureSample]
    alphas: tuple
    t_cl: float
    t_rev: float
    t_cl_fd: float
    t_rev_fd: float
    minima: dict[str, list[AnnotatedMinimum]] = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.samples])

    @property
    def columns(self) -> list[str]:
        return timeline_columns(self.alphas)

    def table(self) -> np.ndarray:
        """All columns as a ``(num_samples, num_columns)`` array."""
        return np.array([_row(s) for s in self.samples])

    def column(self, name: str) -> np.ndarray:
        cols = self.columns
        if name not in cols:
            raise KeyError(name)
        return self.table()[:, cols.index(name)]

    def diagnostics(self) -> list[str]:
        return [c for c in self.columns if c.startswith(DIAGNOSTIC_PREFIXES)]

    def analyze(self, smoothing_window: float | None = None, prominence: float = 0.02,
                q_max: int = 4, matching_window: float | None = None) -> dict:
        """Detect and label minima of every diagnostic column.

        ``smoothing_window`` is in samples and defaults to one classical
        period; ``matching_window`` defaults to ``0.02 t_rev``.
        """
        t = self.times
        if t.size < 3:
            self.minima = {name: [] for name in self.diagnostics()}
            return self.minima
        dt = (t[-1] - t[0]) / (t.size - 1)
        width = self.t_cl / dt if smoothing_window is None else smoothing_window
        width = min(max(width, 1.0), t.size - 1)
        window = 0.02 * self.t_rev if matching_window is None else matching_window
        fractions = fractional_revival_times(self.t_rev, q_max)
        table = self.table()
        cols = self.columns
        out = {}
        for name in self.diagnostics():
            found = detect_minima(t, table[:, cols.index(name)], width, prominence)
            out[name] = match_fractions(found, fractions, window)
        self.minima = out
        return out


def _scan_chunk(basis, grid, times, alphas):
    prop = _propagator(basis, grid)
    psi, wall = prop.amplitudes(times)
    prop.check_extent(psi, times)
    phi, tail = prop.momentum(psi, wall, times)
    rho = Density(psi.real ** 2 + psi.imag ** 2, grid.dz, 0.0)
    gamma = Density(phi.real ** 2 + phi.imag ** 2, grid.dp, float(grid.p[0]), tail)
    del psi, phi
    samples = measure_batch(times, rho, gamma, alphas, autocorrelation(basis, times))
    for s in samples:
        for row in check_bounds(s):
            if not row.holds:
                raise BoundViolation(
                    f"{row.relation} (alpha={row.alpha}) = {row.value!r} is below "
                    f"{row.bound!r} at t = {s.time!r}")
    return samples


def scan(basis: BouncerBasis, grid: PositionGrid, t_start: float, t_end: float,
         num_samples: int, alphas: Sequence[float], threads: int = 1) -> RevivalTimeline:
    """Evaluate all measures at ``num_samples`` uniform times in ``[t_start, t_end]``.

    Work is split into fixed-size batches; with ``threads > 1`` batches run
    concurrently and are reassembled in time order.

    Raises
    ------
    GridError, AliasingError, BoundViolation
        With the offending time in the message.
    """
    if not t_start < t_end:
        raise DomainError("scan needs t_start < t_end")
    if isinstance(num_samples, bool) or int(num_samples) != num_samples or num_samples < 2:
        raise DomainError("scan needs at least two samples")
    if threads < 1:
        raise DomainError("threads must be >= 1")
    alphas = tuple(float(a) for a in alphas)
    for a in alphas:
        conjugate_index(a)
    times = np.linspace(t_start, t_end, int(num_samples))
    chunks = [times[i:i + CHUNK] for i in range(0, times.size, CHUNK)]
    _propagator(basis, grid)  # build once before fanning out
    if threads == 1:
        parts = [_scan_chunk(basis, grid, c, alphas) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: _scan_chunk(basis, grid, c, alphas), chunks))
    samples = [s for part in parts for s in part]
    t_cl_fd, t_rev_fd = estimate_time_scales(basis)
    return RevivalTimeline(samples, alphas, classical_period(basis.z0),
                           revival_time(basis.z0), t_cl_fd, t_rev_fd)


def smooth(values: np.ndarray, width: float) -> tuple[np.ndarray, int]:
    """Moving average over ``width`` samples (need not be an integer).

    A width ``w`` averages ``2m + 1`` full samples plus the two next
    neighbours weighted by the fractional remainder, where
    ``m = floor((w - 1) / 2)``; odd integer widths give the plain boxcar.
    Returns the ``valid`` part and the offset of its first sample.
    """
    half = 0.5 * (width - 1.0)
    full = int(math.floor(half + 1e-12))
    frac = half - full
    kernel = np.ones(2 * full + 1)
    if frac > 1e-12:
        kernel = np.concatenate(([frac], kernel, [frac]))
    kernel /= kernel.sum()
    return np.convolve(values, kernel, mode="valid"), kernel.size // 2


def detect_minima(t, values, smoothing_window: float, prominence: float = 0.02):
    """Local minima of a smoothed series.

    Parameters
    ----------
    t, values : array_like
        Uniformly sampled, time-ordered series.
    smoothing_window : float
        Moving-average width in samples (odd integers give a plain boxcar).
    prominence : float
        Minimum prominence as a fraction of the smoothed series' range.

    Returns
    -------
    list of (t_min, value)
        Vertex of the parabola through the three samples around each minimum.

    Raises
    ------
    DomainError
        If the window is shorter than one sample or not shorter than the series.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise DomainError("t and values must be 1-D arrays of equal length")
    if np.any(np.diff(t) <= 0):
        raise DomainError("series must be strictly increasing in time")
    if not 1.0 <= smoothing_window < y.size:
        raise DomainError(f"smoothing window {smoothing_window!r} must lie in [1, {y.size})")
    ys, off = smooth(y, smoothing_window)
    ts = t[off:off + ys.size]
    span = float(ys.max() - ys.min()) if ys.size else 0.0
    if ys.size < 3 or span <= 0:
        return []
    idx, _ = find_peaks(-ys, prominence=prominence * span)
    out = []
    for i in idx:
        y0, y1, y2 = ys[i - 1], ys[i], ys[i + 1]
        den = y0 - 2.0 * y1 + y2
        shift = 0.5 * (y0 - y2) / den if den > 0 else 0.0
        h = ts[i + 1] - ts[i]
        out.append((float(ts[i] + shift * h), float(y1 - 0.25 * (y0 - y2) * shift)))
    return out


def fractional_revival_times(t_rev: float, q_max: int) -> list[tuple[int, int, float]]:
    """Coprime ``(p, q)`` with ``1 <= p < q <= q_max`` plus ``(1, 1)``, by time."""
    if int(q_max) != q_max or q_max < 2:
        raise DomainError("q_max must be an integer >= 2")
    seen = {Fraction(1, 1)}
    for q in range(2, int(q_max) + 1):
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                seen.add(Fraction(p, q))
    return [(f.numerator, f.denominator, float(f) * t_rev) for f in sorted(seen)]


def match_fractions(minima, fractions, window: float) -> list[AnnotatedMinimum]:
    """Label each minimum with the nearest fractional-revival time within ``window``.

    ``fractions`` holds ``(p, q, t)`` triples.  Equidistant candidates go to
    the one with the smaller ``q``.
    """
    if not window > 0:
        raise DomainError("matching window must be positive")
    out = []
    for t_min, value in minima:
        best = None
        for p, q, tf in fractions:
            d = abs(t_min - tf)
            if d > window:
                continue
            key = (d, q)
            if best is None or d < best[0][0] - 1e-12 * max(abs(tf), 1.0) or (
                    abs(d - best[0][0]) <= 1e-12 * max(abs(tf), 1.0) and q < best[0][1]):
                best = (key, (p, q))
        out.append(AnnotatedMinimum(t_min, value, None if best is None else best[1]))
    return out
