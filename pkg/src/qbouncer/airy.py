"""
Airy function Ai, its derivative and its negative zeros.

Evaluation uses two regimes:

* ``|x| <= 9``: Taylor re-expansion about anchors spaced 0.5 apart.  The
  anchor values come from the Maclaurin series summed in 60-digit decimal
  arithmetic, and higher derivatives follow from ``Ai'' = x Ai``.
* ``|x| > 9``: the classical asymptotic expansions (oscillatory for
  negative arguments, exponentially decaying for positive ones).

Both regimes are accurate to a few units in the last place of double
precision over the range used by the bouncer (roughly ``-200 <= x <= 200``).
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from functools import lru_cache

import numpy as np

from .errors import DomainError

__all__ = [
    "airy_ai",
    "airy_ai_prime",
    "airy_pair",
    "airy_ai_scaled",
    "airy_derivatives_at",
    "AiryZeroTable",
    "airy_zeros",
    "zero_estimate",
]

# Ai(0) and Ai'(0) to 50 digits.
_AI0 = "0.35502805388781723926006318600418317639797917419918"
_AIP0 = "-0.25881940379280679840518356018920396347909113835493"

_ANCHOR_STEP = 0.5
_ANCHOR_MAX = 9.0
_TAYLOR_DEGREE = 32
_ASYMPTOTIC_TERMS = 40


def _maclaurin(x: Decimal) -> tuple[Decimal, Decimal]:
    """Ai(x), Ai'(x) from the Maclaurin series in decimal arithmetic."""
    a = [Decimal(_AI0), Decimal(_AIP0), Decimal(0)]
    ai = a[0] + a[1] * x
    aip = a[1]
    tiny = Decimal(10) ** -58
    k = 0
    quiet = 0
    while quiet < 6:
        nxt = a[k % 3] / ((k + 2) * (k + 3))
        a[k % 3] = nxt
        m = k + 3
        term = nxt * x ** m
        dterm = nxt * m * x ** (m - 1)
        ai += term
        aip += dterm
        quiet = quiet + 1 if abs(term) < tiny and abs(dterm) < tiny else 0
        k += 1
    return ai, aip


@lru_cache(maxsize=1)
def _taylor_table() -> tuple[np.ndarray, np.ndarray]:
    """Anchor points and Taylor coefficients c_k = Ai^(k)(a) / k!."""
    n_side = int(round(_ANCHOR_MAX / _ANCHOR_STEP))
    anchors = np.arange(-n_side, n_side + 1) * _ANCHOR_STEP
    coef = np.empty((anchors.size, _TAYLOR_DEGREE + 2))
    with localcontext() as ctx:
        ctx.prec = 60
        for i, a in enumerate(anchors):
            ad = Decimal(repr(float(a)))
            y = [Decimal(0)] * (_TAYLOR_DEGREE + 2)
            y[0], y[1] = _maclaurin(ad)
            for k in range(0, _TAYLOR_DEGREE):
                # d^k/dx^k (x Ai) = x Ai^(k) + k Ai^(k-1)
                y[k + 2] = ad * y[k] + (k * y[k - 1] if k else 0)
            fact = Decimal(1)
            for k in range(_TAYLOR_DEGREE + 2):
                if k:
                    fact *= k
                coef[i, k] = float(y[k] / fact)
    return anchors, coef


@lru_cache(maxsize=1)
def _asymptotic_coefficients() -> tuple[np.ndarray, np.ndarray]:
    u = np.empty(_ASYMPTOTIC_TERMS)
    v = np.empty(_ASYMPTOTIC_TERMS)
    u[0] = v[0] = 1.0
    for k in range(1, _ASYMPTOTIC_TERMS):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
        v[k] = -(6 * k + 1) / (6 * k - 1) * u[k]
    return u, v


def _term_count(coef: np.ndarray, inv_max: float) -> int:
    """Number of terms of sum coef[k] w^k needed for |w| <= inv_max."""
    mags = np.abs(coef) * inv_max ** np.arange(coef.size)
    small = np.nonzero(mags < 1e-17)[0]
    return int(small[0]) if small.size else coef.size


def _horner(coef: np.ndarray, w: np.ndarray, terms: int) -> np.ndarray:
    total = np.full_like(w, coef[terms - 1])
    for k in range(terms - 2, -1, -1):
        total *= w
        total += coef[k]
    return total


@lru_cache(maxsize=1)
def _signed_coefficients():
    """Coefficients of the even/odd sub-series in 1/zeta^2 and the full ones."""
    u, v = _asymptotic_coefficients()
    sgn = (-1.0) ** np.arange(u.size // 2)
    alt = (-1.0) ** np.arange(u.size)
    return (u[0::2] * sgn, u[1::2] * sgn, v[0::2] * sgn, v[1::2] * sgn, u * alt, v * alt)


def _oscillatory(x: np.ndarray):
    """Ai(-x), Ai'(-x) for x > 9."""
    pu, qu, pv, qv, _, _ = _signed_coefficients()
    root = np.sqrt(x)
    zeta = 2.0 / 3.0 * x * root
    inv = 1.0 / zeta
    w = inv * inv
    wmax = float(w.max()) if w.size else 0.0
    n_p = max(_term_count(pu, wmax), _term_count(pv, wmax))
    n_q = max(_term_count(qu, wmax), _term_count(qv, wmax))
    p_u = _horner(pu, w, n_p)
    q_u = _horner(qu, w, n_q) * inv
    p_v = _horner(pv, w, n_p)
    q_v = _horner(qv, w, n_q) * inv
    c, s = np.cos(zeta), np.sin(zeta)
    cos_t = (c + s) * np.sqrt(0.5)  # cos(zeta - pi/4)
    sin_t = (s - c) * np.sqrt(0.5)  # sin(zeta - pi/4)
    q4 = np.sqrt(root)
    ai = (cos_t * p_u + sin_t * q_u) / (np.sqrt(np.pi) * q4)
    aip = q4 / np.sqrt(np.pi) * (sin_t * p_v - cos_t * q_v)
    return ai, aip


def _decaying_scaled(x: np.ndarray):
    """exp(zeta) Ai(x), exp(zeta) Ai'(x) and zeta for x > 9."""
    _, _, _, _, ua, va = _signed_coefficients()
    root = np.sqrt(x)
    zeta = 2.0 / 3.0 * x * root
    inv = 1.0 / zeta
    imax = float(inv.max()) if inv.size else 0.0
    n = max(_term_count(ua, imax), _term_count(va, imax))
    q4 = np.sqrt(root)
    ai = _horner(ua, inv, n) / (2.0 * np.sqrt(np.pi) * q4)
    aip = -q4 * _horner(va, inv, n) / (2.0 * np.sqrt(np.pi))
    return ai, aip, zeta


def _taylor(x: np.ndarray):
    anchors, coef = _taylor_table()
    idx = np.clip(np.rint((x - anchors[0]) / _ANCHOR_STEP).astype(np.intp), 0, anchors.size - 1)
    h = x - anchors[idx]
    deg = _TAYLOR_DEGREE
    ai = coef[idx, deg + 1]
    aip = (deg + 1) * ai
    for k in range(deg, -1, -1):
        ck = coef[idx, k]
        ai = ai * h + ck
        if k:
            aip = aip * h + k * ck
    return ai, aip


# Ai(x) underflows to zero beyond this point.
_UNDERFLOW = 106.0


def _as_array(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Airy functions need finite real arguments")
    return arr, arr.ndim == 0


def _pair_flat(x: np.ndarray, scaled: bool = False):
    ai = np.empty_like(x)
    aip = np.empty_like(x)
    mid = np.abs(x) <= _ANCHOR_MAX
    if np.any(mid):
        a, b = _taylor(x[mid])
        if scaled:
            pos = x[mid] > 0
            w = np.ones_like(a)
            w[pos] = np.exp(2.0 / 3.0 * x[mid][pos] ** 1.5)
            a, b = a * w, b * w
        ai[mid], aip[mid] = a, b
    for lo, hi in ((_ANCHOR_MAX, 20.0), (20.0, 60.0), (60.0, np.inf)):
        sel = (x < -lo) & (x >= -hi)
        if np.any(sel):
            ai[sel], aip[sel] = _oscillatory(-x[sel])
    pos = x > _ANCHOR_MAX
    if not scaled:
        gone = x > _UNDERFLOW
        ai[gone] = 0.0
        aip[gone] = 0.0
        pos &= ~gone
    if np.any(pos):
        # Group arguments so the series length follows the local zeta.
        for lo, hi in ((_ANCHOR_MAX, 20.0), (20.0, np.inf)):
            sel = pos & (x > lo) & (x <= hi)
            if not np.any(sel):
                continue
            a, b, zeta = _decaying_scaled(x[sel])
            if not scaled:
                damp = np.exp(-zeta)
                a, b = a * damp, b * damp
            ai[sel], aip[sel] = a, b
    return ai, aip


def airy_pair(x):
    """Return ``(Ai(x), Ai'(x))`` for scalar or array ``x``."""
    arr, scalar = _as_array(x)
    flat = arr.ravel()
    ai, aip = _pair_flat(flat)
    ai, aip = ai.reshape(arr.shape), aip.reshape(arr.shape)
    if scalar:
        return float(ai), float(aip)
    return ai, aip


def airy_ai(x):
    """Airy function of the first kind.

    Parameters
    ----------
    x : float or array_like
        Real, finite argument(s).

    Returns
    -------
    float or ndarray
        ``Ai(x)``, with the shape of ``x``.

    Raises
    ------
    DomainError
        If any argument is NaN or infinite.
    """
    return airy_pair(x)[0]


def airy_ai_prime(x):
    """Derivative ``Ai'(x)``; same conventions as :func:`airy_ai`."""
    return airy_pair(x)[1]


def airy_ai_scaled(x):
    """``Ai(x) * exp(2/3 x^{3/2})`` for ``x > 0`` and ``Ai(x)`` otherwise.

    Useful when ``Ai`` itself would underflow.
    """
    arr, scalar = _as_array(x)
    ai, _ = _pair_flat(arr.ravel(), scaled=True)
    ai = ai.reshape(arr.shape)
    return float(ai) if scalar else ai


def airy_derivatives_at(x, value, slope, order: int) -> np.ndarray:
    """Derivatives ``Ai^(k)(x)``, k = 0..order, from ``Ai`` and ``Ai'`` at ``x``.

    Uses ``y_{k+2} = x y_k + k y_{k-1}``.  Returns an array of shape
    ``x.shape + (order + 1,)``.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape + (order + 1,))
    out[..., 0] = value
    if order >= 1:
        out[..., 1] = slope
    for k in range(0, order - 1):
        prev = out[..., k - 1] if k else 0.0
        out[..., k + 2] = x * out[..., k] + k * prev
    return out


def zero_estimate(n) -> np.ndarray:
    """Leading asymptotic estimate ``[3 pi (n - 1/4) / 2]^{2/3}`` of ``z_n``."""
    n = np.asarray(n, dtype=float)
    return (1.5 * np.pi * (n - 0.25)) ** (2.0 / 3.0)


@dataclass(frozen=True, eq=False)
class AiryZeroTable:
    """Magnitudes ``z_n`` of the zeros ``Ai(-z_n) = 0`` and ``|Ai'(-z_n)|``.

    ``zeros[i]`` holds ``z_{i+1}``.  Arrays are read-only.
    """

    zeros: np.ndarray
    derivative_magnitudes: np.ndarray

    def __len__(self) -> int:
        return self.zeros.size

    @property
    def count(self) -> int:
        return self.zeros.size


def _locate(count: int) -> tuple[np.ndarray, np.ndarray]:
    n = np.arange(1, count + 2)
    est = zero_estimate(n)
    lo = np.concatenate(([0.5 * est[0]], 0.5 * (est[:-2] + est[1:-1])))
    hi = 0.5 * (est[:-1] + est[1:])
    f_lo = airy_ai(-lo)
    f_hi = airy_ai(-hi)
    if np.any(f_lo * f_hi >= 0):
        bad = int(np.argmax(f_lo * f_hi >= 0)) + 1
        raise DomainError(f"Airy zero bracket {bad} does not change sign")
    for _ in range(200):
        width = hi - lo
        tol = np.maximum(1e-14, 4 * np.spacing(hi))
        if np.all(width <= tol):
            break
        mid = 0.5 * (lo + hi)
        f_mid = airy_ai(-mid)
        left = f_lo * f_mid <= 0
        hi = np.where(left, mid, hi)
        lo = np.where(left, lo, mid)
        f_lo = np.where(left, f_lo, f_mid)
    z = 0.5 * (lo + hi)
    ai, aip = airy_pair(-z)
    # Newton step on f(z) = Ai(-z), f'(z) = -Ai'(-z)
    z = z + ai / aip
    _, aip = airy_pair(-z)
    return z, np.abs(aip)


@lru_cache(maxsize=8)
def _zeros_cached(count: int) -> AiryZeroTable:
    z, d = _locate(count)
    z.setflags(write=False)
    d.setflags(write=False)
    return AiryZeroTable(z, d)


def airy_zeros(count: int) -> AiryZeroTable:
    """Return the first ``count`` zero magnitudes of ``Ai(-z)``.

    The zeros are bracketed between midpoints of consecutive asymptotic
    estimates, bisected to full precision and polished by one Newton step.

    Raises
    ------
    DomainError
        If ``count < 1`` or a bracket fails its sign test.
    """
    if int(count) != count or count < 1:
        raise DomainError(f"zero count must be a positive integer, got {count!r}")
    return _zeros_cached(int(count))
