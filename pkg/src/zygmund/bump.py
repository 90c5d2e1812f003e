"""C-infinity bump and transition profiles with exact derivatives.

phi(u) = exp(-1/(1 - u**2)) on (-1, 1), zero elsewhere.  Its derivatives are
P_k(u) / (1 - u**2)**(2k) * phi(u) with

    P_0 = 1,   P_{k+1} = P_k' (1-u^2)^2 + 4k u (1-u^2) P_k - 2u P_k.

W(u) = int_{-1}^u phi / int_{-1}^1 phi rises from 0 to 1 on [-1, 1].
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate, special

# below this value of 1 - u^2 every derivative of phi is zero in binary64
_EDGE = 2e-3
_PANELS = 24
_GL_X, _GL_W = special.roots_legendre(16)


def _phi_scalar(u: float) -> float:
    return float(np.exp(-1.0 / (1.0 - u * u))) if abs(u) < 1 else 0.0


NORMALIZER = integrate.quad(_phi_scalar, -1.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)[0]


@lru_cache(maxsize=None)
def _numerator(k: int) -> Polynomial:
    if k == 0:
        return Polynomial([1.0])
    p = _numerator(k - 1)
    j = k - 1
    one_minus = Polynomial([1.0, 0.0, -1.0])
    u = Polynomial([0.0, 1.0])
    return p.deriv() * one_minus**2 + 4 * j * u * one_minus * p - 2 * u * p


def phi(u, k: int = 0):
    """k-th derivative of the bump exp(-1/(1-u^2))."""
    u = np.asarray(u, dtype=float)
    s = 1.0 - u * u
    out = np.zeros_like(u)
    inside = s > _EDGE
    si = s[inside]
    out[inside] = _numerator(k)(u[inside]) / si ** (2 * k) * np.exp(-1.0 / si)
    return out


def _integral_from_left(u: np.ndarray) -> np.ndarray:
    # composite Gauss-Legendre on [-1, u], u <= 0
    a = -1.0
    width = (u - a) / _PANELS
    total = np.zeros_like(u)
    for p in range(_PANELS):
        lo = a + p * width
        nodes = lo[..., None] + 0.5 * width[..., None] * (_GL_X + 1.0)
        total += 0.5 * width * (phi(nodes) @ _GL_W)
    return total


def transition(u, k: int = 0):
    """k-th derivative of W, the normalized integral of phi from -1 to u."""
    u = np.asarray(u, dtype=float)
    if k > 0:
        return phi(u, k - 1) / NORMALIZER
    out = np.where(u >= 1.0, 1.0, 0.0)
    inner = (u > -1.0) & (u < 1.0)
    if inner.any():
        ui = u[inner]
        neg = np.minimum(ui, -ui)  # fold onto [-1, 0] and use W(u) = 1 - W(-u)
        left = _integral_from_left(neg) / NORMALIZER
        out[inner] = np.where(ui <= 0.0, left, 1.0 - left)
    return out


def smoothstep(s, k: int = 0):
    """k-th derivative of S(s) = W(2s - 1): 0 for s <= 0, 1 for s >= 1."""
    s = np.asarray(s, dtype=float)
    return 2.0**k * transition(2.0 * s - 1.0, k)
