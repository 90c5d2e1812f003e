"""Derivative stencils built from exact Vandermonde solves.

Two families of functionals approximate ``h * f'(x)``:

* ``kind="zygmund"``:  A_m(f)(x; h) = sum_j a_j D_m(f)(x; j h), where
  D_m(f)(x; h) = f(x + 2h) / 2**m - 2 f(x + h).  The weights solve
  sum_j a_j j = 1 / (1/2**(m-1) - 2) and sum_j a_j j**i = 0 for i != 1.
* ``kind="holder"``:   B_m(f)(x; h) = sum_j b_j f(x + j h) with
  sum_j b_j j = 1 and sum_j b_j j**i = 0 for i != 1.

All coefficients are ``Fraction`` objects.  Every ``apply_*`` routine accepts
either floats or fractions; with fractions (and a function returning
fractions) the result is exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import MissingDerivativeError, MissingStencilError, ParameterRangeError

MAX_ORDER = 12
NOISE_FLOOR = 1e-13
KINDS = ("zygmund", "holder")


# --- Taylor-type expansion -------------------------------------------------


@dataclass(frozen=True)
class TaylorCoeffs:
    """Weights w_j = 2 - 1/2**(m-j), j = 0..m, of the two-point Taylor formula."""

    m: int
    weights: tuple[Fraction, ...]

    @classmethod
    def of_order(cls, m: int) -> "TaylorCoeffs":
        if m < 0:
            raise ParameterRangeError(f"order must be >= 0, got {m}")
        return cls(m, tuple(2 - Fraction(1, 2 ** (m - j)) for j in range(m + 1)))


def derivative_value(f, x, k: int):
    """k-th derivative of ``f`` at ``x`` from its exact oracle (k=0 is f(x))."""
    if k == 0:
        return f(x)
    deriv = getattr(f, "derivative", None)
    budget = getattr(f, "max_order", None)
    if deriv is None or (budget is not None and k > budget):
        raise MissingDerivativeError(f"no exact derivative of order {k} available")
    return deriv(x, k)


def taylor_remainder(f, m: int, x, h):
    """f(x+2h)/2**m - 2 f(x+h) + sum_j (2 - 1/2**(m-j)) f^(j)(x) h**j / j!.

    Vanishes identically for polynomials of degree <= m and is O(|h|**(m+1))
    on the Zygmund class of order m.
    """
    coeffs = TaylorCoeffs.of_order(m)
    derivs = [derivative_value(f, x, j) for j in range(m + 1)]
    total = apply_Dm(f, m, x, h)
    hp = 1
    for j, (w, d) in enumerate(zip(coeffs.weights, derivs)):
        total = total + _scale(w, hp * d) / math.factorial(j)
        hp = hp * h
    return total


def _scale(c: Fraction, value):
    """Multiply by a rational constant without forcing floats into fractions."""
    if isinstance(value, float):
        return float(c) * value
    return c * value


# --- exact linear algebra --------------------------------------------------


def bareiss_solve(matrix: Sequence[Sequence[int]], rhs: Sequence) -> list[Fraction]:
    """Solve ``matrix @ x = rhs`` exactly by fraction-free (Bareiss) elimination.

    ``matrix`` must have integer entries; ``rhs`` may be rational.  The
    right-hand side is scaled to integers first so that every intermediate
    quantity is an integer.
    """
    n = len(matrix)
    rhs = [Fraction(v) for v in rhs]
    denom = math.lcm(*(v.denominator for v in rhs)) if rhs else 1
    a = [[int(v) for v in row] + [int(r * denom)] for row, r in zip(matrix, rhs)]
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                raise ZeroDivisionError("singular matrix")
            a[k], a[swap] = a[swap], a[k]
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    if a[n - 1][n - 1] == 0:
        raise ZeroDivisionError("singular matrix")
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = Fraction(a[i][n])
        for j in range(i + 1, n):
            acc -= a[i][j] * x[j]
        x[i] = acc / a[i][i]
    return [v / denom for v in x]


def vandermonde_moments(m: int) -> list[list[int]]:
    """Rows i = 0..m, columns j = 0..m, entries j**i (with 0**0 = 1)."""
    return [[j**i for j in range(m + 1)] for i in range(m + 1)]


def first_moment_target(m: int, kind: str) -> Fraction:
    if kind == "zygmund":
        return 1 / (Fraction(1, 2 ** (m - 1)) - 2)
    if kind == "holder":
        return Fraction(1)
    raise MissingStencilError(f"unknown stencil kind {kind!r}")


# --- stencils --------------------------------------------------------------


@dataclass(frozen=True)
class Stencil:
    m: int
    kind: str
    coefficients: tuple[Fraction, ...]
    certified_order: float = float("nan")
    target: str = "approximates h*f'(x)"

    def moments(self, upto: int | None = None) -> list[Fraction]:
        upto = self.m if upto is None else upto
        return [sum((c * j**i for j, c in enumerate(self.coefficients)), Fraction(0))
                for i in range(upto + 1)]

    def float_coefficients(self) -> np.ndarray:
        return np.array([float(c) for c in self.coefficients])

    def abs_sum(self) -> Fraction:
        return sum((abs(c) for c in self.coefficients), Fraction(0))

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "kind": self.kind,
            "coefficients": [f"{c.numerator}/{c.denominator}" for c in self.coefficients],
            "certified_order": self.certified_order,
            "target": self.target,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Stencil":
        return cls(
            m=int(data["m"]),
            kind=data["kind"],
            coefficients=tuple(Fraction(c) for c in data["coefficients"]),
            certified_order=float(data.get("certified_order", float("nan"))),
            target=data.get("target", "approximates h*f'(x)"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Stencil":
        return cls.from_dict(json.loads(text))


def solve_coefficients(m: int, kind: str) -> tuple[Fraction, ...]:
    if not 1 <= m <= MAX_ORDER:
        raise ParameterRangeError(f"stencil order must lie in [1, {MAX_ORDER}], got {m}")
    rhs = [Fraction(0)] * (m + 1)
    rhs[1] = first_moment_target(m, kind)
    return tuple(bareiss_solve(vandermonde_moments(m), rhs))


def _calibration_poly(m: int):
    # truncated exponential series: smooth enough that the error is dominated
    # by its leading term, and rational so no rounding enters the fit
    coeffs = [Fraction(1, math.factorial(k)) for k in range(m + 7)]

    def p(t):
        acc = 0
        for c in reversed(coeffs):
            acc = acc * t + c
        return acc

    return p, coeffs[1]


def calibration_hs() -> list[Fraction]:
    return [Fraction(1, 2**k) for k in range(4, 13)]


def certify_order(m: int, kind: str, coefficients: Sequence[Fraction]) -> float:
    """Empirical error exponent on an exact-rational smooth calibration function."""
    p, slope_at_0 = _calibration_poly(m)
    st = Stencil(m, kind, tuple(coefficients))
    hs = calibration_hs()
    errs = [abs(h * slope_at_0 - _apply(st, p, Fraction(0), h)) for h in hs]
    return round(fit_slope([float(h) for h in hs], [float(e) for e in errs], floor=0.0), 4)


def make_stencil(m: int, kind: str = "zygmund") -> Stencil:
    """Exact stencil of order ``m`` (1 <= m <= 12) with a fitted error order."""
    if kind not in KINDS:
        raise ParameterRangeError(f"kind must be one of {KINDS}, got {kind!r}")
    coeffs = solve_coefficients(m, kind)
    return Stencil(m, kind, coeffs, certify_order(m, kind, coeffs))


@lru_cache(maxsize=None)
def get_stencil(m: int, kind: str = "zygmund") -> Stencil:
    """Cached :func:`make_stencil`; stencils are immutable so sharing is safe."""
    return make_stencil(m, kind)


def _lookup(m: int, kind: str, stencil: Stencil | None) -> Stencil:
    if stencil is not None:
        if stencil.m != m or stencil.kind != kind:
            raise MissingStencilError(
                f"stencil is ({stencil.m}, {stencil.kind}), requested ({m}, {kind})")
        return stencil
    if kind not in KINDS or not 1 <= m <= MAX_ORDER:
        raise MissingStencilError(f"no stencil for order {m} and kind {kind!r}")
    return get_stencil(m, kind)


# --- applying the functionals -----------------------------------------------


def apply_Dm(f: Callable, m: int, x, h):
    """D_m(f)(x; h) = f(x + 2h) / 2**m - 2 f(x + h)."""
    return _scale(Fraction(1, 2**m), f(x + 2 * h)) - 2 * f(x + h)


def _apply(st: Stencil, f, x, h):
    total = 0
    for j, c in enumerate(st.coefficients):
        if c == 0:
            continue
        if st.kind == "zygmund":
            total = total + _scale(c, apply_Dm(f, st.m, x, j * h))
        else:
            total = total + _scale(c, f(x + j * h))
    return total


def apply_Am(f: Callable, m: int, x, h, stencil: Stencil | None = None):
    """sum_j a_j D_m(f)(x; j h), an approximation of h f'(x)."""
    return _apply(_lookup(m, "zygmund", stencil), f, x, h)


def apply_Bm(f: Callable, m: int, x, h, stencil: Stencil | None = None):
    """sum_j b_j f(x + j h), an approximation of h f'(x)."""
    return _apply(_lookup(m, "holder", stencil), f, x, h)


def stencil_error(f, m: int, kind: str, x, h, fprime: Callable | None = None):
    """|h f'(x) - A_m(f)(x;h)| (or B_m); uses ``f.derivative`` unless ``fprime`` is given."""
    d1 = fprime(x) if fprime is not None else derivative_value(f, x, 1)
    approx = apply_Am(f, m, x, h) if kind == "zygmund" else apply_Bm(f, m, x, h)
    return abs(h * d1 - approx)


def dyadic_steps(kmin: int = 4, kmax: int = 12) -> list[float]:
    """h = 2**-k for k = kmin..kmax."""
    return [2.0**-k for k in range(kmin, kmax + 1)]


def fit_slope(hs: Sequence[float], errors: Sequence[float], floor: float = NOISE_FLOOR) -> float:
    """Least-squares slope of log2|error| against log2 h, ignoring |error| < floor.

    Returns ``nan`` when fewer than two scales survive.
    """
    pts = [(math.log2(h), math.log2(e)) for h, e in zip(hs, errors) if e > floor and e > 0]
    if len(pts) < 2:
        return float("nan")
    xs, ys = zip(*pts)
    return float(np.polyfit(xs, ys, 1)[0])


def error_slope(f, m: int, kind: str, x: float = 0.5, hs: Sequence[float] | None = None,
                fprime: Callable | None = None, floor: float = NOISE_FLOOR) -> float:
    hs = list(hs) if hs is not None else dyadic_steps()
    errs = [float(stencil_error(f, m, kind, x, h, fprime)) for h in hs]
    return fit_slope(hs, errs, floor)


def taylor_slope(f, m: int, x: float = 0.5, hs: Sequence[float] | None = None,
                 floor: float = NOISE_FLOOR) -> float:
    hs = list(hs) if hs is not None else dyadic_steps()
    errs = [abs(float(taylor_remainder(f, m, x, h))) for h in hs]
    return fit_slope(hs, errs, floor)


# --- cusp loss --------------------------------------------------------------


@dataclass(frozen=True)
class CuspLoss:
    m: int
    beta: Fraction
    alpha: Fraction
    p: int
    q: int
    required_order: int
    output_exponent: Fraction = field(compare=True)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "beta": str(self.beta),
            "alpha": str(self.alpha),
            "p": self.p,
            "q": self.q,
            "required_order": self.required_order,
            "output_exponent": str(self.output_exponent),
        }


def _as_fraction(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**6)
    return Fraction(v)


def cusp_loss(m: int, beta, alpha) -> CuspLoss:
    """Order needed and Hoelder exponent obtained when testing along curves
    into a domain with a beta-cusp boundary.

    p(beta) = ceil(2/beta), q(beta) = ceil(1/beta); required order m p(beta),
    output exponent alpha beta / (2 q(beta)).  Floats are converted to nearby
    fractions first, since ``math.ceil(2 / (2/3))`` is 4 in binary64.
    """
    b, a = _as_fraction(beta), _as_fraction(alpha)
    if m < 1 or int(m) != m:
        raise ParameterRangeError(f"m must be a positive integer, got {m!r}")
    if not 0 < b <= 1:
        raise ParameterRangeError(f"beta must lie in (0, 1], got {beta!r}")
    if not 0 < a <= 1:
        raise ParameterRangeError(f"alpha must lie in (0, 1], got {alpha!r}")
    p = math.ceil(2 / b)
    q = math.ceil(1 / b)
    return CuspLoss(int(m), b, a, p, q, int(m) * p, a * b / (2 * q))
