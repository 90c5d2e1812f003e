"""Finite differences, difference quotients and the identities relating them.

Every routine works with plain Python scalar arithmetic, so passing
``fractions.Fraction`` arguments (together with a function that maps
fractions to fractions, such as a rational polynomial) gives results that are
exact.  Float inputs give ordinary binary64 results.

Conventions
-----------
``forward_difference(f, x, h, m)`` is the m-th forward difference

    sum_{i=0}^m (-1)^(m-i) C(m, i) f(x + i h),

and ``divided_difference`` returns m! times the classical divided difference,
so that on equidistant nodes ``x, x+h, ..., x+mh`` it equals
``forward_difference(f, x, h, m) / h**m``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

from scipy import integrate

from .errors import (
    DomainError,
    DuplicateNodeError,
    MissingDerivativeError,
    UnsupportedOrderError,
    ZeroStepError,
)

TOL_EXACT = 1e-12
TOL_QUAD = 1e-10

# below this step size the closed form loses more digits than the recursion
RECURSION_THRESHOLD = 2.0**-20

ScalarFn = Callable[[object], object]


def _value(f: ScalarFn, x):
    try:
        y = f(x)
    except (ValueError, ArithmeticError) as exc:
        raise DomainError(f"cannot evaluate function at x={x!r}: {exc}") from exc
    if isinstance(y, float) and math.isnan(y):
        raise DomainError(f"function returned NaN at x={x!r}")
    return y


def _check_order(m: int) -> None:
    if m < 0 or int(m) != m:
        raise ValueError(f"difference order must be a nonnegative integer, got {m!r}")


def _nodes(x, h, m):
    return [x + i * h for i in range(m + 1)]


def _closed_terms(f, x, h, m):
    """Signed summands of the binomial closed form."""
    return [(-1) ** (m - i) * math.comb(m, i) * _value(f, node)
            for i, node in enumerate(_nodes(x, h, m))]


def forward_difference_closed(f: ScalarFn, x, h, m: int):
    """Binomial closed form of the m-th forward difference."""
    _check_order(m)
    if m == 0:
        return _value(f, x)
    return sum(_closed_terms(f, x, h, m))


def forward_difference_recursive(f: ScalarFn, x, h, m: int):
    """m-th forward difference by repeated first differencing of the samples."""
    _check_order(m)
    vals = [_value(f, node) for node in _nodes(x, h, m)]
    for _ in range(m):
        vals = [b - a for a, b in zip(vals, vals[1:])]
    return vals[0]


def forward_difference(f: ScalarFn, x, h, m: int, method: str = "auto"):
    """m-th forward difference of ``f`` at ``x`` with step ``h``.

    ``method`` is ``"closed"``, ``"recursive"`` or ``"auto"``; the latter uses
    the recursion when ``|h| < 2**-20`` and the closed form otherwise.
    """
    if method == "auto":
        method = "recursive" if abs(h) < RECURSION_THRESHOLD else "closed"
    if method == "closed":
        return forward_difference_closed(f, x, h, m)
    if method == "recursive":
        return forward_difference_recursive(f, x, h, m)
    raise ValueError(f"unknown method {method!r}")


def _check_distinct(nodes):
    if len(set(nodes)) != len(nodes):
        seen = set()
        for node in nodes:
            if node in seen:
                raise DuplicateNodeError(f"node {node!r} occurs more than once")
            seen.add(node)


def divided_difference(f: ScalarFn, nodes: Sequence) -> object:
    """Difference quotient of order ``len(nodes) - 1`` on pairwise distinct nodes.

    Uses the symmetric sum  m! * sum_i f(x_i) / prod_{j != i} (x_i - x_j).
    """
    nodes = list(nodes)
    if not nodes:
        raise ValueError("need at least one node")
    _check_distinct(nodes)
    m = len(nodes) - 1
    total = 0
    for i, xi in enumerate(nodes):
        denom = 1
        for j, xj in enumerate(nodes):
            if j != i:
                denom = denom * (xi - xj)
        total = total + _value(f, xi) / denom
    return math.factorial(m) * total


def divided_difference_recursive(f: ScalarFn, nodes: Sequence) -> object:
    """Same quantity as :func:`divided_difference` via the defining recursion

        delta^m(x_0..x_m) = m (delta^{m-1}(x_0..x_{m-1}) - delta^{m-1}(x_1..x_m)) / (x_0 - x_m).
    """
    nodes = list(nodes)
    if not nodes:
        raise ValueError("need at least one node")
    _check_distinct(nodes)
    row = [_value(f, x) for x in nodes]
    for k in range(1, len(nodes)):
        row = [k * (row[i] - row[i + 1]) / (nodes[i] - nodes[i + k])
               for i in range(len(row) - 1)]
    return row[0]


def equidistant_quotient(f: ScalarFn, x, h, m: int, method: str = "auto"):
    """delta^m f(x, x+h, ..., x+mh) = forward_difference(f, x, h, m) / h**m."""
    _check_order(m)
    if h == 0:
        raise ZeroStepError("equidistant quotient needs a nonzero step")
    if m == 0:
        return _value(f, x)
    return forward_difference(f, x, h, m, method=method) / h**m


def _abs_bound(f, x, h, m):
    """Sum of absolute values of the closed-form summands (rounding scale)."""
    return sum(abs(t) for t in _closed_terms(f, x, h, m))


def _relative(lhs, rhs, scale):
    diff = abs(lhs - rhs)
    if diff == 0:
        return diff
    if scale == 0:
        return diff
    return diff / scale


def compositions(m: int, n: int):
    """All n-tuples of nonnegative integers summing to m."""
    if n == 1:
        yield (m,)
        return
    for first in range(m + 1):
        for rest in compositions(m - first, n - 1):
            yield (first,) + rest


def multinomial(m: int, parts: Sequence[int]) -> int:
    out = math.factorial(m)
    for p in parts:
        out //= math.factorial(p)
    return out


def leibniz_sides(factors: Sequence[ScalarFn], x, h, m: int):
    """Left side, right side and rounding scale of the finite-difference
    product rule

        D^m (f_1...f_n)(x) = sum_{i_1+..+i_n=m} C(m; i) prod_j D^{i_j} f_j(x + (m - i_j - ... - i_n) h).
    """
    factors = list(factors)
    if not factors:
        raise ValueError("need at least one factor")
    _check_order(m)

    def product(t):
        out = 1
        for g in factors:
            out = out * _value(g, t)
        return out

    n = len(factors)
    if n == 1:
        # both sides are literally the same expression
        value = forward_difference_closed(factors[0], x, h, m)
        return value, value, _abs_bound(factors[0], x, h, m)

    lhs = forward_difference_closed(product, x, h, m)
    scale = _abs_bound(product, x, h, m)
    rhs = 0
    for parts in compositions(m, n):
        coeff = multinomial(m, parts)
        term = coeff
        bound = coeff
        for j, (g, i_j) in enumerate(zip(factors, parts)):
            shift = m - sum(parts[j:])
            base = x + shift * h
            term = term * forward_difference_closed(g, base, h, i_j)
            bound = bound * _abs_bound(g, base, h, i_j)
        rhs = rhs + term
        scale = max(scale, bound)
    return lhs, rhs, scale


def verify_leibniz(factors: Sequence[ScalarFn], x, h, m: int):
    """Residual of the finite-difference product rule.

    Returns ``|LHS - RHS|`` divided by the largest absolute-summand bound of
    either side, i.e. a relative residual.  With exact arithmetic the result
    is exactly zero.
    """
    lhs, rhs, scale = leibniz_sides(factors, x, h, m)
    return _relative(lhs, rhs, scale)


def chain_rule_sides(f: ScalarFn, g: ScalarFn, x, h, order: int):
    """Both sides of the order-1 or order-2 chain rule for finite differences."""
    if order not in (1, 2):
        raise UnsupportedOrderError(
            f"finite-difference chain rule is only available for orders 1 and 2, got {order}")
    g0 = _value(g, x)
    g1 = _value(g, x + h)
    f0 = _value(f, g0)
    f1 = _value(f, g1)
    if order == 1:
        lhs = f1 - f0
        d1 = g1 - g0
        shifted = _value(f, g0 + d1)
        rhs = shifted - f0
        scale = max(abs(f0), abs(f1), abs(shifted))
        return lhs, rhs, scale
    g2 = _value(g, x + 2 * h)
    f2 = _value(f, g2)
    lhs = f2 - 2 * f1 + f0
    d1 = g1 - g0
    d2 = g2 - 2 * g1 + g0
    y = 2 * g1 - g0
    fy = _value(f, y)
    first = _value(f, y + d2) - fy
    second = _value(f, g0 + 2 * d1) - 2 * _value(f, g0 + d1) + f0
    rhs = first + second
    scale = 2 * max(abs(f0), abs(f1), abs(f2), abs(fy))
    return lhs, rhs, scale


def verify_chain_rule(f: ScalarFn, g: ScalarFn, x, h, order: int):
    """Relative residual of the chain rule

        D^1_h (f o g)(x) = D^1_{D^1_h g(x)} f(g(x)),
        D^2_h (f o g)(x) = D^1_{D^2_h g(x)} f(2 g(x+h) - g(x)) + D^2_{D^1_h g(x)} f(g(x)).
    """
    lhs, rhs, scale = chain_rule_sides(f, g, x, h, order)
    return _relative(lhs, rhs, scale)


def _first_derivative(f, fprime):
    if fprime is not None:
        return fprime
    deriv = getattr(f, "derivative", None)
    if deriv is None:
        raise MissingDerivativeError("function has no derivative oracle; pass fprime")
    return lambda t: deriv(t, 1)


def verify_integral_identity(f: ScalarFn, x, h, fprime: ScalarFn | None = None) -> float:
    """Absolute residual of  D^2_h f(x) = int_x^{x+h} D^1_h f'(t) dt.

    The integral is computed by adaptive quadrature; for ``h < 0`` it is the
    oriented integral.
    """
    if h == 0:
        raise ZeroStepError("integral identity needs a nonzero step")
    fp = _first_derivative(f, fprime)
    x = float(x)
    h = float(h)
    lhs = float(forward_difference_closed(f, x, h, 2))
    q, _ = integrate.quad(lambda t: float(fp(t + h)) - float(fp(t)), x, x + h,
                          epsabs=1e-14, epsrel=1e-13, limit=200)
    return abs(lhs - q)


def recursion_closed_form_gap(f: ScalarFn, x, h, m: int):
    """Difference between the recursive and closed-form evaluations."""
    return forward_difference_recursive(f, x, h, m) - forward_difference_closed(f, x, h, m)


def random_rational_polynomial(rng, degree: int, height: int = 9):
    """Coefficients (ascending) of a random polynomial with small rational
    coefficients, for exact identity checks."""
    coeffs = []
    for _ in range(degree + 1):
        num = int(rng.integers(-height, height + 1))
        den = int(rng.integers(1, height + 1))
        coeffs.append(Fraction(num, den))
    return coeffs


def horner(coeffs):
    """Return ``t -> sum c_k t^k`` with scalar (exact-friendly) arithmetic."""
    coeffs = list(coeffs)

    def p(t):
        acc = 0
        for c in reversed(coeffs):
            acc = acc * t + c
        return acc

    return p


def identity_suite(rng, trials: int = 100, max_order: int = 8):
    """Exact identity checks on random rational polynomials.

    Each trial draws polynomials, a rational base point and step and an order
    ``m <= max_order``, and records the exact residuals of the recursion /
    closed form agreement, the product rule, both chain rules and node
    permutation symmetry.  Returns a list of dict rows.
    """
    rows = []
    for trial in range(trials):
        m = int(rng.integers(0, max_order + 1))
        deg = int(rng.integers(0, max_order + 2))
        p = horner(random_rational_polynomial(rng, deg))
        q = horner(random_rational_polynomial(rng, int(rng.integers(0, 4))))
        x = Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 9)))
        h = Fraction(int(rng.choice([-1, 1])) * int(rng.integers(1, 9)), int(rng.integers(1, 17)))
        n_factors = int(rng.integers(1, 4))
        factors = [horner(random_rational_polynomial(rng, int(rng.integers(0, 4))))
                   for _ in range(n_factors)]
        nodes = sorted({Fraction(int(v), 7) for v in rng.choice(200, size=m + 1, replace=False)})
        perm = list(rng.permutation(len(nodes)))
        rows.append({
            "trial": trial,
            "m": m,
            "recursion": abs(recursion_closed_form_gap(p, x, h, m)),
            "leibniz": verify_leibniz(factors, x, h, m),
            "chain1": verify_chain_rule(p, q, x, h, 1),
            "chain2": verify_chain_rule(p, q, x, h, 2),
            "permutation": abs(divided_difference(p, nodes)
                               - divided_difference(p, [nodes[i] for i in perm])),
            "recursive_quotient": abs(divided_difference(p, nodes)
                                      - divided_difference_recursive(p, nodes)),
        })
    return rows


def float_identity_suite(functions, rng, trials: int = 100, max_order: int = 8):
    """Floating-point version of :func:`identity_suite` on scalar callables.

    ``functions`` is a sequence of float callables; residuals are relative.
    """
    rows = []
    fns = list(functions)
    for trial in range(trials):
        m = int(rng.integers(0, max_order + 1))
        picks = [fns[int(i)] for i in rng.integers(0, len(fns), size=3)]
        x = float(rng.uniform(-1.0, 1.0))
        h = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.01, 0.2))
        n_factors = int(rng.integers(1, 4))
        rows.append({
            "trial": trial,
            "m": m,
            "recursion": abs(recursion_closed_form_gap(picks[0], x, h, m))
            / max(_abs_bound(picks[0], x, h, m), 1e-300),
            "leibniz": float(verify_leibniz(picks[:n_factors], x, h, m)),
            "chain1": float(verify_chain_rule(picks[0], picks[1], x, h, 1)),
            "chain2": float(verify_chain_rule(picks[0], picks[1], x, h, 2)),
        })
    return rows


def max_residual(rows, keys=None):
    keys = keys or [k for k in rows[0] if k not in ("trial", "m")]
    return {k: max(row[k] for row in rows) for k in keys}


__all__ = [
    "TOL_EXACT",
    "TOL_QUAD",
    "forward_difference",
    "forward_difference_closed",
    "forward_difference_recursive",
    "divided_difference",
    "divided_difference_recursive",
    "equidistant_quotient",
    "verify_leibniz",
    "verify_chain_rule",
    "verify_integral_identity",
    "identity_suite",
    "float_identity_suite",
    "compositions",
    "multinomial",
    "horner",
]
