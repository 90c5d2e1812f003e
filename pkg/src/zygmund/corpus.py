"""Reference functions with exact derivatives and known regularity.

Every member is an :class:`AnalyticFn`: a vectorized callable with a
``derivative(x, k)`` oracle valid up to ``max_order`` and a
:class:`RegularityLabel` describing the class it belongs to.  Members are
immutable and can be rebuilt from a short text spec, e.g.

    weierstrass:depth=20
    power_abs:alpha=1/2,p=2
    antideriv:m=1(weierstrass:depth=20)
    tensor(power_abs:alpha=0.5, poly:1,0,2)

Grammar::

    spec   := NAME [':' params] ['(' spec {',' spec} ')']  |  NUMBER
    params := param {',' param}
    param  := KEY '=' value | NUMBER
    value  := NUMBER | NAME
    NUMBER := integer, decimal, exponent form or p/q

Inside a parenthesized argument list a comma followed by a number or by
``KEY=`` continues the parameter list of the current spec; anything else
starts the next argument.  A bare number is a constant function.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import special

from . import bump as _bump
from .errors import DomainError, MissingDerivativeError, ParameterRangeError, SpecParseError

SMOOTH_ORDER = 64
MAX_DEPTH = 40
MAX_DEGREE = 16
MAX_DIM = 3
MAX_ANTIDERIV = 3

_GL_X, _GL_W = special.roots_legendre(16)


# --- labels -------------------------------------------------------------------


@dataclass(frozen=True)
class RegularityLabel:
    """Ground-truth class of a function.

    ``order`` is the m for which the statement is sharp (``None`` for C^inf).
    At that order ``zygmund`` / ``lipschitz`` say whether f is in Z^{m,1} /
    C^{m,1}, and f is in C^{m,a} exactly for a < ``holder_exponent`` (and for
    a = ``holder_exponent`` iff ``holder_attained``).  Below the order every
    verdict is yes, above it every verdict is no.
    """

    order: int | None
    zygmund: bool = True
    lipschitz: bool = True
    holder_exponent: float = 1.0
    holder_attained: bool = True
    text: str = "C^inf"
    probe_alphas: tuple[float, ...] = ()

    def holder(self, m: int, alpha: float) -> bool:
        if self.order is None or m < self.order:
            return True
        if m > self.order:
            return False
        if alpha < self.holder_exponent:
            return True
        if alpha == self.holder_exponent:
            return self.holder_attained
        return False

    def verdicts(self, m: int, alphas: Sequence[float] = ()) -> dict[str, bool]:
        if self.order is None or m < self.order:
            z = l = True
        elif m > self.order:
            z = l = False
        else:
            z, l = self.zygmund, self.lipschitz
        out = {"zygmund": z, "lipschitz": l}
        for a in alphas:
            out[holder_key(a)] = self.holder(m, a)
        return out

    def shifted(self, m: int) -> "RegularityLabel":
        if self.order is None:
            return self
        return RegularityLabel(self.order + m, self.zygmund, self.lipschitz,
                               self.holder_exponent, self.holder_attained,
                               f"{m}-fold antiderivative of [{self.text}]", self.probe_alphas)


@dataclass(frozen=True)
class CombinedLabel:
    """Label of a sum of functions in separate variables: every verdict is the
    conjunction of the component verdicts."""

    parts: tuple[RegularityLabel, ...]

    @property
    def order(self) -> int | None:
        orders = [p.order for p in self.parts if p.order is not None]
        return min(orders) if orders else None

    @property
    def text(self) -> str:
        return "min regularity of (" + "; ".join(p.text for p in self.parts) + ")"

    @property
    def probe_alphas(self) -> tuple[float, ...]:
        out: list[float] = []
        for p in self.parts:
            out.extend(a for a in p.probe_alphas if a not in out)
        return tuple(out)

    def holder(self, m: int, alpha: float) -> bool:
        return all(p.holder(m, alpha) for p in self.parts)

    def verdicts(self, m: int, alphas: Sequence[float] = ()) -> dict[str, bool]:
        per = [p.verdicts(m, alphas) for p in self.parts]
        return {k: all(v[k] for v in per) for k in per[0]}


def holder_key(alpha: float) -> str:
    return f"holder({float(alpha):g})"


SMOOTH = RegularityLabel(None)


# --- helpers ------------------------------------------------------------------


def _is_exact(x) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


def _arr(x):
    return np.asarray(x, dtype=float)


def _out(x, values):
    """Return a Python float for scalar input, an array otherwise."""
    if np.ndim(x) == 0:
        return float(values)
    return values


def _fmt_number(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    text = repr(float(v))
    if Fraction(text) == v:
        return text
    return f"{v.numerator}/{v.denominator}"


def _sin_shift(u, n: int):
    """sin(u + n pi/2) without rounding pi."""
    n %= 4
    if n == 0:
        return np.sin(u)
    if n == 1:
        return np.cos(u)
    if n == 2:
        return -np.sin(u)
    return -np.cos(u)


_SIN_QUARTER = (0.0, 1.0, 0.0, -1.0)


def _trig_iterated(x, a: float, shift: int, m: int):
    """m-fold integral from 0 of sin(a t + shift pi/2)."""
    x = _arr(x)
    out = a ** (-m) * _sin_shift(a * x, shift - m)
    for j in range(m):
        c = a ** (j - m) * _SIN_QUARTER[(shift + j - m) % 4] / math.factorial(j)
        if c:
            out = out - c * x**j
    return out


# --- base class -----------------------------------------------------------------


class AnalyticFn:
    """Closed-form function of one variable with an exact derivative oracle."""

    dim = 1
    max_order = SMOOTH_ORDER
    label: RegularityLabel | CombinedLabel = SMOOTH
    domain: tuple[float, float] = (-1.0, 1.0)
    bandwidth = 1.0
    singular_points: tuple[float, ...] = ()

    @property
    def spec(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec}>"

    def __call__(self, x):
        return self.derivative(x, 0)

    def derivative(self, x, k: int):
        self._check_order(k)
        return self._derivative(x, k)

    def _derivative(self, x, k: int):
        raise NotImplementedError

    def _check_order(self, k: int) -> None:
        if k < 0:
            raise ValueError("derivative order must be >= 0")
        if k > self.max_order:
            raise MissingDerivativeError(
                f"{self.spec} has exact derivatives only up to order {self.max_order}")

    def iterated_integral(self, x, m: int):
        """Closed-form m-fold integral from 0, where available."""
        raise NotImplementedError(f"no closed-form antiderivative for {self.spec}")

    def grid_eval(self, axes, alpha=None):
        """Values (or the partial derivative ``alpha``) on a tensor grid."""
        if len(axes) != 1:
            raise DomainError("one-dimensional function evaluated on a multi-axis grid")
        k = 0 if alpha is None else int(sum(alpha))
        return _arr(self.derivative(_arr(axes[0]), k))


class Weierstrass(AnalyticFn):
    """Partial sum  sum_{k < depth} 2**-k sin(2**k t)."""

    max_order = 0
    domain = (0.0, 1.0)
    label = RegularityLabel(0, zygmund=True, lipschitz=False, holder_exponent=1.0,
                            holder_attained=False,
                            text="in Z^{0,1} but not C^{0,1} (nowhere differentiable)",
                            probe_alphas=(0.5,))

    def __init__(self, depth: int = 20):
        if not 1 <= depth <= MAX_DEPTH:
            raise ParameterRangeError(f"depth must lie in [1, {MAX_DEPTH}], got {depth}")
        self.depth = int(depth)
        self.bandwidth = 2.0 ** (self.depth - 1)

    @property
    def spec(self):
        return f"weierstrass:depth={self.depth}"

    def _derivative(self, x, k):
        return self.partial_sum_derivative(x, k)

    def partial_sum_derivative(self, x, k: int):
        """Derivative of the finite sum; valid for any k (the sum is smooth)."""
        t = _arr(x)
        out = np.zeros_like(t)
        for j in range(self.depth):
            out += 2.0 ** (j * (k - 1)) * _sin_shift(2.0**j * t, k)
        return _out(x, out)

    def iterated_integral(self, x, m):
        out = 0.0
        for j in range(self.depth):
            out = out + 2.0**-j * _trig_iterated(x, 2.0**j, 0, m)
        return _out(x, out)


class PowerAbs(AnalyticFn):
    """x**p |x|**alpha: exact derivatives up to order p, the last one alpha-Hoelder."""

    singular_points = (0.0,)

    def __init__(self, alpha=Fraction(1, 2), p: int = 0):
        alpha = Fraction(alpha).limit_denominator(10**6) if isinstance(alpha, float) else Fraction(alpha)
        if not 0 < alpha <= 1:
            raise ParameterRangeError(f"alpha must lie in (0, 1], got {alpha}")
        if p < 0 or int(p) != p or p > 8:
            raise ParameterRangeError(f"p must be an integer in [0, 8], got {p}")
        self.alpha = alpha
        self.p = int(p)
        self.max_order = self.p
        a = float(alpha)
        exact = alpha == 1
        self.label = RegularityLabel(
            self.p, zygmund=exact, lipschitz=exact, holder_exponent=a, holder_attained=True,
            text=f"in C^{{{self.p},{_fmt_number(alpha)}}} but not C^{{{self.p},b}} for b > {_fmt_number(alpha)}",
            probe_alphas=() if exact else (a, round(a + 0.1, 10)))

    @property
    def spec(self):
        out = f"power_abs:alpha={_fmt_number(self.alpha)}"
        return out if self.p == 0 else out + f",p={self.p}"

    def _derivative(self, x, k):
        t = _arr(x)
        s = self.p + float(self.alpha)
        coeff = 1.0
        for i in range(k):
            coeff *= s - i
        sgn = np.sign(t) ** (self.p + k)
        with np.errstate(divide="ignore", invalid="ignore"):
            mag = np.abs(t) ** (s - k)
        return _out(x, coeff * sgn * mag)

    def derivative_unchecked(self, x, k: int):
        """Derivative formula away from 0, for any k (used by probes)."""
        return self._derivative(x, k)


class TLog(AnalyticFn):
    """x log(1/|x|), extended by 0 at the origin."""

    max_order = 0
    domain = (-0.25, 0.25)
    singular_points = (0.0,)
    label = RegularityLabel(0, zygmund=True, lipschitz=False, holder_exponent=1.0,
                            holder_attained=False,
                            text="in Z^{0,1} but not C^{0,1} (modulus t log 1/t)",
                            probe_alphas=(0.5,))

    @property
    def spec(self):
        return "tlog"

    def _derivative(self, x, k):
        t = _arr(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(t == 0, 0.0, -t * np.log(np.abs(t)))
        return _out(x, out)

    def slope(self, x):
        """Classical derivative log(1/|x|) - 1 away from 0."""
        t = _arr(x)
        return _out(x, -np.log(np.abs(t)) - 1.0)


class Polynomial(AnalyticFn):
    """sum_k c_k x**k with rational coefficients; exact on Fraction input."""

    def __init__(self, coeffs: Sequence):
        coeffs = [Fraction(c) for c in coeffs] or [Fraction(0)]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) - 1 > MAX_DEGREE:
            raise ParameterRangeError(f"degree must be <= {MAX_DEGREE}, got {len(coeffs) - 1}")
        self.coeffs = tuple(coeffs)
        self.bandwidth = float(max(1, len(coeffs) - 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def spec(self):
        if self.degree == 0:
            return _fmt_number(self.coeffs[0])
        return "poly:" + ",".join(_fmt_number(c) for c in self.coeffs)

    def derivative_coeffs(self, k: int) -> tuple[Fraction, ...]:
        c = list(self.coeffs)
        for _ in range(k):
            c = [i * c[i] for i in range(1, len(c))] or [Fraction(0)]
        return tuple(c)

    def _derivative(self, x, k):
        c = self.derivative_coeffs(k)
        if _is_exact(x):
            acc = Fraction(0)
            for v in reversed(c):
                acc = acc * x + v
            return acc
        t = _arr(x)
        acc = np.zeros_like(t)
        for v in reversed(c):
            acc = acc * t + float(v)
        return _out(x, acc)

    def antiderivative_coeffs(self, m: int) -> tuple[Fraction, ...]:
        c = list(self.coeffs)
        for _ in range(m):
            c = [Fraction(0)] + [v / (i + 1) for i, v in enumerate(c)]
        return tuple(c)

    def iterated_integral(self, x, m):
        return Polynomial(self.antiderivative_coeffs(m))(x)


class Sine(AnalyticFn):
    @property
    def spec(self):
        return "sin"

    def _derivative(self, x, k):
        return _out(x, _sin_shift(_arr(x), k))

    def iterated_integral(self, x, m):
        return _out(x, _trig_iterated(x, 1.0, 0, m))


class Cosine(AnalyticFn):
    @property
    def spec(self):
        return "cos"

    def _derivative(self, x, k):
        return _out(x, _sin_shift(_arr(x), k + 1))

    def iterated_integral(self, x, m):
        return _out(x, _trig_iterated(x, 1.0, 1, m))


class Exp(AnalyticFn):
    @property
    def spec(self):
        return "exp"

    def _derivative(self, x, k):
        return _out(x, np.exp(_arr(x)))

    def iterated_integral(self, x, m):
        t = _arr(x)
        out = np.exp(t)
        for j in range(m):
            out = out - t**j / math.factorial(j)
        return _out(x, out)


class Bump(AnalyticFn):
    """exp(-1/(1 - (x/r)**2)) on (-r, r), zero outside."""

    max_order = 12

    def __init__(self, radius=1):
        r = Fraction(radius) if not isinstance(radius, float) else Fraction(radius).limit_denominator(10**6)
        if r <= 0:
            raise ParameterRangeError(f"radius must be positive, got {radius}")
        self.radius = r
        self.domain = (-1.25 * float(r), 1.25 * float(r))
        self.bandwidth = 8.0 / float(r)

    @property
    def spec(self):
        return f"bump:radius={_fmt_number(self.radius)}"

    def _derivative(self, x, k):
        r = float(self.radius)
        return _out(x, r ** (-k) * _bump.phi(_arr(x) / r, k))


class Antiderivative(AnalyticFn):
    """m-fold integral of ``base`` from the base point 0.

    ``method="quadrature"`` integrates numerically with 16-point Gauss-Legendre
    panels no longer than min(1/16, pi/(2 bandwidth)), geometrically graded
    towards singular points; for m > 1 the Cauchy formula is evaluated through
    the moments int_0^x t**i f(t) dt.  ``method="closed"`` uses the base
    function's closed-form integral.
    """

    def __init__(self, base: AnalyticFn, m: int = 1, method: str = "quadrature"):
        if base.dim != 1:
            raise DomainError("antiderivatives are only defined for functions of one variable")
        if not 1 <= m <= MAX_ANTIDERIV:
            raise ParameterRangeError(f"m must lie in [1, {MAX_ANTIDERIV}], got {m}")
        if method not in ("quadrature", "closed"):
            raise ParameterRangeError(f"method must be 'quadrature' or 'closed', got {method!r}")
        if method == "closed":
            try:
                base.iterated_integral(0.0, m)
            except NotImplementedError as exc:
                raise ParameterRangeError(str(exc)) from exc
        self.base = base
        self.m = int(m)
        self.method = method
        self.max_order = base.max_order + self.m
        self.label = base.label.shifted(self.m) if isinstance(base.label, RegularityLabel) else base.label
        self.domain = base.domain
        self.bandwidth = base.bandwidth
        self.singular_points = base.singular_points

    @property
    def spec(self):
        opt = ",method=closed" if self.method == "closed" else ""
        return f"antideriv:m={self.m}{opt}({self.base.spec})"

    def _derivative(self, x, k):
        if k >= self.m:
            return self.base.derivative(x, k - self.m)
        order = self.m - k
        if self.method == "closed":
            return _out(x, self.base.iterated_integral(x, order))
        if _is_exact(x):
            x = float(x)
        return _out(x, self._quadrature(x, order))

    def _panel_length(self) -> float:
        return min(1.0 / 16.0, math.pi / (2.0 * self.bandwidth))

    def _panels(self, points: np.ndarray):
        """Panels covering consecutive sorted points; returns (lo, width, owner)."""
        length = self._panel_length()
        lows, widths, owners = [], [], []
        gaps = np.diff(points)
        counts = np.maximum(1, np.ceil(gaps / length).astype(np.int64))
        owner = np.repeat(np.arange(len(gaps)), counts)
        start = np.repeat(points[:-1], counts)
        step = np.repeat(gaps / counts, counts)
        offset = np.arange(len(owner)) - np.repeat(np.cumsum(counts) - counts, counts)
        lo = start + offset * step
        width = step
        singular = set(self.singular_points)
        if singular:
            keep = np.ones(len(owner), dtype=bool)
            for i, (a, b) in enumerate(zip(points[:-1], points[1:])):
                if a in singular or b in singular:
                    keep[owner == i] = False
                    glo, gw = _graded(a, b, a in singular, b in singular, length)
                    lows.append(glo)
                    widths.append(gw)
                    owners.append(np.full(len(glo), i))
            lows.append(lo[keep])
            widths.append(width[keep])
            owners.append(owner[keep])
            lo = np.concatenate(lows)
            width = np.concatenate(widths)
            owner = np.concatenate(owners)
        return lo, width, owner

    def _quadrature(self, x, order: int):
        t = _arr(x)
        flat = t.ravel()
        points = np.unique(np.concatenate([flat, [0.0]]))
        n_moments = order
        if len(points) == 1:
            return np.zeros_like(t)
        lo, width, owner = self._panels(points)
        sums = np.zeros((n_moments, len(points) - 1))
        chunk = 1 << 16
        for start in range(0, len(lo), chunk):
            sl = slice(start, start + chunk)
            nodes = lo[sl, None] + 0.5 * width[sl, None] * (_GL_X + 1.0)
            vals = _arr(self.base(nodes)) * (0.5 * width[sl, None])
            for i in range(n_moments):
                contrib = (vals * nodes**i) @ _GL_W
                np.add.at(sums[i], owner[sl], contrib)
        cum = np.concatenate([np.zeros((n_moments, 1)), np.cumsum(sums, axis=1)], axis=1)
        zero = int(np.searchsorted(points, 0.0))
        moments = cum - cum[:, zero:zero + 1]
        idx = np.searchsorted(points, flat)
        xs = points[idx]
        total = np.zeros_like(xs)
        # Cauchy: (1/(order-1)!) sum_i C(order-1, i) x^(order-1-i) (-1)^i M_i(x)
        for i in range(n_moments):
            total += math.comb(order - 1, i) * (-1) ** i * xs ** (order - 1 - i) * moments[i, idx]
        total /= math.factorial(order - 1)
        return total.reshape(t.shape)


def _graded(a: float, b: float, left_sing: bool, right_sing: bool, length: float):
    """Panels on [a, b] refined geometrically towards singular end points."""
    if left_sing and right_sing:
        mid = 0.5 * (a + b)
        l1, w1 = _graded(a, mid, True, False, length)
        l2, w2 = _graded(mid, b, False, True, length)
        return np.concatenate([l1, l2]), np.concatenate([w1, w2])
    span = b - a
    levels = 48
    fr = 2.0 ** -np.arange(levels, -1, -1, dtype=float)  # 2^-48 .. 1
    edges = np.concatenate([[0.0], fr])
    if right_sing:
        edges = 1.0 - edges[::-1]
    pts = a + span * edges
    lows, widths = [], []
    for lo, hi in zip(pts[:-1], pts[1:]):
        n = max(1, int(math.ceil((hi - lo) / length)))
        w = (hi - lo) / n
        lows.append(lo + w * np.arange(n))
        widths.append(np.full(n, w))
    return np.concatenate(lows), np.concatenate(widths)


class Tensor(AnalyticFn):
    """f(x_1, .., x_d) = sum_j f_j(x_j)."""

    def __init__(self, components: Sequence[AnalyticFn]):
        components = tuple(components)
        if not 1 <= len(components) <= MAX_DIM:
            raise ParameterRangeError(f"need 1..{MAX_DIM} components, got {len(components)}")
        if any(c.dim != 1 for c in components):
            raise DomainError("tensor components must be functions of one variable")
        self.components = components
        self.dim = len(components)
        self.max_order = min(c.max_order for c in components)
        self.label = CombinedLabel(tuple(c.label for c in components))
        self.domain = tuple(c.domain for c in components)

    @property
    def spec(self):
        return "tensor(" + ", ".join(c.spec for c in self.components) + ")"

    def _split(self, x):
        if isinstance(x, (tuple, list)) and len(x) == self.dim:
            return [_arr(v) for v in x]
        a = _arr(x)
        if a.shape[-1] != self.dim:
            raise DomainError(f"expected points with {self.dim} coordinates")
        return [a[..., j] for j in range(self.dim)]

    def __call__(self, x):
        return self.partial(x, (0,) * self.dim)

    def derivative(self, x, k):
        raise DomainError("use partial() with a multi-index for functions of several variables")

    def partial(self, x, alpha: Sequence[int]):
        """Partial derivative with multi-index ``alpha`` at points ``x``."""
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.dim:
            raise DomainError("multi-index length does not match the dimension")
        coords = self._split(x)
        nonzero = [j for j, a in enumerate(alpha) if a]
        if len(nonzero) > 1:
            return np.zeros(np.broadcast(*coords).shape)
        if not nonzero:
            return sum(c(v) for c, v in zip(self.components, coords))
        j = nonzero[0]
        comp = self.components[j]
        comp._check_order(alpha[j])
        return np.broadcast_to(_arr(comp.derivative(coords[j], alpha[j])),
                               np.broadcast(*coords).shape).copy()

    def grid_eval(self, axes, alpha=None):
        if len(axes) != self.dim:
            raise DomainError("number of axes does not match the dimension")
        alpha = (0,) * self.dim if alpha is None else tuple(alpha)
        nonzero = [j for j, a in enumerate(alpha) if a]
        shape = tuple(len(a) for a in axes)
        if len(nonzero) > 1:
            return np.zeros(shape)
        out = np.zeros(shape)
        for j, (comp, ax) in enumerate(zip(self.components, axes)):
            if nonzero and j != nonzero[0]:
                continue
            k = alpha[j]
            comp._check_order(k)
            vals = _arr(comp.derivative(_arr(ax), k))
            view = [1] * self.dim
            view[j] = len(ax)
            out = out + vals.reshape(view)
        return out


# --- public constructors ------------------------------------------------------------


def iterated_antiderivative(f: AnalyticFn, m: int, method: str = "quadrature") -> Antiderivative:
    return Antiderivative(f, m, method)


def tensorize(*fs: AnalyticFn) -> Tensor:
    return Tensor(fs)


# --- spec parser ---------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>[-+]?(?:\d+/\d+|\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?))
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<punct>[:(),=])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out, pos = [], 0
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if mt is None:
            raise SpecParseError("unexpected character", text, pos, text[pos])
        kind = mt.lastgroup
        if kind != "ws":
            out.append(Token(kind, mt.group(), pos))
        pos = mt.end()
    out.append(Token("end", "", len(text)))
    return out


@dataclass
class SpecNode:
    name: str
    positional: list = field(default_factory=list)
    keywords: dict = field(default_factory=dict)
    args: list = field(default_factory=list)
    pos: int = 0


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def take(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = repr(text) if text else kind
            raise SpecParseError(f"expected {want}", self.text, tok.pos, tok.text or "<end>")
        self.i += 1
        return tok

    def parse(self) -> SpecNode:
        node = self.spec()
        tok = self.peek()
        if tok.kind != "end":
            raise SpecParseError("trailing input", self.text, tok.pos, tok.text)
        return node

    def _param_follows(self) -> bool:
        nxt = self.peek(1)
        if nxt.kind == "number":
            return True
        return nxt.kind == "name" and self.peek(2).text == "="

    def spec(self) -> SpecNode:
        tok = self.peek()
        if tok.kind == "number":
            self.i += 1
            return SpecNode("const", [Fraction(tok.text)], pos=tok.pos)
        name = self.take("name")
        node = SpecNode(name.text, pos=name.pos)
        if self.peek().text == ":":
            self.i += 1
            self.param(node)
            while self.peek().text == "," and self._param_follows():
                self.i += 1
                self.param(node)
        if self.peek().text == "(":
            self.i += 1
            node.args.append(self.spec())
            while self.peek().text == ",":
                self.i += 1
                node.args.append(self.spec())
            self.take("punct", ")")
        return node

    def param(self, node: SpecNode) -> None:
        tok = self.peek()
        if tok.kind == "number":
            self.i += 1
            node.positional.append(Fraction(tok.text))
            return
        key = self.take("name")
        self.take("punct", "=")
        val = self.peek()
        if val.kind == "number":
            value = Fraction(val.text)
        elif val.kind == "name":
            value = val.text
        else:
            raise SpecParseError("expected a value", self.text, val.pos, val.text or "<end>")
        self.i += 1
        if key.text in node.keywords:
            raise SpecParseError("duplicate key", self.text, key.pos, key.text)
        node.keywords[key.text] = (value, key.pos)


_ALLOWED = {
    "weierstrass": ({"depth"}, False, 0),
    "power_abs": ({"alpha", "p"}, False, 0),
    "tlog": (set(), False, 0),
    "poly": (set(), True, 0),
    "sin": (set(), False, 0),
    "cos": (set(), False, 0),
    "exp": (set(), False, 0),
    "bump": ({"radius"}, False, 0),
    "antideriv": ({"m", "method"}, False, 1),
    "tensor": (set(), False, -1),
    "const": (set(), True, 0),
}


def parse_spec(text: str) -> SpecNode:
    return _Parser(text).parse()


def _int_param(node, text, key, default):
    if key not in node.keywords:
        return default
    value, pos = node.keywords[key]
    if not isinstance(value, Fraction) or value.denominator != 1:
        raise SpecParseError(f"{key} must be an integer", text, pos, key)
    return int(value)


def _build(node: SpecNode, text: str) -> AnalyticFn:
    if node.name not in _ALLOWED:
        raise SpecParseError("unknown function", text, node.pos, node.name)
    keys, positional_ok, n_args = _ALLOWED[node.name]
    for key, (_, pos) in node.keywords.items():
        if key not in keys:
            raise SpecParseError(f"unknown key for {node.name}", text, pos, key)
    if node.positional and not positional_ok:
        raise SpecParseError(f"{node.name} takes no positional parameters", text, node.pos, node.name)
    if n_args >= 0 and len(node.args) != n_args:
        raise SpecParseError(f"{node.name} takes {n_args} argument(s)", text, node.pos, node.name)
    args = [_build(a, text) for a in node.args]
    kw = {k: v for k, (v, _) in node.keywords.items()}
    name = node.name
    if name == "weierstrass":
        return Weierstrass(_int_param(node, text, "depth", 20))
    if name == "power_abs":
        return PowerAbs(kw.get("alpha", Fraction(1, 2)), _int_param(node, text, "p", 0))
    if name == "tlog":
        return TLog()
    if name in ("poly", "const"):
        return Polynomial(node.positional)
    if name == "sin":
        return Sine()
    if name == "cos":
        return Cosine()
    if name == "exp":
        return Exp()
    if name == "bump":
        return Bump(kw.get("radius", 1))
    if name == "antideriv":
        method = kw.get("method", "quadrature")
        if not isinstance(method, str):
            raise SpecParseError("method must be a name", text, node.keywords["method"][1], "method")
        return Antiderivative(args[0], _int_param(node, text, "m", 1), method)
    if not args:
        raise SpecParseError("tensor needs at least one argument", text, node.pos, node.name)
    return Tensor(args)


def make_function(spec: str) -> AnalyticFn:
    """Build a corpus function from its text spec."""
    return _build(parse_spec(spec), spec)


def canonical(spec: str) -> str:
    return make_function(spec).spec


# members whose labels the classifier is checked against, with the order at
# which the label is sharp
CORPUS = (
    "weierstrass:depth=20",
    "tlog",
    "power_abs:alpha=1/2",
    "power_abs:alpha=1/4",
    "power_abs:alpha=3/4",
    "power_abs:alpha=1/2,p=1",
    "power_abs:alpha=1/2,p=2",
    "poly:1,-2,0,3",
    "sin",
    "cos",
    "exp",
    "bump:radius=1",
    "antideriv:m=1(weierstrass:depth=20)",
)
