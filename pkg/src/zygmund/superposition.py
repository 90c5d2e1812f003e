"""The superposition operator g -> f o g on Hoelder-Zygmund spaces.

Derivatives of composites come from Faa di Bruno's formula written over
ordered compositions:

    (f o g)^(j) = sum_{i=1}^{j} sum_{gamma in Gamma(i, j)} c_gamma f^(i)(g) prod_l g^(gamma_l),

    Gamma(i, j) = {gamma in (N>=1)^i : |gamma| = j},   c_gamma = j! / (i! gamma!).

The experiments measure whether t -> f o (g + t) is Lipschitz into
Lambda_{m+1}: directly through norm ratios for k = 1 and through the mixed
difference statistic  sup_x |Delta^k_t Delta^2_v f^(m)(x)| / (t^k v)  for all k.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import bump
from .corpus import AnalyticFn
from .errors import BudgetError, InsufficientScalesError, ParameterRangeError
from .seminorm import SampledFn, classify, fit_growth, lambda_norm


# --- Faa di Bruno -------------------------------------------------------------------


def compositions(j: int, i: int):
    """Gamma(i, j): ordered i-tuples of positive integers summing to j."""
    if i == 0:
        if j == 0:
            yield ()
        return
    for first in range(1, j - i + 2):
        for rest in compositions(j - first, i - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def faa_di_bruno_terms(j: int) -> tuple[tuple[int, tuple[int, ...], Fraction], ...]:
    """All (i, gamma, c_gamma) with gamma in Gamma(i, j), 1 <= i <= j."""
    if j < 1:
        raise ValueError("order must be >= 1")
    out = []
    for i in range(1, j + 1):
        for gamma in compositions(j, i):
            denom = math.factorial(i)
            for g in gamma:
                denom *= math.factorial(g)
            out.append((i, gamma, Fraction(math.factorial(j), denom)))
    return tuple(out)


def compose_derivative(f_derivs: Sequence[np.ndarray], g_derivs: Sequence[np.ndarray], j: int):
    """j-th derivative of f o g from f^(i)(g(x)) (i <= j) and g^(k)(x) (k <= j)."""
    if j == 0:
        return np.asarray(f_derivs[0], dtype=float)
    total = 0.0
    for i, gamma, c in faa_di_bruno_terms(j):
        term = float(c) * np.asarray(f_derivs[i], dtype=float)
        for g in gamma:
            term = term * g_derivs[g]
        total = total + term
    return total


def compose_derivative_nd(partial, c_derivs: Sequence[np.ndarray], j: int):
    """j-th derivative of t -> f(c(t)) for f of d variables.

    ``partial(alpha)`` returns the partial derivative of f with multi-index
    alpha evaluated along the curve; ``c_derivs[k]`` has shape (N, d).
    """
    d = c_derivs[0].shape[-1]
    if j == 0:
        return partial((0,) * d)
    total = 0.0
    for i, gamma, c in faa_di_bruno_terms(j):
        # f^(i)(c)[c^(g_1), ..., c^(g_i)] expanded in coordinates
        for coords in itertools.product(range(d), repeat=i):
            alpha = [0] * d
            for k in coords:
                alpha[k] += 1
            term = partial(tuple(alpha))
            if not np.any(term):
                continue
            term = float(c) * term
            for g, k in zip(gamma, coords):
                term = term * c_derivs[g][..., k]
            total = total + term
    return np.asarray(total, dtype=float) + np.zeros(c_derivs[0].shape[:-1])


# --- cutoff identity ---------------------------------------------------------------------


class CutoffIdentity(AnalyticFn):
    """rho(x) = x chi(x): equal to x on [-r, r], zero outside [-2r, 2r].

    chi(x) = S((2r - |x|) / r) with S the C-infinity smoothstep.
    """

    max_order = 12

    def __init__(self, r: float = 1.0):
        if r <= 0:
            raise ParameterRangeError("cutoff radius must be positive")
        self.r = float(r)
        self.domain = (-2.5 * self.r, 2.5 * self.r)

    @property
    def spec(self):
        return f"cutoff_identity:r={self.r:g}"

    def chi(self, x, k: int = 0):
        x = np.asarray(x, dtype=float)
        s = (2 * self.r - np.abs(x)) / self.r
        sign = np.where(x >= 0, -1.0, 1.0)
        return (sign / self.r) ** k * bump.smoothstep(s, k)

    def _derivative(self, x, k):
        t = np.asarray(x, dtype=float)
        out = t * self.chi(t, k)
        if k:
            out = out + k * self.chi(t, k - 1)
        return float(out) if np.ndim(x) == 0 else out


class Shifted(AnalyticFn):
    """x -> g(x) + t."""

    def __init__(self, g: AnalyticFn, t: float):
        self.g = g
        self.t = float(t)
        self.max_order = g.max_order
        self.domain = g.domain

    @property
    def spec(self):
        return f"shift:t={self.t!r}({self.g.spec})"

    def _derivative(self, x, k):
        v = self.g.derivative(x, k)
        return v + self.t if k == 0 else v


# --- superposition ---------------------------------------------------------------------


def superpose(f: AnalyticFn, g: AnalyticFn, domain=(-2.5, 2.5), spacing: float = 2.0**-10,
              order: int = 1) -> SampledFn:
    """Samples of f o g and its derivatives up to ``order`` (Faa di Bruno)."""
    if f.max_order < order:
        raise BudgetError(f"outer function has derivatives only to order {f.max_order}, need {order}")
    if g.max_order < order:
        raise BudgetError(f"inner function has derivatives only to order {g.max_order}, need {order}")
    a, b = domain
    n = int(math.floor((b - a) / spacing + 1e-9)) + 1
    x = a + spacing * np.arange(n)
    gd = [np.asarray(g.derivative(x, k), dtype=float) for k in range(order + 1)]
    fd = [np.asarray(f.derivative(gd[0], i), dtype=float) for i in range(order + 1)]
    derivs = {(j,): compose_derivative(fd, gd, j) for j in range(1, order + 1)}
    return SampledFn(((a, b),), spacing, fd[0], derivs)


def translation_curve_norm(f: AnalyticFn, g: AnalyticFn, m: int, t: float,
                           domain=(-2.5, 2.5), spacing: float = 2.0**-10,
                           h_mode: str = "dyadic") -> float:
    """Grid Lambda_{m+1} norm of f o (g + t), |t| <= 1."""
    if abs(t) > 1:
        raise ParameterRangeError("the translation curve is only used for |t| <= 1")
    F = superpose(f, Shifted(g, t), domain, spacing, m)
    return lambda_norm(F, m + 1, h_mode=h_mode)


# --- experiments -------------------------------------------------------------------------


def dyadic_scales(kmin: int = 2, kmax: int = 12) -> tuple[float, ...]:
    """2**-kmin down to 2**-kmax."""
    return tuple(2.0**-k for k in range(kmin, kmax + 1))


@dataclass
class SuperpositionExperiment:
    f: AnalyticFn
    m: int = 1
    k: int = 1
    r: float = 1.0
    t_scales: tuple[float, ...] = field(default_factory=dyadic_scales)
    v_scales: tuple[float, ...] = field(default_factory=dyadic_scales)
    spacing: float = 2.0**-14
    domain: tuple[float, float] = (-2.5, 2.5)
    threads: int = 1

    def __post_init__(self):
        if self.m < 1 or self.k < 1:
            raise ParameterRangeError("need m >= 1 and k >= 1")
        for s in tuple(self.t_scales) + tuple(self.v_scales):
            if not 2.0**-12 <= s <= 2.0**-2 or math.log2(s) != round(math.log2(s)):
                raise ParameterRangeError(f"scale {s} is not a dyadic in [2^-12, 2^-2]")

    @property
    def g(self) -> CutoffIdentity:
        return CutoffIdentity(self.r)

    def to_dict(self) -> dict:
        return {"f": self.f.spec, "m": self.m, "k": self.k, "r": self.r,
                "t_scales": list(self.t_scales), "v_scales": list(self.v_scales),
                "spacing": self.spacing, "domain": list(self.domain)}


def mixed_statistic(f: AnalyticFn, m: int, k: int, t: float, v: float, interval,
                    spacing: float) -> float:
    """sup_x |Delta^k_t Delta^2_v f^(m)(x)| / (t^k v), all nodes in ``interval``."""
    a, b = interval
    span = k * t + 2 * v
    n = int(math.floor((b - a - span) / spacing + 1e-9)) + 1
    if n < 1:
        raise InsufficientScalesError("interval too short for the requested scales")
    x = a + spacing * np.arange(n)
    total = np.zeros_like(x)
    for i in range(k + 1):
        ci = (-1) ** (k - i) * math.comb(k, i)
        for j, cj in enumerate((1.0, -2.0, 1.0)):
            total += ci * cj * np.asarray(f.derivative(x + i * t + j * v, m), dtype=float)
    return float(np.max(np.abs(total)) / (t**k * v))


@dataclass
class RatioReport:
    experiment: dict
    mixed_table: list[dict]
    diagonal: list[dict]
    mixed_fit: dict
    ratios: list[dict]
    ratio_fit: dict | None
    lipschitz_compatible: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def lipschitz_ratio_test(exp: SuperpositionExperiment) -> RatioReport:
    """Per-scale Lipschitz statistics of t -> f o (g + t) and their growth."""
    f, m, k = exp.f, exp.m, exp.k
    if f.max_order < m:
        raise BudgetError(f"outer function needs derivatives to order {m}")
    interval = (-exp.r, exp.r)
    pairs = [(t, v) for t in exp.t_scales for v in exp.v_scales]
    with ThreadPoolExecutor(max_workers=max(1, exp.threads)) as pool:
        values = list(pool.map(lambda p: mixed_statistic(f, m, k, p[0], p[1], interval,
                                                         exp.spacing), pairs))
    table = [{"t": t, "v": v, "statistic": s} for (t, v), s in zip(pairs, values)]
    diag = [row for row in table if row["t"] == row["v"]]
    if len(diag) < 4:
        raise InsufficientScalesError("need at least 4 diagonal scales")
    dfit = fit_growth([r["t"] for r in diag], [r["statistic"] for r in diag])
    ratios, rfit = [], None
    if k == 1:
        g = exp.g
        coarse = max(exp.spacing, 2.0**-12)
        base = superpose(f, g, exp.domain, coarse, m)
        with ThreadPoolExecutor(max_workers=max(1, exp.threads)) as pool:
            moved = list(pool.map(lambda t: superpose(f, Shifted(g, t), exp.domain, coarse, m),
                                  exp.t_scales))
        for t, Ft in zip(exp.t_scales, moved):
            diff = Ft + base.scaled(-1.0)
            ratios.append({"t": t, "ratio": lambda_norm(diff, m + 1) / t})
        rfit = fit_growth([r["t"] for r in ratios], [r["ratio"] for r in ratios])
    ok = dfit.bounded and (rfit is None or rfit.bounded)
    return RatioReport(exp.to_dict(), table, diag, dfit.to_dict(), ratios,
                       None if rfit is None else rfit.to_dict(), ok)


def predicted_verdict(f: AnalyticFn, order: int, interval=(-1.0, 1.0), n: int = 65537) -> bool:
    """Is f in Z^{order,1} on ``interval``, by the grid classifier."""
    if f.max_order < order:
        # no samples of the required derivative: fall back to the ground-truth label
        return f.label.verdicts(order)["zygmund"]
    S = SampledFn.sample(f, interval, n=n, order=order)
    return classify(S, order, quotients=False).verdicts["zygmund"]


def classify_superposition(f: AnalyticFn, m: int = 1, k: int = 1, threads: int = 1,
                           **kwargs) -> dict:
    """Predicted verdict (f in Z^{m+k,1}) against the measured one."""
    predicted = predicted_verdict(f, m + k)
    report = lipschitz_ratio_test(SuperpositionExperiment(f, m, k, threads=threads, **kwargs))
    measured = report.lipschitz_compatible
    return {"f": f.spec, "m": m, "k": k, "predicted": predicted, "measured": measured,
            "agree": predicted == measured, "report": report.to_dict()}
