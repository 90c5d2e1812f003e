"""Grid seminorms, regularity exponents and class membership tests.

Every statistic is a supremum over grid-aligned pairs (x, h): x runs over
grid points, h over dyadic multiples 4 dx 2**k of the spacing, and all nodes
of the difference must lie in the sub-box K.  In several variables h runs over
the lattice vectors with sup-norm r whose components are multiples of r/4;
the scale of such a vector is its sup-norm and the denominator uses its
Euclidean length.

Ties between witnesses are broken by the smallest x (lexicographically), then
by the smallest h, so results do not depend on evaluation order.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    EmptyAdmissibleSetError,
    InsufficientScalesError,
    MissingDerivativeError,
    ParameterRangeError,
)

GROWTH_TOL = 0.1
LOG_R2 = 0.9
LOG_RISE = 0.25
PLATEAU_SPREAD = 0.15
MIN_PLATEAU = 4
MIN_CLASSIFY_SCALES = 6
MIN_FIT_SCALES = 3
NOISE_FACTOR = 32.0
EPS = np.finfo(float).eps


# --- sampled functions ------------------------------------------------------------


def _n_points(a: float, b: float, dx: float) -> int:
    return int(math.floor((b - a) / dx + 1e-9)) + 1


@dataclass
class SampledFn:
    """Samples on a uniform grid over a box, plus optional derivative samples.

    ``derivatives`` maps multi-indices (tuples of length d) to arrays of the
    same shape as ``values``.
    """

    domain: tuple[tuple[float, float], ...]
    spacing: float
    values: np.ndarray
    derivatives: dict[tuple[int, ...], np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.spacing <= 0:
            raise ParameterRangeError("grid spacing must be positive")
        if len(self.domain) == 2 and not isinstance(self.domain[0], (tuple, list)):
            self.domain = (tuple(self.domain),)
        self.domain = tuple((float(a), float(b)) for a, b in self.domain)
        self.values = np.asarray(self.values, dtype=float)
        shape = tuple(_n_points(a, b, self.spacing) for a, b in self.domain)
        if self.values.shape != shape:
            raise ValueError(f"values have shape {self.values.shape}, grid needs {shape}")
        for key, arr in self.derivatives.items():
            if len(key) != self.dim or np.shape(arr) != shape:
                raise ValueError(f"derivative samples {key} do not share the grid")
        self.derivatives = {tuple(k): np.asarray(v, dtype=float) for k, v in self.derivatives.items()}

    @property
    def dim(self) -> int:
        return len(self.domain)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def axis(self, j: int = 0) -> np.ndarray:
        a, _ = self.domain[j]
        return a + self.spacing * np.arange(self.shape[j])

    def axes(self) -> list[np.ndarray]:
        return [self.axis(j) for j in range(self.dim)]

    @classmethod
    def sample(cls, f, domain, spacing: float | None = None, n: int | None = None,
               order: int = 0) -> "SampledFn":
        """Sample ``f`` (an AnalyticFn or a plain callable) and its partial
        derivatives of total order <= ``order``.

        Give either the ``spacing`` or the number of points ``n`` per axis.
        """
        if len(domain) == 2 and not isinstance(domain[0], (tuple, list)):
            domain = (tuple(domain),)
        domain = tuple((float(a), float(b)) for a, b in domain)
        if spacing is None:
            if n is None or n < 2:
                raise ParameterRangeError("need a spacing or at least 2 points")
            spacing = (domain[0][1] - domain[0][0]) / (n - 1)
        axes = [a + spacing * np.arange(_n_points(a, b, spacing)) for a, b in domain]
        d = len(domain)
        grid_eval = getattr(f, "grid_eval", None)
        if grid_eval is not None:
            def ev(alpha):
                return grid_eval(axes, alpha)
        else:
            if d != 1:
                raise ParameterRangeError("plain callables can only be sampled in one variable")

            def ev(alpha):
                if sum(alpha) == 0:
                    return np.asarray(f(axes[0]), dtype=float)
                deriv = getattr(f, "derivative", None)
                if deriv is None:
                    raise MissingDerivativeError("function has no derivative oracle")
                return np.asarray(deriv(axes[0], sum(alpha)), dtype=float)
        values = ev((0,) * d)
        derivs = {}
        for k in range(1, order + 1):
            for alpha in multi_indices(d, k):
                derivs[alpha] = ev(alpha)
        return cls(domain, spacing, values, derivs)

    def derivative(self, alpha: Sequence[int]) -> np.ndarray:
        alpha = tuple(alpha)
        if sum(alpha) == 0:
            return self.values
        if alpha not in self.derivatives:
            raise MissingDerivativeError(f"no derivative samples for multi-index {alpha}")
        return self.derivatives[alpha]

    def shifted(self, alpha: Sequence[int]) -> "SampledFn":
        """Samples of the partial derivative ``alpha`` with its own derivatives."""
        alpha = tuple(alpha)
        values = self.derivative(alpha)
        derivs = {}
        for key, arr in self.derivatives.items():
            rest = tuple(k - a for k, a in zip(key, alpha))
            if min(rest) >= 0 and sum(rest) > 0:
                derivs[rest] = arr
        return SampledFn(self.domain, self.spacing, values, derivs)

    def scaled(self, c: float) -> "SampledFn":
        return SampledFn(self.domain, self.spacing, c * self.values,
                         {k: c * v for k, v in self.derivatives.items()})

    def __add__(self, other: "SampledFn") -> "SampledFn":
        keys = set(self.derivatives) & set(other.derivatives)
        return SampledFn(self.domain, self.spacing, self.values + other.values,
                         {k: self.derivatives[k] + other.derivatives[k] for k in keys})


def multi_indices(d: int, k: int) -> list[tuple[int, ...]]:
    """All multi-indices of length d and total order k, in lexicographic order."""
    return sorted((a for a in itertools.product(range(k + 1), repeat=d) if sum(a) == k),
                  reverse=True)


# --- moduli -------------------------------------------------------------------------


@dataclass(frozen=True)
class ModulusSpec:
    """omega(t) = t**alpha (``kind="power"``) or t log(1/t) (``kind="tlog"``)."""

    kind: str = "power"
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind not in ("power", "tlog"):
            raise ParameterRangeError(f"unknown modulus {self.kind!r}")
        if self.kind == "power" and not 0 < self.alpha <= 1:
            raise ParameterRangeError(f"power modulus needs alpha in (0, 1], got {self.alpha}")

    @property
    def t_max(self) -> float:
        return 1.0 / math.e if self.kind == "tlog" else math.inf

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "power":
            return t**self.alpha
        return t * np.log(1.0 / t)

    @property
    def name(self) -> str:
        return f"power({self.alpha:g})" if self.kind == "power" else "tlog"


# --- difference kernels --------------------------------------------------------------

SYMMETRIC2 = ((1.0, -1), (-2.0, 0), (1.0, 1))
FIRST = ((-1.0, 0), (1.0, 1))


def forward_terms(n: int) -> tuple[tuple[float, int], ...]:
    return tuple((float((-1) ** (n - i) * math.comb(n, i)), i) for i in range(n + 1))


@dataclass(frozen=True)
class Box:
    """Inclusive index bounds of the sub-box K on the grid."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def size(self, j: int) -> int:
        return self.hi[j] - self.lo[j]


def index_box(f: SampledFn, K=None) -> Box:
    if K is None:
        return Box(tuple(0 for _ in f.shape), tuple(n - 1 for n in f.shape))
    if len(K) == 2 and not isinstance(K[0], (tuple, list)):
        K = (tuple(K),)
    if len(K) != f.dim:
        raise ParameterRangeError("K has the wrong dimension")
    lo, hi = [], []
    for (a, b), (ka, kb), n in zip(f.domain, K, f.shape):
        if ka < a - 1e-12 or kb > b + 1e-12 or kb < ka:
            raise ParameterRangeError(f"K = [{ka}, {kb}] is not inside the domain [{a}, {b}]")
        i0 = int(math.ceil((ka - a) / f.spacing - 1e-9))
        i1 = int(math.floor((kb - a) / f.spacing + 1e-9))
        lo.append(max(i0, 0))
        hi.append(min(i1, n - 1))
    return Box(tuple(lo), tuple(hi))


def directions(d: int) -> list[tuple[int, ...]]:
    """Integer vectors with sup-norm 4 and first nonzero entry positive
    (one of each pair +-u); in one variable just (4,)."""
    if d == 1:
        return [(4,)]
    out = []
    for u in itertools.product(range(-4, 5), repeat=d):
        if max(abs(c) for c in u) != 4:
            continue
        first = next(c for c in u if c)
        if first > 0:
            out.append(u)
    return out


def _combo_sup(V: np.ndarray, box: Box, offset: Sequence[int], terms, centers: Box | None = None):
    """sup_x |sum_c coef V[x + mult offset]| over x with all nodes in the box
    (and x in ``centers`` when given).

    Returns (sup, x index tuple) or None when no x is admissible.
    """
    mults = [m for _, m in terms]
    starts, stops = [], []
    for j, o in enumerate(offset):
        lo_shift = min(m * o for m in mults)
        hi_shift = max(m * o for m in mults)
        s = box.lo[j] - lo_shift
        e = box.hi[j] - hi_shift
        if centers is not None:
            s, e = max(s, centers.lo[j]), min(e, centers.hi[j])
        if s > e:
            return None
        starts.append(s)
        stops.append(e)
    acc = None
    for coef, m in terms:
        sl = tuple(slice(s + m * o, e + m * o + 1) for s, e, o in zip(starts, stops, offset))
        part = coef * V[sl]
        acc = part if acc is None else acc + part
    mag = np.abs(acc)
    flat = int(np.argmax(mag))
    idx = np.unravel_index(flat, mag.shape)
    return float(mag[idx]), tuple(int(i) + s for i, s in zip(idx, starts))


@dataclass
class ScaleRow:
    h: float
    statistic: float
    witness_x: tuple[float, ...]
    witness_h: tuple[float, ...]
    numerator: float
    kept: bool = True


def _scale_row(f: SampledFn, V: np.ndarray, box: Box, r: int, terms, denom: Callable,
               dirs: Sequence[tuple[int, ...]], centers: Box | None = None):
    """Best (statistic, witness) at sup-norm scale r index units."""
    best = None
    for u in dirs:
        offset = tuple(c * r // 4 for c in u)
        got = _combo_sup(V, box, offset, terms, centers)
        if got is None:
            continue
        num, xi = got
        hvec = tuple(o * f.spacing for o in offset)
        hlen = math.sqrt(sum(c * c for c in hvec))
        stat = num / denom(hlen)
        x = tuple(a + i * f.spacing for (a, _), i in zip(f.domain, xi))
        key = (-stat, x, hlen)
        if best is None or key < best[0]:
            best = (key, ScaleRow(r * f.spacing, stat, x, hvec, num))
    return None if best is None else best[1]


def scale_indices(box: Box, span: int, d: int, h_mode: str = "dyadic",
                  max_fraction: float | None = None, min_r: int = 4) -> list[int]:
    """Index step sizes r admissible for a difference spanning ``span`` steps.

    ``max_fraction`` caps r at that fraction of the shortest side of the box.
    Returned in decreasing order.
    """
    side = min(box.size(j) for j in range(d))
    r_max = side // span
    if max_fraction is not None:
        r_max = min(r_max, int(side * max_fraction + 1e-9))
    if h_mode == "dyadic":
        rs = []
        r = min_r
        while r <= r_max:
            rs.append(r)
            r *= 2
    elif h_mode == "all":
        step = 1 if d == 1 else 4
        rs = list(range(max(min_r, step), r_max + 1, step))
    else:
        raise ParameterRangeError(f"unknown h_mode {h_mode!r}")
    return sorted(rs, reverse=True)


def statistic_table(f: SampledFn, V: np.ndarray, box: Box, terms, denom: Callable,
                    span: int, h_mode: str = "dyadic", max_fraction: float | None = None,
                    t_max: float = math.inf, centers: Box | None = None) -> list[ScaleRow]:
    """Per-scale sup of |difference| / denom(|h|), largest h first."""
    dirs = directions(f.dim)
    rows = []
    for r in scale_indices(box, span, f.dim, h_mode, max_fraction):
        if r * f.spacing >= t_max:
            continue
        row = _scale_row(f, V, box, r, terms, denom, dirs, centers)
        if row is not None:
            rows.append(row)
    return rows


def _best(rows: Sequence[ScaleRow]) -> ScaleRow:
    return min(rows, key=lambda r: (-r.statistic, r.witness_x, r.h))


@dataclass(frozen=True)
class SeminormResult:
    value: float
    witness_x: tuple[float, ...]
    witness_h: tuple[float, ...]

    def __float__(self) -> float:
        return self.value


def _seminorm(f: SampledFn, V, K, terms, denom, span, h_mode, t_max=math.inf) -> SeminormResult:
    box = index_box(f, K)
    rows = statistic_table(f, V, box, terms, denom, span, h_mode, t_max=t_max)
    if not rows:
        raise EmptyAdmissibleSetError("no admissible (x, h) pair in K at the available scales")
    best = _best(rows)
    return SeminormResult(best.statistic, best.witness_x, best.witness_h)


def zygmund_seminorm(f: SampledFn, K=None, h_mode: str = "dyadic") -> SeminormResult:
    """sup |f(x+h) - 2 f(x) + f(x-h)| / |h| over grid pairs with x +- h in K."""
    return _seminorm(f, f.values, K, SYMMETRIC2, lambda t: t, 2, h_mode)


def holder_seminorm(f: SampledFn, omega: ModulusSpec | float = 1.0, K=None,
                    h_mode: str = "dyadic") -> SeminormResult:
    """sup |f(x+h) - f(x)| / omega(|h|) over grid pairs with x, x+h in K."""
    if not isinstance(omega, ModulusSpec):
        omega = ModulusSpec("power", float(omega))
    return _seminorm(f, f.values, K, FIRST, lambda t: float(omega(t)), 1, h_mode, omega.t_max)


def sup_norm(f: SampledFn, K=None) -> float:
    box = index_box(f, K)
    sl = tuple(slice(lo, hi + 1) for lo, hi in zip(box.lo, box.hi))
    return float(np.max(np.abs(f.values[sl])))


def _unit(d: int, j: int) -> tuple[int, ...]:
    return tuple(1 if i == j else 0 for i in range(d))


def lambda_norm(f: SampledFn, s: float, K=None, h_mode: str = "dyadic") -> float:
    """Grid value of the Hoelder-Zygmund norm of order s > 0.

    s < 1: sup|f| + Hoelder-s seminorm; s = 1: sup|f| + Zygmund seminorm;
    s > 1: ||f||_{s-1} + sum_j ||d_j f||_{s-1}.
    """
    if s <= 0:
        raise ParameterRangeError(f"s must be positive, got {s}")
    if s > 1:
        total = lambda_norm(f, s - 1, K, h_mode)
        for j in range(f.dim):
            total += lambda_norm(f.shifted(_unit(f.dim, j)), s - 1, K, h_mode)
        return total
    base = sup_norm(f, K)
    if s == 1:
        return base + zygmund_seminorm(f, K, h_mode).value
    return base + holder_seminorm(f, ModulusSpec("power", s), K, h_mode).value


def lip_norm(f: SampledFn, s: int, K=None, h_mode: str = "dyadic") -> float:
    """Grid value of the Lipschitz norm of integer order s >= 1."""
    if s < 1 or int(s) != s:
        raise ParameterRangeError(f"s must be a positive integer, got {s}")
    if s > 1:
        total = lip_norm(f, s - 1, K, h_mode)
        for j in range(f.dim):
            total += lip_norm(f.shifted(_unit(f.dim, j)), s - 1, K, h_mode)
        return total
    return sup_norm(f, K) + holder_seminorm(f, ModulusSpec("power", 1.0), K, h_mode).value


# --- growth fits ----------------------------------------------------------------------


def noise_threshold(terms, V: np.ndarray) -> float:
    scale = float(np.max(np.abs(V))) if V.size else 0.0
    return NOISE_FACTOR * EPS * sum(abs(c) for c, _ in terms) * scale


def _r2(y, pred) -> float:
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot == 0:
        return 1.0
    return 1.0 - float(np.sum((y - pred) ** 2)) / ss_tot


@dataclass
class GrowthFit:
    """Growth of a per-scale statistic as h decreases.

    ``growth`` is the slope of log2 S against log2(1/h).  ``log_slope`` and
    ``log_r2`` come from the linear model S = a + b log(1/h), and ``rise`` is
    b times the log-range of h divided by max S.
    """

    bounded: bool
    reason: str
    growth: float = 0.0
    power_r2: float = 1.0
    log_slope: float = 0.0
    log_r2: float = 0.0
    rise: float = 0.0
    n_scales: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def fit_growth(hs: Sequence[float], stats: Sequence[float], growth_tol: float = GROWTH_TOL) -> GrowthFit:
    hs = np.asarray(hs, dtype=float)
    ys = np.asarray(stats, dtype=float)
    if len(hs) == 0:
        return GrowthFit(True, "vanishing (every scale below the noise floor)")
    if len(hs) < MIN_FIT_SCALES:
        return GrowthFit(True, "too few scales above the noise floor", n_scales=len(hs))
    lx = np.log2(1.0 / hs)
    ly = np.log2(ys)
    g, c = np.polyfit(lx, ly, 1)
    power_r2 = _r2(ly, g * lx + c)
    ln = np.log(1.0 / hs)
    b, a = np.polyfit(ln, ys, 1)
    log_r2 = _r2(ys, b * ln + a)
    rise = float(b * (ln.max() - ln.min()) / ys.max())
    fit = GrowthFit(True, "bounded", float(g), power_r2, float(b), log_r2, rise, len(hs))
    if g > growth_tol:
        fit.bounded = False
        fit.reason = "logarithmic divergence" if log_r2 >= power_r2 else "power divergence"
    elif log_r2 > LOG_R2 and rise > LOG_RISE:
        fit.bounded = False
        fit.reason = "logarithmic divergence"
    return fit


# --- reports ----------------------------------------------------------------------------


@dataclass
class CriterionResult:
    name: str
    statistic: str
    rows: list[ScaleRow]
    fit: GrowthFit
    noise_floor: float

    @property
    def bounded(self) -> bool:
        return self.fit.bounded

    @property
    def witness(self) -> ScaleRow | None:
        return _best(self.rows) if self.rows else None

    def to_dict(self) -> dict:
        w = self.witness
        return {
            "name": self.name,
            "statistic": self.statistic,
            "bounded": self.bounded,
            "fit": self.fit.to_dict(),
            "noise_floor": self.noise_floor,
            "witness": None if w is None else {"x": list(w.witness_x), "h": list(w.witness_h),
                                               "statistic": w.statistic},
            "scales": [{"h": r.h, "statistic": r.statistic, "witness_x": list(r.witness_x),
                        "kept": r.kept} for r in self.rows],
        }


@dataclass
class RegularityReport:
    """Scale tables, fitted exponent and verdicts for one sampled function."""

    kind: str
    order: int
    K: tuple[tuple[float, float], ...]
    spacing: float
    criteria: dict[str, CriterionResult] = field(default_factory=dict)
    verdicts: dict[str, bool] = field(default_factory=dict)
    quotient_checks: dict[str, bool] = field(default_factory=dict)
    exponent: float | None = None
    residual: float | None = None
    plateau: tuple[float, float] | None = None
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "order": self.order,
            "K": [list(k) for k in self.K],
            "spacing": self.spacing,
            "exponent": self.exponent,
            "residual": self.residual,
            "plateau": None if self.plateau is None else list(self.plateau),
            "flags": list(self.flags),
            "verdicts": dict(self.verdicts),
            "quotient_checks": dict(self.quotient_checks),
            "criteria": {k: v.to_dict() for k, v in self.criteria.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["criterion", "h", "statistic", "witness_x"])
        for name, crit in self.criteria.items():
            for r in crit.rows:
                w.writerow([name, repr(r.h), repr(r.statistic),
                            ";".join(repr(v) for v in r.witness_x)])
        return buf.getvalue()


def _criterion(f: SampledFn, arrays: Sequence[np.ndarray], box: Box, terms, denom, span,
               name, description, max_fraction, centers: Box | None = None) -> CriterionResult:
    """Statistic = max over the given arrays (e.g. all order-m partials)."""
    per_array = [statistic_table(f, V, box, terms, denom, span, "dyadic", max_fraction,
                                 centers=centers)
                 for V in arrays]
    floor = max(noise_threshold(terms, V) for V in arrays)
    rows = []
    for scale_rows in zip(*per_array):
        best = _best(scale_rows)
        best.kept = max(r.numerator for r in scale_rows) > floor
        rows.append(best)
    kept = [r for r in rows if r.kept]
    fit = fit_growth([r.h for r in kept], [r.statistic for r in kept])
    return CriterionResult(name, description, rows, fit, floor)


def _order_arrays(f: SampledFn, m: int) -> list[np.ndarray]:
    return [f.derivative(a) for a in multi_indices(f.dim, m)]


CLASSIFY_FRACTION = 1.0 / 8.0


def classify(f: SampledFn, m: int, K=None, alphas: Sequence[float] = (),
             quotients: bool = True, max_fraction: float = CLASSIFY_FRACTION,
             fixed_centers: bool = False) -> RegularityReport:
    """Membership tests for Z^{m,1}, C^{m,1} and C^{m,alpha} on K.

    The verdicts use the order-m derivative samples: the symmetric second
    difference over |h|, the first difference over |h| and over |h|**alpha.
    A statistic counts as bounded when its fitted growth in log(1/h) is at
    most ``GROWTH_TOL`` and no logarithmic divergence is detected.  With
    ``quotients`` (one variable only) the equidistant quotient criteria on
    the function values are evaluated as well and reported separately.
    Scales are capped at ``max_fraction`` of the shortest side of K.  With
    ``fixed_centers`` every scale uses the same base points, those at least
    the largest scale away from the boundary of K.
    """
    from .corpus import holder_key

    if m < 0:
        raise ParameterRangeError("m must be >= 0")
    box = index_box(f, K)
    arrays = _order_arrays(f, m)
    rs = scale_indices(box, 2, f.dim, "dyadic", max_fraction)
    n_scales = len(rs)
    if n_scales < MIN_CLASSIFY_SCALES:
        raise InsufficientScalesError(
            f"only {n_scales} dyadic scales fit in K; need {MIN_CLASSIFY_SCALES}")
    centers = None
    if fixed_centers:
        centers = Box(tuple(v + rs[0] for v in box.lo), tuple(v - rs[0] for v in box.hi))
    Kbox = tuple((f.domain[j][0] + box.lo[j] * f.spacing, f.domain[j][0] + box.hi[j] * f.spacing)
                 for j in range(f.dim))
    rep = RegularityReport("classify", m, Kbox, f.spacing)
    rep.criteria["zygmund"] = _criterion(
        f, arrays, box, SYMMETRIC2, lambda t: t, 2, "zygmund",
        f"sup |d^{m}f(x+h) - 2 d^{m}f(x) + d^{m}f(x-h)| / |h|", max_fraction, centers)
    rep.criteria["lipschitz"] = _criterion(
        f, arrays, box, FIRST, lambda t: t, 1, "lipschitz",
        f"sup |d^{m}f(x+h) - d^{m}f(x)| / |h|", max_fraction, centers)
    for a in alphas:
        key = holder_key(a)
        rep.criteria[key] = _criterion(
            f, arrays, box, FIRST, lambda t, a=a: t**a, 1, key,
            f"sup |d^{m}f(x+h) - d^{m}f(x)| / |h|^{a:g}", max_fraction, centers)
    rep.verdicts = {k: c.bounded for k, c in rep.criteria.items()}
    if quotients and f.dim == 1:
        _quotient_checks(f, m, box, alphas, rep)
    return rep


def _quotient_checks(f: SampledFn, m: int, box: Box, alphas, rep: RegularityReport) -> None:
    """Equidistant-quotient criteria evaluated on the values alone."""
    from .corpus import holder_key

    V = [f.values]

    def crit(n, power, name, desc):
        c = _criterion(f, V, box, forward_terms(n), lambda t: t**power, n, name, desc,
                       CLASSIFY_FRACTION)
        rep.criteria[name] = c
        return c.bounded

    lower = True
    if m > 0:
        lower = crit(m, m, "quotient_m", f"sup |delta^{m}_eq f(x;h)|")
    lip = crit(m + 1, m + 1, "quotient_m+1", f"sup |delta^{m + 1}_eq f(x;h)|")
    zyg = crit(m + 2, m + 1, "quotient_h_m+2", f"sup |h delta^{m + 2}_eq f(x;h)|")
    rep.quotient_checks["lipschitz"] = lip
    rep.quotient_checks["zygmund"] = zyg and lower
    rep.quotient_checks["zygmund_without_lower_order"] = zyg
    for a in alphas:
        key = holder_key(a)
        rep.quotient_checks[key] = crit(m + 1, m + a, "quotient_" + key,
                                        f"sup |h|^(1-{a:g}) |delta^{m + 1}_eq f(x;h)|")


# --- exponent estimation -----------------------------------------------------------------


def _plateau(lh: np.ndarray, lm: np.ndarray) -> tuple[int, int] | None:
    """Longest run [i, j] of scales whose local slopes spread by < PLATEAU_SPREAD.

    Scales are ordered from large to small h; ties go to the run with smaller h.
    """
    n = len(lh)
    slopes = np.diff(lm) / np.diff(lh)
    best = None
    for i in range(n - 1):
        for j in range(i + 1, n):
            seg = slopes[i:j]
            if seg.max() - seg.min() >= PLATEAU_SPREAD:
                break
            length = j - i + 1
            if length >= MIN_PLATEAU and (best is None or length >= best[1] - best[0] + 1):
                best = (i, j)
    return best


def estimate_exponent(f: SampledFn, n: int, K=None) -> RegularityReport:
    """Fit s in sup_x |Delta^n_h f(x)| ~ C |h|**s over dyadic h (all
    grid directions in several variables).

    The fit uses the plateau window of consecutive scales with nearly equal
    local slopes.  Estimates within 0.15 of n are flagged ``saturated``: the
    n-th difference cannot see exponents of n or more.
    """
    if n < 1:
        raise ParameterRangeError("n must be >= 1")
    box = index_box(f, K)
    terms = forward_terms(n)
    rows = statistic_table(f, f.values, box, terms, lambda t: 1.0, n, "dyadic", CLASSIFY_FRACTION)
    floor = noise_threshold(terms, f.values)
    for r in rows:
        r.kept = r.numerator > floor
    kept = [r for r in rows if r.kept]
    if len(kept) < MIN_PLATEAU:
        raise InsufficientScalesError(f"{len(kept)} usable scales, need {MIN_PLATEAU}")
    lh = np.log2([r.h for r in kept])
    lm = np.log2([r.statistic for r in kept])
    flags = []
    win = _plateau(lh, lm)
    if win is None:
        win = (len(kept) - MIN_PLATEAU, len(kept) - 1)
        flags.append("no plateau: fitted the smallest scales")
    i, j = win
    slope, icpt = np.polyfit(lh[i:j + 1], lm[i:j + 1], 1)
    resid = float(np.sqrt(np.mean((lm[i:j + 1] - (slope * lh[i:j + 1] + icpt)) ** 2)))
    if slope >= n - PLATEAU_SPREAD:
        flags.append("saturated")
    Kbox = tuple((f.domain[j][0] + box.lo[j] * f.spacing, f.domain[j][0] + box.hi[j] * f.spacing)
                 for j in range(f.dim))
    rep = RegularityReport("exponent", n, Kbox, f.spacing, exponent=float(slope), residual=resid,
                           plateau=(kept[i].h, kept[j].h), flags=flags)
    fit = GrowthFit(True, "exponent fit", float(-slope), n_scales=j - i + 1)
    rep.criteria[f"difference_{n}"] = CriterionResult(
        f"difference_{n}", f"sup |Delta^{n}_h f(x)|", rows, fit, floor)
    return rep


def refinement_values(f, domain, spacings: Sequence[float], op: Callable[[SampledFn], float],
                      order: int = 0) -> list[float]:
    """Evaluate a grid functional on successively finer grids."""
    return [float(op(SampledFn.sample(f, domain, spacing=dx, order=order))) for dx in spacings]
