"""Smooth curves built from windows, and testing regularity along curves.

A :class:`SmoothCurve` reproduces a list of segments c_n exactly on disjoint
windows |t - t_n| <= s_n.  Between consecutive windows the curve blends the
analytic continuations of the neighbouring segments with a C-infinity
transition; before the first and after the last window it blends towards a
constant fallback point, which is the value everywhere else.

``boman_test`` compares a direct classification of f on a grid in the plane
(or in R^3) with classifications of the composites f o c for a family of
curves, plus an adversarial curve built from the direct witnesses.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import bump
from .corpus import AnalyticFn, holder_key
from .errors import (
    DomainError,
    NormalizationError,
    OverlappingWindowError,
    ParameterRangeError,
    SegmentLeavesDomainError,
)
from .seminorm import CLASSIFY_FRACTION, SampledFn, classify
from .superposition import compose_derivative_nd

MAX_PIECES = 64
MAX_CURVE_ORDER = 4
TOL_STITCH = 1e-6
# composites start two octaves below the direct cap: a curve spreads the
# coarse scales of f over a range of parameter steps
COMPOSITE_FRACTION = CLASSIFY_FRACTION / 8


# --- segments ----------------------------------------------------------------------


@dataclass(frozen=True)
class PolynomialCurve:
    """c(t) = sum_k coeffs[k] t**k with vector coefficients (shape (deg+1, d))."""

    coeffs: tuple[tuple[float, ...], ...]

    @classmethod
    def from_array(cls, arr) -> "PolynomialCurve":
        arr = np.atleast_2d(np.asarray(arr, dtype=float))
        return cls(tuple(tuple(float(v) for v in row) for row in arr))

    @classmethod
    def affine(cls, point, velocity) -> "PolynomialCurve":
        return cls.from_array([list(point), list(velocity)])

    @property
    def dim(self) -> int:
        return len(self.coeffs[0])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)

    def eval(self, t, order: int = 0) -> np.ndarray:
        """order-th derivative at t; shape (..., d)."""
        t = np.asarray(t, dtype=float)
        c = self.array()
        for _ in range(order):
            c = c[1:] * np.arange(1, len(c))[:, None] if len(c) > 1 else np.zeros((1, c.shape[1]))
        out = np.zeros(t.shape + (c.shape[1],))
        for row in c[::-1]:
            out = out * t[..., None] + row
        return out

    def __call__(self, t):
        return self.eval(t, 0)

    def to_dict(self) -> dict:
        return {"type": "polynomial", "coeffs": [list(r) for r in self.coeffs]}


# --- stitched curves --------------------------------------------------------------------


@dataclass(frozen=True)
class Piece:
    anchor: float
    half_width: float
    segment: PolynomialCurve

    @property
    def left(self) -> float:
        return self.anchor - self.half_width

    @property
    def right(self) -> float:
        return self.anchor + self.half_width


@dataclass(frozen=True)
class Zone:
    """A maximal t-interval on which one formula defines the curve."""

    kind: str  # "window", "blend", "fallback"
    start: float
    end: float
    left: int | None = None   # piece index on the left (None: fallback)
    right: int | None = None  # piece index on the right (None: fallback)


@dataclass(frozen=True)
class SmoothCurve:
    pieces: tuple[Piece, ...]
    lead: float
    tail: float
    fallback: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.fallback)

    def zones(self) -> list[Zone]:
        out = []
        first, last = self.pieces[0], self.pieces[-1]
        out.append(Zone("blend", first.left - self.lead, first.left, None, 0))
        for n, p in enumerate(self.pieces):
            out.append(Zone("window", p.left, p.right, n, n))
            if n + 1 < len(self.pieces):
                out.append(Zone("blend", p.right, self.pieces[n + 1].left, n, n + 1))
        out.append(Zone("blend", last.right, last.right + self.tail, len(self.pieces) - 1, None))
        return out

    def _side(self, idx: int | None, t: np.ndarray, order: int) -> np.ndarray:
        if idx is None:
            base = np.zeros(t.shape + (self.dim,))
            return base + np.asarray(self.fallback) if order == 0 else base
        p = self.pieces[idx]
        return p.segment.eval(t - p.anchor, order)

    def zone_eval(self, zone: Zone, t, order: int = 0) -> np.ndarray:
        """Evaluate the formula of ``zone`` at t (also outside the zone)."""
        t = np.asarray(t, dtype=float)
        if zone.kind == "window":
            return self._side(zone.left, t, order)
        if zone.kind == "fallback":
            return self._side(None, t, order)
        g = zone.end - zone.start
        u = -1.0 + 2.0 * (t - zone.start) / g
        left = [self._side(zone.left, t, k) for k in range(order + 1)]
        right = [self._side(zone.right, t, k) for k in range(order + 1)]
        out = left[order].copy()
        for i in range(order + 1):
            w = bump.transition(u, i) * (2.0 / g) ** i
            out += math.comb(order, i) * w[..., None] * (right[order - i] - left[order - i])
        return out

    def eval(self, t, order: int = 0) -> np.ndarray:
        """order-th derivative (order <= 4) at t; shape (..., d)."""
        if not 0 <= order <= MAX_CURVE_ORDER:
            raise ParameterRangeError(f"derivative order must lie in [0, {MAX_CURVE_ORDER}]")
        t = np.asarray(t, dtype=float)
        out = self._side(None, t, order)
        done = np.zeros(t.shape, dtype=bool)
        for zone in self.zones():
            if zone.kind == "window":
                # closed at the same float edges the blends are open at
                mask = (t >= zone.start) & (t <= zone.end)
            else:
                mask = (t > zone.start) & (t < zone.end)
            mask &= ~done
            if mask.any():
                out[mask] = self.zone_eval(zone, t[mask], order)
                done |= mask
        return out

    def __call__(self, t):
        return self.eval(t, 0)

    @property
    def support(self) -> tuple[float, float]:
        return (self.pieces[0].left - self.lead, self.pieces[-1].right + self.tail)

    def to_dict(self) -> dict:
        return {
            "pieces": [{"anchor": p.anchor, "half_width": p.half_width,
                        "segment": p.segment.to_dict()} for p in self.pieces],
            "lead": self.lead,
            "tail": self.tail,
            "fallback": list(self.fallback),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "SmoothCurve":
        pieces = tuple(Piece(p["anchor"], p["half_width"],
                             PolynomialCurve.from_array(p["segment"]["coeffs"]))
                       for p in data["pieces"])
        return cls(pieces, data["lead"], data["tail"], tuple(data["fallback"]))


def eval_curve(c: SmoothCurve, t, deriv_order: int = 0) -> np.ndarray:
    return c.eval(t, deriv_order)


def default_anchors(widths: Sequence[float]) -> list[float]:
    """t_n = L_n + s_n with left edges L_n = sum_{j<n} (2 s_j + g_j), gaps g_j = s_j."""
    anchors, left = [], 0.0
    for s in widths:
        anchors.append(left + s)
        left += 3 * s
    return anchors


def _in_box(points: np.ndarray, box) -> bool:
    lo = np.array([a for a, _ in box])
    hi = np.array([b for _, b in box])
    return bool(np.all(points >= lo - 1e-12) and np.all(points <= hi + 1e-12))


def stitch_curves(segments: Sequence[PolynomialCurve], widths: Sequence[float],
                  anchors: Sequence[float] | None = None, fallback=None, domain=None,
                  lead: float | None = None, tail: float | None = None) -> SmoothCurve:
    """Realize segments on disjoint windows of one C-infinity curve.

    ``domain`` (a box, one (lo, hi) pair per coordinate) is checked on every
    window.  The fallback point defaults to c_0(0) of the earliest segment.
    """
    segments = list(segments)
    widths = [float(s) for s in widths]
    if not 1 <= len(segments) <= MAX_PIECES:
        raise ParameterRangeError(f"need 1..{MAX_PIECES} segments, got {len(segments)}")
    if len(widths) != len(segments):
        raise ParameterRangeError("one width per segment is required")
    if any(s <= 0 for s in widths):
        raise ParameterRangeError("window half-widths must be positive")
    anchors = default_anchors(widths) if anchors is None else [float(a) for a in anchors]
    if len(anchors) != len(segments):
        raise ParameterRangeError("one anchor per segment is required")
    pieces = sorted((Piece(a, s, seg) for a, s, seg in zip(anchors, widths, segments)),
                    key=lambda p: p.anchor)
    for p, q in zip(pieces, pieces[1:]):
        if q.left <= p.right:
            raise OverlappingWindowError(
                f"windows around {p.anchor} and {q.anchor} overlap or touch")
    d = segments[0].dim
    if any(seg.dim != d for seg in segments):
        raise ParameterRangeError("segments must share the dimension")
    if domain is not None:
        for p in pieces:
            tt = p.anchor + np.linspace(-p.half_width, p.half_width, 257)
            if not _in_box(p.segment.eval(tt - p.anchor), domain):
                raise SegmentLeavesDomainError(f"segment at anchor {p.anchor} leaves the domain")
    if fallback is None:
        fallback = tuple(float(v) for v in pieces[0].segment.eval(np.array(0.0)))
    lead = pieces[0].half_width if lead is None else float(lead)
    tail = pieces[-1].half_width if tail is None else float(tail)
    if lead <= 0 or tail <= 0:
        raise OverlappingWindowError("lead-in and tail zones need positive length")
    return SmoothCurve(tuple(pieces), lead, tail, tuple(float(v) for v in fallback))


def window_fidelity(c: SmoothCurve, probes: int = 100) -> float:
    """max |c(t_n + tau) - c_n(tau)| over probes inside every window.

    tau is taken as the representable offset (t_n + tau0) - t_n, so the
    comparison isolates the stitching logic from rounding of the sum.
    """
    worst = 0.0
    for p in c.pieces:
        tau0 = np.linspace(-p.half_width, p.half_width, probes)
        t = p.anchor + tau0
        tau = t - p.anchor
        inside = np.abs(tau) <= p.half_width
        diff = np.abs(c.eval(t[inside]) - p.segment.eval(tau[inside]))
        worst = max(worst, float(diff.max(initial=0.0)))
    return worst


def continuity_report(c: SmoothCurve, orders: Sequence[int] = range(MAX_CURVE_ORDER + 1)) -> dict:
    """One-sided limits at every zone boundary: both adjacent formulas are
    evaluated at the boundary point, per derivative order.  Also includes the
    jump to the fallback at the ends of the support."""
    zones = c.zones()
    fallback = Zone("fallback", -math.inf, math.inf)
    seq = [fallback] + zones + [fallback]
    worst = {int(k): 0.0 for k in orders}
    for a, b in zip(seq, seq[1:]):
        point = a.end if a.kind != "fallback" else b.start
        for k in orders:
            lhs = c.zone_eval(a, np.array([point]), k)
            rhs = c.zone_eval(b, np.array([point]), k)
            worst[int(k)] = max(worst[int(k)], float(np.max(np.abs(lhs - rhs))))
    return worst


def random_stitch_config(seed: int, n_pieces: int | None = None, dim: int = 2,
                         degree: int = 3) -> SmoothCurve:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9)) if n_pieces is None else n_pieces
    widths = [float(0.5 ** (j + 1) * rng.uniform(0.5, 1.0)) for j in range(n)]
    segments = [PolynomialCurve.from_array(rng.normal(size=(degree + 1, dim))) for _ in range(n)]
    return stitch_curves(segments, widths)


# --- adversarial construction -----------------------------------------------------------------


@dataclass(frozen=True)
class AdversarialCurve:
    curve: SmoothCurve
    points: tuple[tuple[float, ...], ...]
    steps: tuple[tuple[float, ...], ...]
    start: int

    @property
    def indices(self) -> range:
        return range(self.start, self.start + len(self.points))

    def scale(self, n: int) -> float:
        return self.curve.pieces[n - self.start].half_width

    def anchor(self, n: int) -> float:
        return self.curve.pieces[n - self.start].anchor


def adversarial_curve(points, steps, limit=None, start: int = 1) -> AdversarialCurve:
    """Stitch c_n(t) = x_n + t h_n / (2^n |h_n|) on windows of half-width
    s_n = 2^n |h_n|, requiring |x_n - x| <= 4^-n and 0 < |h_n| <= 4^-n."""
    pts = [np.atleast_1d(np.asarray(p, dtype=float)) for p in points]
    hs = [np.atleast_1d(np.asarray(h, dtype=float)) for h in steps]
    if len(pts) != len(hs) or not pts:
        raise ParameterRangeError("need equally many points and steps")
    x = pts[-1] if limit is None else np.atleast_1d(np.asarray(limit, dtype=float))
    segments, widths = [], []
    for j, (xn, hn) in enumerate(zip(pts, hs)):
        n = start + j
        norm = float(np.linalg.norm(hn))
        if norm == 0 or norm > 4.0**-n * (1 + 1e-12):
            raise NormalizationError(f"|h_{n}| = {norm} violates 0 < |h_n| <= 4^-{n}")
        if float(np.linalg.norm(xn - x)) > 4.0**-n * (1 + 1e-12):
            raise NormalizationError(f"|x_{n} - x| exceeds 4^-{n}")
        segments.append(PolynomialCurve.affine(xn, hn / (2.0**n * norm)))
        widths.append(2.0**n * norm)
    curve = stitch_curves(segments, widths, fallback=tuple(x))
    return AdversarialCurve(curve, tuple(tuple(p) for p in pts), tuple(tuple(h) for h in hs), start)


def _point_eval(f: AnalyticFn, pts: np.ndarray) -> np.ndarray:
    if f.dim == 1:
        return np.asarray(f(pts[..., 0]), dtype=float)
    return np.asarray(f(pts), dtype=float)


def quotient(f: AnalyticFn, x, h, criterion: str) -> float:
    """Original statistic at (x, h): Zygmund, Lipschitz or Hoelder quotient."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h = np.atleast_1d(np.asarray(h, dtype=float))
    pts = np.stack([x - h, x, x + h])
    v = _point_eval(f, pts)
    norm = float(np.linalg.norm(h))
    if criterion == "zygmund":
        return abs(v[2] - 2 * v[1] + v[0]) / norm
    return abs(v[2] - v[1]) / norm ** criterion_exponent(criterion)


def criterion_exponent(criterion: str) -> float:
    if criterion in ("zygmund", "lipschitz"):
        return 1.0
    if criterion.startswith("holder(") and criterion.endswith(")"):
        return float(criterion[7:-1])
    raise ParameterRangeError(f"unknown criterion {criterion!r}")


def composite_statistic(f: AnalyticFn, adv: AdversarialCurve, n: int, criterion: str) -> float:
    """Statistic of f o c at t_n with parameter step s_n."""
    tn, sn = adv.anchor(n), adv.scale(n)
    ts = np.array([tn - sn, tn, tn + sn])
    v = _point_eval(f, adv.curve.eval(ts))
    if criterion == "zygmund":
        return abs(v[2] - 2 * v[1] + v[0]) / sn
    return abs(v[2] - v[1]) / sn ** criterion_exponent(criterion)


def rescaling_rows(f: AnalyticFn, adv: AdversarialCurve, criterion: str) -> list[dict]:
    """Both sides of: composite statistic at s_n = q_n / 2^(n a)."""
    a = criterion_exponent(criterion)
    rows = []
    for j, n in enumerate(adv.indices):
        q = quotient(f, adv.points[j], adv.steps[j], criterion)
        expected = q / 2.0 ** (n * a)
        comp = composite_statistic(f, adv, n, criterion)
        rows.append({"n": n, "q_n": q, "expected": expected, "composite": comp,
                     "abs_diff": abs(comp - expected)})
    return rows


# --- composition -----------------------------------------------------------------------


def compose(f: AnalyticFn, c, t_interval=(-1.0, 1.0), n: int = 4097, order: int = 0,
            domain=None, spacing: float | None = None) -> SampledFn:
    """Samples of f o c on a uniform t-grid, with derivatives up to ``order``."""
    a, b = t_interval
    if spacing is None:
        spacing = (b - a) / (n - 1)
    count = int(math.floor((b - a) / spacing + 1e-9)) + 1
    t = a + spacing * np.arange(count)
    cd = [np.asarray(c.eval(t, k), dtype=float) for k in range(order + 1)]
    if domain is not None and not _in_box(cd[0], domain):
        raise DomainError("the curve leaves the domain of f on the sampling interval")
    if cd[0].shape[-1] != f.dim:
        raise DomainError("curve and function dimensions differ")
    pts = cd[0]
    if f.dim == 1:
        def partial(alpha):
            return np.asarray(f.derivative(pts[..., 0], alpha[0]), dtype=float)
    else:
        def partial(alpha):
            return np.asarray(f.partial(pts, alpha), dtype=float)
    values = compose_derivative_nd(partial, cd, 0)
    derivs = {(j,): compose_derivative_nd(partial, cd, j) for j in range(1, order + 1)}
    return SampledFn(((a, a + spacing * (count - 1)),), spacing, values, derivs)


# --- curve families ---------------------------------------------------------------------


@dataclass(frozen=True)
class CurveFamily:
    curves: tuple
    seed: int | None = None
    t_interval: tuple[float, float] = (-1.0, 1.0)

    def __len__(self) -> int:
        return len(self.curves)


def _poly_range(coeffs: np.ndarray, lo: float, hi: float) -> tuple[float, float]:
    """Exact min and max of a scalar polynomial (ascending coeffs) on [lo, hi]."""
    p = np.polynomial.Polynomial(coeffs)
    cands = [lo, hi] + [float(r.real) for r in p.deriv().roots()
                        if abs(r.imag) < 1e-12 and lo <= r.real <= hi]
    vals = p(np.array(cands))
    return float(vals.min()), float(vals.max())


def random_polynomial_family(count: int, box, degree: int = 3, seed: int = 0,
                             t_interval=(-1.0, 1.0), margin: float = 0.05) -> CurveFamily:
    """Seeded polynomial curves of degree <= 5 mapped affinely into the box."""
    if not 1 <= degree <= 5:
        raise ParameterRangeError("degree must lie in [1, 5]")
    rng = np.random.default_rng(seed)
    d = len(box)
    curves = []
    for _ in range(count):
        raw = rng.normal(size=(degree + 1, d))
        out = np.zeros_like(raw)
        for j, (a, b) in enumerate(box):
            lo, hi = _poly_range(raw[:, j], *t_interval)
            width = (b - a) * (1 - 2 * margin)
            scale = width / (hi - lo) if hi > lo else 0.0
            # random placement of the image inside the shrunken box
            room = width - scale * (hi - lo)
            offset = a + (b - a) * margin + room * rng.uniform()
            out[:, j] = scale * raw[:, j]
            out[0, j] += offset - scale * lo
        curves.append(PolynomialCurve.from_array(out))
    return CurveFamily(tuple(curves), seed, tuple(t_interval))


# --- Boman-type test ---------------------------------------------------------------------


def _criterion_keys(criterion: str) -> tuple[str, tuple[float, ...]]:
    if criterion in ("zygmund", "lipschitz"):
        return criterion, ()
    a = criterion_exponent(criterion)
    return holder_key(a), (a,)


@dataclass
class BomanReport:
    function: str
    m: int
    criterion: str
    direct: bool
    direct_fit: dict
    curves: list[dict] = field(default_factory=list)
    adversarial: dict | None = None
    family_verdict: bool = True
    agreement: bool = True

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def direct_verdict(f: AnalyticFn, m: int, criterion: str, box=None, n: int = 1025):
    key, alphas = _criterion_keys(criterion)
    box = f.domain if box is None else box
    if f.dim == 1:
        box = (tuple(box),) if not isinstance(box[0], (tuple, list)) else box
    spacing = (box[0][1] - box[0][0]) / (n - 1)
    S = SampledFn.sample(f, box, spacing=spacing, order=m)
    rep = classify(S, m, alphas=alphas, quotients=False)
    return rep.verdicts[key], rep.criteria[key]


def _witness_candidates(crit) -> list[tuple[np.ndarray, np.ndarray]]:
    """Base points and unit directions suggested by the smallest kept scale."""
    rows = [r for r in crit.rows if r.kept] or crit.rows
    row = rows[-1]
    x = np.asarray(row.witness_x)
    h = np.asarray(row.witness_h)
    e = h / np.linalg.norm(h)
    out = []
    for base in (x, x + h, x - h):
        for sign in (1.0, -1.0):
            out.append((base, sign * e))
    return out


def witness_adversarial(f: AnalyticFn, crit, criterion: str, n_max: int = 12,
                        start: int = 1, max_refine: int = 40) -> dict:
    """Adversarial curve from direct witnesses.

    For each candidate (x, e) and each n, h_n = delta e with the largest dyadic
    delta = 4^-n 2^-j whose quotient reaches n 2^(n a); the first candidate
    that succeeds for every n is used.
    """
    a = criterion_exponent(criterion)
    for x, e in _witness_candidates(crit):
        steps = []
        for n in range(start, start + n_max):
            target = n * 2.0 ** (n * a)
            found = None
            for j in range(max_refine + 1):
                h = (4.0**-n * 2.0**-j) * e
                if quotient(f, x, h, criterion) >= target:
                    found = h
                    break
            if found is None:
                break
            steps.append(found)
        if len(steps) == n_max:
            adv = adversarial_curve([x] * n_max, steps, limit=x, start=start)
            rows = rescaling_rows(f, adv, criterion)
            return {"feasible": True, "x": list(map(float, x)), "direction": list(map(float, e)),
                    "rows": rows, "curve": adv.curve.to_dict(), "adversarial": adv}
    return {"feasible": False, "rows": []}


def matched_fraction(c, t_interval, box, base: float = COMPOSITE_FRACTION,
                     probes: int = 4097) -> float:
    """Scale cap for f o c, as a fraction of the parameter interval.

    A parameter step h moves the curve by up to h max|c'|, so h is capped at
    base * (shortest side of the box) / max|c'|, and never above ``base``.
    """
    a, b = t_interval
    t = np.linspace(a, b, probes)
    speed = float(np.max(np.linalg.norm(c.eval(t, 1), axis=-1)))
    side = min(hi - lo for lo, hi in box)
    if speed == 0:
        return base
    return min(base, base * side / (speed * (b - a)))


def _classify_composite(f, c, m, criterion, t_interval, n, box) -> dict:
    key, alphas = _criterion_keys(criterion)
    S = compose(f, c, t_interval, n=n, order=m)
    frac = matched_fraction(c, t_interval, box)
    rep = classify(S, m, alphas=alphas, quotients=False, max_fraction=frac, fixed_centers=True)
    crit = rep.criteria[key]
    return {"verdict": rep.verdicts[key], "growth": crit.fit.growth, "reason": crit.fit.reason,
            "max_fraction": frac}


def adversarial_composite_verdict(f, adv: AdversarialCurve, criterion: str) -> dict:
    """Classify f o c on a grid resolving the smallest window (order 0)."""
    s_min = min(p.half_width for p in adv.curve.pieces)
    spacing = 2.0 ** math.floor(math.log2(s_min / 8))
    a, b = adv.curve.support
    a = spacing * math.floor(a / spacing)
    b = spacing * math.ceil(b / spacing)
    key, alphas = _criterion_keys(criterion)
    S = compose(f, adv.curve, (a, b), spacing=spacing, order=0)
    rep = classify(S, 0, alphas=alphas, quotients=False)
    crit = rep.criteria[key]
    return {"verdict": rep.verdicts[key], "growth": crit.fit.growth, "reason": crit.fit.reason,
            "spacing": spacing}


def boman_test(f: AnalyticFn, family: CurveFamily, m: int, criterion: str, box=None,
               direct_n: int = 1025, curve_n: int = 1048577, adversarial: bool = True,
               n_pieces: int = 12, threads: int = 1) -> BomanReport:
    """Direct verdict for f against verdicts for f o c over the family.

    A positive direct verdict should be matched by every composite; a
    negative one by at least one composite (for m = 0 the adversarial curve
    from the direct witnesses is added to the family).
    """
    if m > f.max_order:
        raise ParameterRangeError(f"m = {m} exceeds the derivative budget of {f.spec}")
    box = f.domain if box is None else box
    direct, crit = direct_verdict(f, m, criterion, box, direct_n)
    rep = BomanReport(f.spec, m, criterion, direct, crit.fit.to_dict())

    def work(item):
        i, c = item
        row = _classify_composite(f, c, m, criterion, family.t_interval, curve_n, box)
        row["curve"] = i
        return row

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        rows = list(pool.map(work, enumerate(family.curves)))
    rep.curves = sorted(rows, key=lambda r: r["curve"])
    verdicts = [r["verdict"] for r in rep.curves]
    if adversarial and not direct and m == 0:
        adv = witness_adversarial(f, crit, criterion, n_pieces)
        if adv["feasible"]:
            comp = adversarial_composite_verdict(f, adv.pop("adversarial"), criterion)
            adv["composite"] = comp
            verdicts.append(comp["verdict"])
        rep.adversarial = adv
    rep.family_verdict = all(verdicts)
    rep.agreement = rep.family_verdict == direct
    return rep
