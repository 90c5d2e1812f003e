"""Command line driver: one subcommand per experiment.

Every run writes a JSON (or CSV) payload that depends only on the command
line, plus a ``.meta.json`` sidecar with the wall-clock details.  Exit codes:
0 success, 1 error, 2 the experiment ran but a predicted verdict was not
reproduced.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import finitediff, stencil
from .corpus import make_function
from .curvelab import boman_test, random_polynomial_family
from .errors import ZygmundError
from .seminorm import (
    ModulusSpec,
    SampledFn,
    classify,
    estimate_exponent,
    holder_seminorm,
    lambda_norm,
    lip_norm,
    statistic_table,
    index_box,
    SYMMETRIC2,
    FIRST,
    sup_norm,
    zygmund_seminorm,
)
from .superposition import classify_superposition

OUT_DIR_ENV = "ZYGMUND_OUT_DIR"
EXIT_OK, EXIT_ERROR, EXIT_MISMATCH = 0, 1, 2
SUBCOMMANDS = ("stencil", "seminorm", "estimate", "classify", "boman", "superpose", "identities")


# --- deterministic JSON ----------------------------------------------------------------


def _float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with sorted keys and every float written with 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return {None: "null", True: "true", False: "false"}[None if obj is None else bool(obj)]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, Fraction):
        return json.dumps(f"{obj.numerator}/{obj.denominator}")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}"
                 for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# --- run configuration ------------------------------------------------------------------


@dataclass
class RunConfig:
    subcommand: str
    fn: str | None = None
    interval: tuple[float, float] | None = None
    grid: int | None = None
    dx: float | None = None
    seed: int = 0
    threads: int = 1
    output: str | None = None
    fmt: str = "json"
    options: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("output")
        d.pop("threads")  # results do not depend on the worker count
        return d


def _sampling(cfg: RunConfig, f, order: int = 0) -> SampledFn:
    domain = cfg.interval if cfg.interval is not None else f.domain
    if cfg.dx is not None:
        return SampledFn.sample(f, domain, spacing=cfg.dx, order=order)
    return SampledFn.sample(f, domain, n=cfg.grid or 65537, order=order)


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_float(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


# --- subcommands: each returns (payload, csv text or None, mismatch flag) ------------------


def run_identities(cfg: RunConfig):
    m, trials = cfg.options["m"], cfg.options["trials"]
    rng = np.random.default_rng(cfg.seed)
    exact = finitediff.identity_suite(rng, trials, m)
    fns = [np.sin, np.cos, np.exp, lambda t: 1.0 / (2.0 + t), lambda t: t**3 - t]
    floats = finitediff.float_identity_suite(fns, rng, trials, m)
    exact_max = {k: float(v) for k, v in finitediff.max_residual(exact).items()}
    float_max = finitediff.max_residual(floats)
    ok = all(v == 0 for v in exact_max.values()) and all(
        v <= finitediff.TOL_EXACT for v in float_max.values())
    payload = {"exact_max_residual": exact_max, "float_max_residual": float_max,
               "tolerance": finitediff.TOL_EXACT, "passed": ok,
               "exact_rows": [{k: float(v) if isinstance(v, Fraction) else v for k, v in r.items()}
                              for r in exact]}
    text = _rows_csv(["identity", "exact_max", "float_max"],
                     [(k, exact_max[k], float_max.get(k, 0.0)) for k in sorted(exact_max)])
    return payload, text, not ok


def run_stencil(cfg: RunConfig):
    m, kind = cfg.options["m"], cfg.options["kind"]
    st = stencil.make_stencil(m, kind)
    payload = st.to_dict()
    text = _rows_csv(["j", "coefficient"],
                     [(j, f"{c.numerator}/{c.denominator}") for j, c in enumerate(st.coefficients)])
    return payload, text, st.certified_order < m + 0.9


def run_seminorm(cfg: RunConfig):
    f = make_function(cfg.fn)
    norm, order = cfg.options["norm"], cfg.options["order"]
    S = _sampling(cfg, f, order)
    if order:
        S = S.shifted((order,))
    h_mode = cfg.options["h_mode"]
    payload = {"norm": norm, "order": order}
    table = []
    if norm == "zygmund":
        res = zygmund_seminorm(S, h_mode=h_mode)
        table = statistic_table(S, S.values, index_box(S), SYMMETRIC2, lambda t: t, 2, h_mode)
    elif norm == "holder":
        omega = ModulusSpec("power", cfg.options["alpha"])
        res = holder_seminorm(S, omega, h_mode=h_mode)
        a = cfg.options["alpha"]
        table = statistic_table(S, S.values, index_box(S), FIRST, lambda t: t**a, 1, h_mode)
    elif norm == "sup":
        res = None
        payload["value"] = sup_norm(S)
    elif norm == "lambda":
        res = None
        payload["value"] = lambda_norm(S, cfg.options["s"], h_mode=h_mode)
    else:
        res = None
        payload["value"] = lip_norm(S, int(cfg.options["s"]), h_mode=h_mode)
    if res is not None:
        payload.update(value=res.value, witness_x=list(res.witness_x), witness_h=list(res.witness_h))
    payload["scales"] = [{"h": r.h, "statistic": r.statistic, "witness_x": list(r.witness_x)}
                         for r in table]
    text = _rows_csv(["h", "statistic", "witness_x"],
                     [(r.h, r.statistic, ";".join(_float(v) for v in r.witness_x)) for r in table])
    return payload, text, False


def run_estimate(cfg: RunConfig):
    f = make_function(cfg.fn)
    rep = estimate_exponent(_sampling(cfg, f), cfg.options["n"])
    expect = cfg.options.get("expect")
    mismatch = expect is not None and abs(rep.exponent - expect) > cfg.options["tol"]
    return rep.to_dict(), rep.to_csv(), mismatch


def run_classify(cfg: RunConfig):
    f = make_function(cfg.fn)
    m = cfg.options["m"]
    alphas = tuple(cfg.options["alpha"] or getattr(f.label, "probe_alphas", ()))
    rep = classify(_sampling(cfg, f, m), m, alphas=alphas)
    expected = f.label.verdicts(m, alphas)
    payload = rep.to_dict()
    payload["expected"] = expected
    mismatch = any(rep.verdicts[k] != v for k, v in expected.items())
    return payload, rep.to_csv(), mismatch


def run_boman(cfg: RunConfig):
    f = make_function(cfg.fn)
    o = cfg.options
    fam = random_polynomial_family(o["curves"], f.domain, degree=o["degree"], seed=cfg.seed)
    rep = boman_test(f, fam, o["m"], o["criterion"], direct_n=o["direct_grid"],
                     curve_n=o["curve_grid"], adversarial=not o["no_adversarial"],
                     n_pieces=o["pieces"], threads=cfg.threads)
    payload = rep.to_dict()
    payload["family"] = [c.to_dict() for c in fam.curves]
    text = _rows_csv(["curve", "verdict", "growth"],
                     [(r["curve"], r["verdict"], r["growth"]) for r in rep.curves])
    return payload, text, not rep.agreement


def run_superpose(cfg: RunConfig):
    f = make_function(cfg.fn)
    o = cfg.options
    res = classify_superposition(f, o["m"], o["k"], threads=cfg.threads)
    text = _rows_csv(["t", "v", "statistic"],
                     [(r["t"], r["v"], r["statistic"]) for r in res["report"]["mixed_table"]])
    return res, text, not res["agree"]


RUNNERS = {
    "identities": run_identities,
    "stencil": run_stencil,
    "seminorm": run_seminorm,
    "estimate": run_estimate,
    "classify": run_classify,
    "boman": run_boman,
    "superpose": run_superpose,
}


# --- argument parsing ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zygmund", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, fn=True, grid=True):
        if fn:
            sp.add_argument("--fn", required=True, help="function spec, e.g. weierstrass:depth=20")
        if grid:
            sp.add_argument("--interval", type=float, nargs=2, metavar=("A", "B"))
            g = sp.add_mutually_exclusive_group()
            g.add_argument("--grid", type=int, help="number of grid points per axis")
            g.add_argument("--dx", type=float, help="grid spacing")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--out", help=f"output file (default: ${OUT_DIR_ENV}/<subcommand>.<fmt>)")
        sp.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")

    sp = sub.add_parser("identities", help="exact and float difference-calculus identities")
    sp.add_argument("--m", type=int, default=8, help="largest difference order")
    sp.add_argument("--trials", type=int, default=100)
    common(sp, fn=False, grid=False)

    sp = sub.add_parser("stencil", help="first-derivative stencil with exact coefficients")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--kind", choices=stencil.KINDS, default="zygmund")
    common(sp, fn=False, grid=False)

    sp = sub.add_parser("seminorm", help="grid seminorms and norms")
    sp.add_argument("--norm", choices=("zygmund", "holder", "sup", "lambda", "lip"), default="zygmund")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--s", type=float, default=1.0)
    sp.add_argument("--order", type=int, default=0, help="derivative order to apply the norm to")
    sp.add_argument("--h-mode", choices=("dyadic", "all"), default="dyadic", dest="h_mode")
    common(sp)

    sp = sub.add_parser("estimate", help="regularity exponent from n-th differences")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--expect", type=float)
    sp.add_argument("--tol", type=float, default=0.1)
    common(sp)

    sp = sub.add_parser("classify", help="Zygmund / Lipschitz / Hoelder membership at order m")
    sp.add_argument("--m", type=int, default=0)
    sp.add_argument("--alpha", type=float, action="append")
    common(sp)

    sp = sub.add_parser("boman", help="direct verdict against verdicts along curves")
    sp.add_argument("--m", type=int, default=0)
    sp.add_argument("--criterion", default="zygmund")
    sp.add_argument("--curves", type=int, default=8)
    sp.add_argument("--degree", type=int, default=3)
    sp.add_argument("--direct-grid", type=int, default=1025, dest="direct_grid")
    sp.add_argument("--curve-grid", type=int, default=1048577, dest="curve_grid")
    sp.add_argument("--pieces", type=int, default=12)
    sp.add_argument("--no-adversarial", action="store_true", dest="no_adversarial")
    common(sp, grid=False)

    sp = sub.add_parser("superpose", help="Lipschitz behaviour of g -> f o g")
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--k", type=int, default=1)
    common(sp, grid=False)
    return p


_COMMON = {"subcommand", "fn", "interval", "grid", "dx", "seed", "threads", "out", "fmt"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    options = {k: v for k, v in vars(ns).items() if k not in _COMMON}
    return RunConfig(
        subcommand=ns.subcommand,
        fn=getattr(ns, "fn", None),
        interval=tuple(ns.interval) if getattr(ns, "interval", None) else None,
        grid=getattr(ns, "grid", None),
        dx=getattr(ns, "dx", None),
        seed=ns.seed,
        threads=ns.threads,
        output=ns.out,
        fmt=ns.fmt,
        options=options,
    )


def _output_path(cfg: RunConfig) -> Path | None:
    if cfg.output:
        return Path(cfg.output)
    base = os.environ.get(OUT_DIR_ENV)
    if base:
        return Path(base) / f"{cfg.subcommand}.{cfg.fmt}"
    return None


def run(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    cfg = config_from_args(ns)
    started = time.time()
    try:
        if cfg.fn is not None:
            make_function(cfg.fn)  # validate before any work
        result, text, mismatch = RUNNERS[cfg.subcommand](cfg)
    except (ZygmundError, ValueError, LookupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    payload = {"config": cfg.to_dict(), "result": result}
    body = dumps(payload) + "\n" if cfg.fmt == "json" else text
    path = _output_path(cfg)
    if path is None:
        sys.stdout.write(body)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(body)
        meta = {"started": started, "finished": time.time(), "argv": list(argv or sys.argv[1:]),
                "python": platform.python_version(), "numpy": np.__version__,
                "seed": cfg.seed, "threads": cfg.threads}
        Path(str(path) + ".meta.json").write_text(dumps(meta) + "\n")
    if mismatch:
        print("verdict mismatch: the predicted outcome was not reproduced", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
