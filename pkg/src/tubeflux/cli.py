"""Batch interface: analyze tube configs, run sweeps, estimate modules.

    tubeflux analyze <config.json> [--sections t1,t2,...] [--out report.json]
    tubeflux sweep bound --lambda-min A --lambda-max B --steps N --out t.csv
    tubeflux sweep conjecture --q-min A --q-max B --steps N --out t.csv
    tubeflux modulus --domain <descriptor.json> --h <spacing>

Config schema for analyze: {"R": real, "g": string, "f"?: string,
"c"?: real, "N"?: int} with exactly one of f (explicit Weierstrass data) or
c (synthesize f from the Gauss map at vertical flux 2 pi c).

Exit codes: 0 success; 1 I/O, argument or schema error; 2 hypothesis
failure (the data does not close up to a tube, or univalence is violated) --
a diagnostic report is still written in that case.

Reports contain no timestamps or environment data: identical inputs give
byte-identical outputs.  Numbers are printed with 12 significant digits and
infinities as the string "inf".  Files are written atomically (temp file +
rename); per-row sweep failures go to a ".errors.log" sidecar next to the
output table.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .contour import Annulus, HoloFn
from .expr import ExprError
from .flux import lifetime_report
from .modulus import RingDomain, comparison_ring_module, grid_module_estimate, \
    max_log_radius
from .slitmap import conjecture_sweep
from .tubes import MinimalTube, NotATubeError, WeierstrassData, \
    section_polyline, tube_from_gauss

__all__ = ["main", "console_entry"]


# --- serialization -----------------------------------------------------------

def _num(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".12g")


def _is_number(v) -> bool:
    return isinstance(v, (int, float, np.integer, np.floating)) \
        and not isinstance(v, bool)


def _dumps(obj, indent: int = 0) -> str:
    """Deterministic JSON with 12-significant-digit floats."""
    pad = "  " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(
            f"{pad}  {json.dumps(str(k))}: {_dumps(v, indent + 1)}"
            for k, v in obj.items())
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(_is_number(v) for v in seq):
            return "[" + ", ".join(_dumps(v) for v in seq) + "]"
        body = ",\n".join(f"{pad}  {_dumps(v, indent + 1)}" for v in seq)
        return "[\n" + body + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write_atomic(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(target.parent) or ".",
                               prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _err(message: str) -> None:
    print(f"tubeflux: {message}", file=sys.stderr)


def _emit(report: dict, out: str | None, status: int) -> int:
    text = _dumps(report) + "\n"
    if out:
        try:
            _write_atomic(out, text)
        except OSError as exc:
            _err(f"cannot write {out}: {exc}")
            return 1
    else:
        sys.stdout.write(text)
    return status


# --- analyze -----------------------------------------------------------------

class SchemaError(ValueError):
    pass


def _validate_spec(cfg) -> dict:
    if not isinstance(cfg, dict):
        raise SchemaError("config root must be a JSON object")
    allowed = {"R", "g", "f", "c", "N"}
    for key in cfg:
        if key not in allowed:
            raise SchemaError(f"unknown field {key!r}")
    if "R" not in cfg or not _is_number(cfg["R"]):
        raise SchemaError("field 'R' (real > 1) is required")
    if float(cfg["R"]) <= 1.0:
        raise SchemaError(f"field 'R' must exceed 1, got {cfg['R']}")
    if "g" not in cfg or not isinstance(cfg["g"], str):
        raise SchemaError("field 'g' (expression string) is required")
    has_f = "f" in cfg
    has_c = "c" in cfg
    if has_f == has_c:
        raise SchemaError("exactly one of 'f' (expression) or 'c' (real) is required")
    if has_f and not isinstance(cfg["f"], str):
        raise SchemaError("field 'f' must be an expression string")
    if has_c and not _is_number(cfg["c"]):
        raise SchemaError("field 'c' must be a real number")
    if "N" in cfg:
        if not isinstance(cfg["N"], int) or isinstance(cfg["N"], bool) or cfg["N"] < 8:
            raise SchemaError("field 'N' must be an integer >= 8")
    return cfg


def _load_json(path: str):
    """Returns (parsed, None) or (None, exit-code) with the error printed."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        _err(f"cannot read {path}: {exc}")
        return None, 1
    try:
        return json.loads(text), None
    except json.JSONDecodeError as exc:
        _err(f"malformed JSON in {path}: {exc.msg} (line {exc.lineno}, "
             f"column {exc.colno})")
        return None, 1


def cmd_analyze(args) -> int:
    cfg, bad = _load_json(args.config)
    if bad is not None:
        return bad
    try:
        spec = _validate_spec(cfg)
    except SchemaError as exc:
        _err(f"config error: {exc}")
        return 1
    taus = []
    if args.sections:
        try:
            taus = [float(tok) for tok in args.sections.split(",") if tok.strip()]
        except ValueError:
            _err("--sections must be a comma-separated list of reals")
            return 1

    echo = {k: spec[k] for k in ("R", "g", "f", "c", "N") if k in spec}
    ann = Annulus(float(spec["R"]))
    try:
        g = HoloFn.parse(spec["g"], ann)
        f = HoloFn.parse(spec["f"], ann) if "f" in spec else None
    except ExprError as exc:
        _err(f"config error: bad expression: {exc}")
        return 1

    n = spec.get("N")
    try:
        if f is None:
            data = tube_from_gauss(g, float(spec["c"]), ann)
        else:
            data = WeierstrassData(f=f, g=g, annulus=ann)
        tube = MinimalTube(data, n_points=n)
    except NotATubeError as exc:
        report = {"config": echo, "verdict": "not a tube", "error": str(exc)}
        if exc.defect is not None:
            report["defect"] = [float(d) for d in exc.defect]
        return _emit(report, args.out, status=2)

    rep = lifetime_report(tube)
    probe = rep.probe
    report = {
        "config": echo,
        "verdict": "tube" if rep.hypothesis != "univalence violated"
                   else "not a tube",
        "defect": [float(d) for d in tube.defect],
        "closed": tube.is_closed,
        "univalent": probe.univalent if probe is not None else "inconclusive",
        "omits_zero": probe.omits_zero if probe is not None else "inconclusive",
        "Q": [tube.flux.J1, tube.flux.J2, tube.flux.J3],
        "alpha": tube.flux.alpha,
        "tan_alpha": abs(tube.flux.w),
        "life": [tube.life[0], tube.life[1]],
        "lifetime": {"measured": rep.lifetime.measured,
                     "from_flux": rep.lifetime.from_flux},
        "bound": rep.bound,
        "satisfied": rep.satisfied,
        "margin": rep.margin,
        "hypothesis": rep.hypothesis,
    }
    if taus:
        sections = {}
        for tau in taus:
            lo, hi = tube.life
            if not lo < tau < hi:
                _err(f"section {tau:g} lies outside the open life interval "
                     f"({lo:g}, {hi:g})")
                return 1
            pts = section_polyline(tube, tau)
            sections[format(tau, ".12g")] = [
                [float(p[0]), float(p[1]), float(p[2])] for p in pts]
        report["sections"] = sections
    status = 2 if rep.hypothesis == "univalence violated" else 0
    return _emit(report, args.out, status=status)


# --- sweeps ------------------------------------------------------------------

def _write_csv(out: str, header: str, lines: list) -> int:
    text = header + "\n" + "".join(line + "\n" for line in lines)
    try:
        _write_atomic(out, text)
    except OSError as exc:
        _err(f"cannot write {out}: {exc}")
        return 1
    return 0


def _write_sidecar(out: str, failures) -> None:
    if not failures:
        return
    text = "".join(f"q={q:.12g}: {reason}\n" for q, reason in failures)
    _write_atomic(out + ".errors.log", text)
    _err(f"{len(failures)} row(s) failed; see {out}.errors.log")


def cmd_sweep_bound(args) -> int:
    if args.steps < 1:
        _err("--steps must be at least 1")
        return 1
    if not 0.0 < args.lambda_min <= args.lambda_max:
        _err("need 0 < --lambda-min <= --lambda-max")
        return 1
    grid = np.linspace(args.lambda_min, args.lambda_max, args.steps)
    lines = []
    failures = []
    for lam in grid:
        try:
            lines.append(f"{lam:.12g},{max_log_radius(lam):.12g},"
                         f"{comparison_ring_module(lam):.12g}")
        except (ValueError, ArithmeticError) as exc:
            failures.append((lam, f"{type(exc).__name__}: {exc}"))
    bad = _write_csv(args.out, "lambda,lnR0,modD", lines)
    if bad:
        return bad
    _write_sidecar(args.out, failures)
    return 0


def cmd_sweep_conjecture(args) -> int:
    if args.steps < 1:
        _err("--steps must be at least 1")
        return 1
    if not 0.02 < args.q_min <= args.q_max < 0.95:
        _err("need 0.02 < --q-min <= --q-max < 0.95")
        return 1
    grid = np.linspace(args.q_min, args.q_max, args.steps)
    result = conjecture_sweep(grid)
    lines = [f"{r.q:.12g},{r.R:.12g},{r.lam:.12g},{r.lnR:.12g},"
             f"{r.lnR0:.12g},{r.ratio:.12g}" for r in result.rows]
    bad = _write_csv(args.out, "q,R,lambda,lnR,lnR0,ratio", lines)
    if bad:
        return bad
    _write_sidecar(args.out, result.failures)
    return 0


# --- modulus -----------------------------------------------------------------

def cmd_modulus(args) -> int:
    desc, bad = _load_json(args.domain)
    if bad is not None:
        return bad
    try:
        domain = RingDomain.from_json(desc)
    except ValueError as exc:
        _err(f"domain error: {exc}")
        return 1
    if not args.h > 0.0:
        _err("--h must be positive")
        return 1
    try:
        est = grid_module_estimate(domain, args.h)
    except (ValueError, RuntimeError) as exc:
        _err(f"estimate failed: {exc}")
        return 1
    report = {
        "domain": domain.descriptor,
        "h": est.h,
        "module": est.value,
        "indicator": est.indicator,
        "truncation_sensitivity": est.truncation_sensitivity,
        "dof": est.dof,
    }
    if domain.exact_module is not None:
        report["exact"] = domain.exact_module
    sys.stdout.write(_dumps(report) + "\n")
    return 0


# --- wiring ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors, which this interface
    # reserves for hypothesis failures; remap to the I/O-error code
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tubeflux",
                description="minimal tubes over annuli: analysis and sweeps")
    sub = p.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="analyze a tube config")
    pa.add_argument("config", help="JSON tube spec")
    pa.add_argument("--sections", default=None, metavar="T1,T2,...",
                    help="emit section polylines at these times")
    pa.add_argument("--out", default=None, help="report path (default stdout)")
    pa.set_defaults(func=cmd_analyze)

    ps = sub.add_parser("sweep", help="tabulate bounds over a grid")
    kinds = ps.add_subparsers(dest="kind", required=True)

    pb = kinds.add_parser("bound", help="lnR0 and comparison-ring module vs lambda")
    pb.add_argument("--lambda-min", type=float, required=True, dest="lambda_min")
    pb.add_argument("--lambda-max", type=float, required=True, dest="lambda_max")
    pb.add_argument("--steps", type=int, required=True)
    pb.add_argument("--out", required=True)
    pb.set_defaults(func=cmd_sweep_bound)

    pc = kinds.add_parser("conjecture",
                          help="calibrated two-slit candidates: lnR vs lnR0")
    pc.add_argument("--q-min", type=float, required=True, dest="q_min")
    pc.add_argument("--q-max", type=float, required=True, dest="q_max")
    pc.add_argument("--steps", type=int, required=True)
    pc.add_argument("--out", required=True)
    pc.set_defaults(func=cmd_sweep_conjecture)

    pm = sub.add_parser("modulus", help="grid estimate of a ring module")
    pm.add_argument("--domain", required=True, help="JSON domain descriptor")
    pm.add_argument("--h", type=float, required=True, help="grid spacing")
    pm.set_defaults(func=cmd_modulus)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
