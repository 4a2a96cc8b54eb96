"""Command-line front end: ``slts <command> <problem.json> [options]``.

Problem files are one JSON document::

    {
      "timescale": {"components": [[0.0, 1.0], [1.5, 1.5], [2.0, 2.0]]},
      "coefficients": {"r": "1", "p": "1 + t^2", "q": "sin(t)"},
      "bc": {"type": "separated", "alpha": 0.0, "beta": 0.0},
      "tolerances": {"rel": 1e-10, "abs": 1e-12},
      "task": {"range": [0, 200], "max": 5}
    }

Only ``timescale`` is required. Exit status: 0 success, 1 invalid input,
2 numerical failure. Diagnostics go to stderr; results to stdout or ``--out``.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .coefficients import CoefficientSet, geometric_length, validate_hypothesis
from .expr import ParseError, parse_coefficient
from .ivp import DEFAULT_TOL, Propagator
from .operators import BoundaryCondition, inner_product, validate_bc
from .spectra import (SpectralError, asymptotic_ratio, classify_weyl, find_eigenvalues, green,
                      m_function, spectral_transform, spectrum, weyl_disk)
from .timescale import DegenerateScaleError, TimeScale

__all__ = ["ProblemSpec", "ProblemError", "load_problem", "run", "main", "COMMANDS"]

COMMANDS = ("validate", "ivp", "eig", "green", "mfunc", "transform", "asymptotics", "weyl")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2


class ProblemError(ValueError):
    """Invalid problem file; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass
class ProblemSpec:
    ts: TimeScale
    cs: CoefficientSet
    bc: BoundaryCondition
    tol: tuple
    task: dict = field(default_factory=dict)
    path: str = ""


def tolerances_from_env(default=DEFAULT_TOL):
    raw = os.environ.get("SLTS_TOL")
    if not raw:
        return default
    try:
        rel, abs_ = (float(x) for x in raw.split(","))
    except ValueError:
        raise ProblemError("SLTS_TOL", f"expected 'rel,abs', got {raw!r}") from None
    if not (rel > 0 and abs_ > 0):
        raise ProblemError("SLTS_TOL", "tolerances must be positive")
    return rel, abs_


def load_problem(path) -> ProblemSpec:
    """Read and fully validate a problem file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ProblemError("file", str(exc)) from None
    except json.JSONDecodeError as exc:
        raise ProblemError("file", f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ProblemError("file", "top level must be a JSON object")

    try:
        ts = TimeScale.from_json(data["timescale"])
    except KeyError:
        raise ProblemError("timescale", "missing (or missing 'components')") from None
    except (ValueError, TypeError, DegenerateScaleError) as exc:
        raise ProblemError("timescale", str(exc)) from None

    coeffs = data.get("coefficients", {})
    parsed = {}
    for name, default in (("r", "1"), ("p", "1"), ("q", "0")):
        raw = coeffs.get(name, default)
        try:
            parsed[name] = getattr(CoefficientSet(**{name: raw}), name)
        except ParseError as exc:
            raise ProblemError(f"coefficients.{name}", f"syntax error in {raw!r}: {exc}") from None
        except TypeError as exc:
            raise ProblemError(f"coefficients.{name}", str(exc)) from None
    cs = CoefficientSet(**parsed)

    report = validate_hypothesis(cs, ts)
    if not report.ok:
        raise ProblemError("hypothesis", str(report))

    try:
        bc = BoundaryCondition.from_json(data.get("bc", {"type": "separated"}))
    except (ValueError, TypeError) as exc:
        raise ProblemError("bc", str(exc)) from None
    bc_report = validate_bc(ts, cs, bc)
    if not bc_report.valid:
        raise ProblemError("bc", str(bc_report))

    tol = tolerances_from_env()
    if "tolerances" in data:
        t = data["tolerances"]
        try:
            tol = (float(t.get("rel", tol[0])), float(t.get("abs", tol[1])))
        except (TypeError, ValueError, AttributeError):
            raise ProblemError("tolerances", "expected {\"rel\": number, \"abs\": number}") from None
    return ProblemSpec(ts, cs, bc, tol, dict(data.get("task", {})), str(path))


# --- output ------------------------------------------------------------------

def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _to_json(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {_to_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_to_json(v, indent + 1) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return "null" if not math.isfinite(obj) else fmt(obj)
    if isinstance(obj, complex):
        return _to_json([obj.real, obj.imag], indent)
    return json.dumps(str(obj))


def _csv(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- commands ------------------------------------------------------------------

def _z(flags, spec, default=0.0):
    z = flags.get("z")
    if z is None:
        z = spec.task.get("z", default)
    if isinstance(z, (list, tuple)):
        z = complex(float(z[0]), float(z[1]) if len(z) > 1 else 0.0)
    z = complex(z)
    return z.real if z.imag == 0 else z


def _range(flags, spec, default=None):
    rng = flags.get("range") or spec.task.get("range") or default
    if rng is None:
        raise ProblemError("task.range", "an eigenvalue range is required (--range a b)")
    return float(rng[0]), float(rng[1])


def _max(flags, spec, default=None):
    m = flags.get("max")
    if m is None:
        m = spec.task.get("max", default)
    return None if m is None else int(m)


def _kernel_grid(ts, n):
    pts = [t for t, _ in ts.atoms("sigma_kappa")]
    for lo, hi in ts.intervals():
        pts.extend(np.linspace(lo, hi, n))
    pts.append(ts.b)
    return np.unique(np.array(pts, float))


def _cmd_validate(spec, flags):
    report = {
        "timescale": spec.ts.to_json(),
        "hypothesis": "ok",
        "bc": "valid",
        "point_count": "infinite" if math.isinf(spec.ts.point_count()) else int(spec.ts.point_count()),
        "tolerances": {"rel": spec.tol[0], "abs": spec.tol[1]},
    }
    return _to_json(report) + "\n"


def _cmd_ivp(spec, flags):
    ic = flags.get("ic") or spec.task.get("ic")
    if ic is None:
        raise ProblemError("task.ic", "initial conditions are required (--ic c d1 d2)")
    c, d1, d2 = (float(v) for v in ic)
    z = _z(flags, spec)
    traj = Propagator(spec.ts, spec.cs, tol=spec.tol).solve(z, c, [(d1, d2)])[0]
    x, u, d = traj.samples()
    u, d = np.asarray(u, complex), np.asarray(d, complex)
    return _csv(["t", "re_u", "im_u", "re_u1", "im_u1"], zip(x, u.real, u.imag, d.real, d.imag))


def _cmd_eig(spec, flags):
    lo, hi = _range(flags, spec)
    n = _max(flags, spec)
    if spec.bc.kind == "separated":
        sr = spectrum(spec.ts, spec.cs, spec.bc, (lo, hi), max_count=n, tol=spec.tol)
    else:
        sr = find_eigenvalues(spec.ts, spec.cs, spec.bc, (lo, hi), max_count=n, tol=spec.tol)
    return _to_json(sr.to_json()) + "\n"


def _cmd_green(spec, flags):
    z = _z(flags, spec)
    n = int(spec.task.get("grid", 11))
    x = _kernel_grid(spec.ts, n)
    G = green(z, spec.ts, spec.cs, spec.bc, spec.tol)
    X, Y = np.meshgrid(x, x, indexing="ij")
    vals = np.asarray(G(X, Y), complex)
    return _csv(["x", "y", "re_g", "im_g"], zip(X.ravel(), Y.ravel(), vals.real.ravel(), vals.imag.ravel()))


def _cmd_mfunc(spec, flags):
    if flags.get("z") is not None:
        zs = [complex(_z(flags, spec))]
    else:
        grid = spec.task.get("z_grid", {"re": [-10, 10, 21], "im": [0.5, 2, 4]})
        re = np.linspace(*grid["re"][:2], int(grid["re"][2]))
        im = np.linspace(*grid["im"][:2], int(grid["im"][2]))
        zs = [complex(a, b) for b in im for a in re]
    prop = Propagator(spec.ts, spec.cs, tol=spec.tol)
    rows = []
    for z in zs:
        try:
            m = m_function(z, spec.ts, spec.cs, spec.bc, propagator=prop).m
        except SpectralError:
            m = complex(math.nan, math.nan)
        rows.append((z.real, z.imag, m.real, m.imag))
    return _csv(["re_z", "im_z", "re_m", "im_m"], rows)


def _cmd_transform(spec, flags):
    src = spec.task.get("f", "1")
    try:
        f = parse_coefficient(src)
    except ParseError as exc:
        raise ProblemError("task.f", f"syntax error in {src!r}: {exc}") from None
    n = _max(flags, spec, 10)
    lo, hi = _range(flags, spec)
    sr = spectrum(spec.ts, spec.cs, spec.bc, (lo, hi), max_count=n, tol=spec.tol)
    c = spectral_transform(f, sr, "forward")
    norm2 = float(inner_product(f, f, spec.ts, spec.cs).real)
    parseval = float(np.sum(np.abs(c) ** 2 * sr.norming_constants))
    out = {
        "f": src,
        "eigenvalues": list(sr.eigenvalues),
        "norming_constants": list(sr.norming_constants),
        "coefficients": [complex(v) if np.iscomplexobj(c) else float(v) for v in c],
        "norm_squared": norm2,
        "parseval_sum": parseval,
        "parseval_defect": abs(norm2 - parseval),
    }
    return _to_json(out) + "\n"


def _cmd_asymptotics(spec, flags):
    lo, hi = _range(flags, spec)
    sr = find_eigenvalues(spec.ts, spec.cs, spec.bc, (lo, hi), max_count=_max(flags, spec), tol=spec.tol)
    L = spec.task.get("L")
    if L is None:
        L = geometric_length(spec.cs, spec.ts)
    rep = asymptotic_ratio(sr, float(L))
    out = {"L": float(L), **rep.to_json()}
    return _to_json(out) + "\n"


def _truncate(ts: TimeScale, b: float) -> TimeScale:
    comps = []
    for lo, hi in ts.components:
        if lo > b:
            break
        comps.append((lo, min(hi, b)))
    if not comps or comps[-1][1] != b:
        raise ProblemError("task.truncations", f"truncation point {b!r} is not a point of the time scale")
    return TimeScale(tuple(comps))


def _cmd_weyl(spec, flags):
    cuts = spec.task.get("truncations")
    if not cuts:
        raise ProblemError("task.truncations", "a list of truncation points is required")
    z = complex(_z(flags, spec, default=[0.0, 1.0]))
    seq = [_truncate(spec.ts, float(b)) for b in cuts]
    alpha = spec.bc.alpha if spec.bc.kind == "separated" else 0.0
    disks = weyl_disk(z, seq, spec.cs, alpha, tol=spec.tol)
    out = {
        "z": z,
        "disks": [{"b": d.b, "center": d.center, "radius": d.radius} for d in disks],
        "reading": classify_weyl(disks),
    }
    return _to_json(out) + "\n"


_DISPATCH = {
    "validate": _cmd_validate,
    "ivp": _cmd_ivp,
    "eig": _cmd_eig,
    "green": _cmd_green,
    "mfunc": _cmd_mfunc,
    "transform": _cmd_transform,
    "asymptotics": _cmd_asymptotics,
    "weyl": _cmd_weyl,
}


def run(command: str, spec: ProblemSpec, flags: dict | None = None) -> tuple[int, str]:
    """Execute ``command``; returns ``(exit_code, output_text)``."""
    flags = flags or {}
    if command not in _DISPATCH:
        raise ProblemError("command", f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    return EXIT_OK, _DISPATCH[command](spec, flags)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"slts: error: {message}\n")
        sys.exit(EXIT_INVALID)


def _build_parser():
    p = _Parser(prog="slts", description="Sturm-Liouville problems on time scales")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("problem", help="problem file (JSON)")
    p.add_argument("--range", nargs=2, type=float, metavar=("A", "B"), help="eigenvalue search interval")
    p.add_argument("--max", type=int, metavar="N", help="maximum number of eigenvalues")
    p.add_argument("--z", nargs="+", type=float, metavar="X", help="spectral parameter: re [im]")
    p.add_argument("--ic", nargs=3, type=float, metavar=("C", "D1", "D2"),
                   help="initial point c with u(c) = d1 and u^[1](c) = d2")
    p.add_argument("--out", help="write results here instead of stdout")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.z is not None and len(args.z) > 2:
        sys.stderr.write("slts: error: --z takes one or two numbers\n")
        return EXIT_INVALID
    flags = {"range": args.range, "max": args.max, "z": args.z, "ic": args.ic}
    try:
        spec = load_problem(args.problem)
        code, text = run(args.command, spec, flags)
    except ProblemError as exc:
        sys.stderr.write(f"slts: invalid input: {exc}\n")
        return EXIT_INVALID
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"slts: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        sys.stderr.write(f"slts: invalid input: {exc}\n")
        return EXIT_INVALID
    _emit(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
