"""The coefficient triple (r, p, q), its validation and the extensions to the real line."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .expr import EvaluationError, Expression, Num, parse_coefficient
from .quadrature import gauss_kronrod
from .timescale import TimeScale

__all__ = [
    "CoefficientSet",
    "HypothesisReport",
    "Violation",
    "MeasureTriple",
    "validate_hypothesis",
    "extend_bar",
    "extend_hat",
    "extend_hat_slope",
    "geometric_length",
    "chebyshev_samples",
]

Coefficient = Union[Expression, Callable, float, str]

CHEB_SAMPLES = 64


def _as_function(c):
    if isinstance(c, Expression):
        return c
    if isinstance(c, str):
        return parse_coefficient(c)
    if isinstance(c, (int, float)) and not isinstance(c, bool):
        return Num(float(c))
    if callable(c):
        return c
    raise TypeError(f"cannot interpret {c!r} as a coefficient")


def _normalize(c):
    if isinstance(c, (list, tuple)):
        return tuple(_as_function(x) for x in c)
    return _as_function(c)


@dataclass(frozen=True)
class CoefficientSet:
    """Weight ``r``, stiffness ``p`` and potential ``q``.

    Each coefficient is either one function used on every component or a
    tuple with one function per component of the time scale. Functions are
    :class:`~slts.expr.Expression` trees, numbers, expression strings or
    vectorized callables.
    """

    r: Coefficient = 1.0
    p: Coefficient = 1.0
    q: Coefficient = 0.0

    def __post_init__(self):
        for name in ("r", "p", "q"):
            object.__setattr__(self, name, _normalize(getattr(self, name)))

    @classmethod
    def from_json(cls, data: dict) -> "CoefficientSet":
        return cls(r=data.get("r", "1"), p=data.get("p", "1"), q=data.get("q", "0"))

    def piece(self, name: str, component: int):
        """Function for coefficient ``name`` on component ``component``."""
        c = getattr(self, name)
        if isinstance(c, tuple):
            return c[component]
        return c

    def check_layout(self, ts: TimeScale):
        for name in ("r", "p", "q"):
            c = getattr(self, name)
            if isinstance(c, tuple) and len(c) != len(ts.components):
                raise ValueError(f"coefficient {name} lists {len(c)} pieces for "
                                 f"{len(ts.components)} components")

    def evaluate(self, name: str, t, ts: TimeScale) -> np.ndarray:
        """Evaluate ``name`` at scale points ``t`` (one-sided limits at component ends)."""
        t = np.atleast_1d(np.asarray(t, float))
        c = getattr(self, name)
        if not isinstance(c, tuple):
            return _call(c, t)
        idx = ts.locate(t)
        if np.any(idx < 0):
            raise ValueError(f"coefficient {name} requested off the time scale at t = {t[idx < 0][0]!r}")
        out = np.empty(t.shape, dtype=float)
        for i in np.unique(idx):
            sel = idx == i
            out[sel] = np.real_if_close(_call(c[i], t[sel]))
        return out

    def r_at(self, t, ts):
        return self.evaluate("r", t, ts)

    def p_at(self, t, ts):
        return self.evaluate("p", t, ts)

    def q_at(self, t, ts):
        return self.evaluate("q", t, ts)


def _call(f, t):
    out = np.asarray(f(t))
    if out.shape != np.shape(t):
        out = np.broadcast_to(out, np.shape(t)).copy()
    return out


@dataclass(frozen=True)
class Violation:
    clause: str
    message: str
    witness: float | None = None


@dataclass
class HypothesisReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def failed_clauses(self) -> set[str]:
        return {v.clause for v in self.violations}

    def __str__(self):
        if self.ok:
            return "hypothesis: all clauses hold (sampled)"
        return "\n".join(f"clause ({v.clause}): {v.message}" for v in self.violations)


def chebyshev_samples(lo: float, hi: float, n: int = CHEB_SAMPLES) -> np.ndarray:
    """``n`` Chebyshev points of the first kind on ``[lo, hi]`` plus both endpoints."""
    k = np.arange(n)
    x = np.cos(np.pi * (k + 0.5) / n)[::-1]
    return np.concatenate([[lo], 0.5 * (lo + hi) + 0.5 * (hi - lo) * x, [hi]])


def _sample(cs: CoefficientSet, name: str, t: np.ndarray, ts: TimeScale, clause: str, report):
    try:
        return np.asarray(cs.evaluate(name, t, ts))
    except (EvaluationError, ValueError, ZeroDivisionError, FloatingPointError) as exc:
        report.violations.append(Violation(clause, f"{name} cannot be evaluated: {exc}"))
        return None


def validate_hypothesis(cs: CoefficientSet, ts: TimeScale) -> HypothesisReport:
    """Sampled check of the four standing assumptions on (r, p, q) and the scale.

    Clauses: (i) r > 0 sigma_kappa-a.e.; (ii) q real sigma_kappa-a.e.;
    (iii) p real and nonzero rho-a.e.; (iv) more than four points. The a.e.
    conditions are only sampled: all relevant atoms plus 64 Chebyshev points
    and the endpoints of every interval component.
    """
    report = HypothesisReport()
    try:
        cs.check_layout(ts)
    except ValueError as exc:
        report.violations.append(Violation("layout", str(exc)))
        return report

    cont = [chebyshev_samples(lo, hi) for lo, hi in ts.intervals()]
    cont = np.concatenate(cont) if cont else np.empty(0)
    kappa_atoms = np.array([t for t, _ in ts.atoms("sigma_kappa")])
    rho_atoms = np.array([t for t, _ in ts.atoms("rho")])
    pts_kappa = np.concatenate([kappa_atoms, cont])
    pts_rho = np.concatenate([rho_atoms, cont])

    r = _sample(cs, "r", pts_kappa, ts, "i", report) if pts_kappa.size else np.empty(0)
    if r is not None:
        bad = ~np.isfinite(r) | (np.real(r) <= 0) | (np.imag(r) != 0)
        if np.any(bad):
            w = float(pts_kappa[bad][0])
            report.violations.append(Violation("i", f"r is not positive at t = {w:g} (r = {r[bad][0]})", w))

    q = _sample(cs, "q", pts_kappa, ts, "ii", report) if pts_kappa.size else np.empty(0)
    if q is not None:
        bad = ~np.isfinite(q) | (np.imag(q) != 0)
        if np.any(bad):
            w = float(pts_kappa[bad][0])
            report.violations.append(Violation("ii", f"q is not real and finite at t = {w:g}", w))

    p = _sample(cs, "p", pts_rho, ts, "iii", report) if pts_rho.size else np.empty(0)
    if p is not None:
        bad = ~np.isfinite(p) | (np.imag(p) != 0) | (p == 0)
        if np.any(bad):
            w = float(pts_rho[bad][0])
            report.violations.append(Violation("iii", f"p is zero, non-real or non-finite at t = {w:g}", w))
        else:
            for lo, hi in ts.intervals():
                ps = np.real(cs.evaluate("p", chebyshev_samples(lo, hi), ts))
                if np.any(ps > 0) and np.any(ps < 0):
                    report.violations.append(Violation(
                        "iii", f"p changes sign on [{lo:g}, {hi:g}] and therefore vanishes there", lo))

    if not ts.point_count() > 4:
        report.violations.append(Violation(
            "iv", f"the time scale consists of {int(ts.point_count())} points; "
                  "it must consist of more than four points"))
    return report


# --- extensions to the real line ----------------------------------------

def _value_fn(u):
    return u.value if hasattr(u, "value") else u


def extend_bar(f, ts: TimeScale, t):
    """``f`` on ``T_kappa``; ``f(sigma_kappa(t))`` elsewhere (constant on gaps)."""
    t = np.asarray(t, float)
    if np.any(t > ts.b):
        raise ValueError("extend_bar is defined for t <= b")
    kappa = _in_kappa(ts, t)
    s = np.where(kappa, t, ts.sigma_kappa(t))
    return np.asarray(f(s))


def _in_kappa(ts: TimeScale, t):
    inside = ts.contains(t)
    if ts.a_right_scattered():
        inside &= t != ts.a
    return inside


def extend_hat(u, ts: TimeScale, x):
    """Continuous extension of a function on ``T`` that is affine on every gap.

    ``u`` is a callable on ``T`` (or an object with a ``value`` method, such as
    a trajectory).
    """
    f = _value_fn(u)
    x = np.atleast_1d(np.asarray(x, float))
    if np.any((x < ts.a) | (x > ts.b)):
        raise ValueError(f"extend_hat is defined on [{ts.a}, {ts.b}]")
    on = ts.contains(x)
    s = np.asarray(ts.sigma_kappa(x))
    vals = np.asarray(f(np.where(on, x, s)))
    out = vals.astype(np.result_type(vals, float))
    gap = ~on
    if np.any(gap):
        sg = s[gap]
        sp = ts.rho(sg)
        slope = (vals[gap] - np.asarray(f(sp))) / (sg - sp)
        out[gap] = vals[gap] + slope * (x[gap] - sg)
    return out


def extend_hat_slope(u, ts: TimeScale, x, derivative=None):
    """Derivative of :func:`extend_hat` (left limit where it jumps).

    On gaps, and at isolated points, this is the nabla difference quotient
    across the gap to the left. On interval components it needs
    ``derivative``, the classical derivative of ``u`` there.
    """
    f = _value_fn(u)
    x = np.atleast_1d(np.asarray(x, float))
    idx = ts.locate(x)
    comps = ts.components
    dense = np.array([i >= 0 and comps[i][1] > comps[i][0] for i in idx], dtype=bool)
    parts = {}
    if np.any(dense):
        if derivative is None:
            raise ValueError("the derivative on interval components must be supplied")
        parts["dense"] = np.asarray(derivative(x[dense]))
    rest = ~dense
    if np.any(rest):
        s = np.where(idx[rest] >= 0, x[rest], ts.sigma_kappa(x[rest]))
        sp = ts.rho(s)
        parts["rest"] = (np.asarray(f(s)) - np.asarray(f(sp))) / (s - sp)
    out = np.zeros(x.shape, dtype=np.result_type(*parts.values(), float))
    if "dense" in parts:
        out[dense] = parts["dense"]
    if "rest" in parts:
        out[rest] = parts["rest"]
    return out


def geometric_length(cs: CoefficientSet, ts: TimeScale) -> float:
    """``L = int_T sqrt(r / p) dt`` over the interval components."""
    total = 0.0
    for i, (lo, hi) in enumerate(ts.components):
        if hi == lo:
            continue
        r, p = cs.piece("r", i), cs.piece("p", i)
        ps = np.real(_call(p, chebyshev_samples(lo, hi)))
        if np.any(ps <= 0):
            raise ValueError(f"p must be positive on the interval component [{lo:g}, {hi:g}]")
        val, _ = gauss_kronrod(lambda t: np.sqrt(np.real(_call(r, t)) / np.real(_call(p, t))), lo, hi)
        total += val
    return float(total)


@dataclass(frozen=True)
class MeasureTriple:
    """The measures ``r dsigma_kappa``, ``dt / pbar`` and ``q dsigma_kappa`` on the line."""

    ts: TimeScale
    cs: CoefficientSet

    def atom_mass(self, which: str, t: float) -> float:
        """Point mass of ``varrho`` or ``chi`` at ``t`` (``varsigma`` has none)."""
        if which == "varsigma":
            return 0.0
        name = {"varrho": "r", "chi": "q"}[which]
        for s, m in self.ts.atoms("sigma_kappa"):
            if s == t:
                return float(m * self.cs.evaluate(name, s, self.ts)[0])
        return 0.0

    def density(self, which: str, t):
        """Density with respect to Lebesgue measure (absolutely continuous part)."""
        t = np.asarray(t, float)
        if which == "varsigma":
            return 1.0 / extend_bar(lambda s: self.cs.evaluate("p", s, self.ts), self.ts, t)
        name = {"varrho": "r", "chi": "q"}[which]
        on = self.ts.contains(t)
        out = np.zeros(t.shape)
        if np.any(on):
            out[on] = self.cs.evaluate(name, t[on], self.ts)
        return out

    def mass(self, which: str, lo: float, hi: float) -> float:
        """Measure of the closed interval ``[lo, hi]``."""
        total = sum(self.atom_mass(which, s) for s, _ in self.ts.atoms("sigma_kappa") if lo <= s <= hi)
        if which == "varsigma":
            edges = sorted({lo, hi, *[x for c in self.ts.components for x in c if lo < x < hi]})
            for x0, x1 in zip(edges, edges[1:]):
                val, _ = gauss_kronrod(lambda t: self.density("varsigma", t), x0, x1)
                total += val
            return total
        for c0, c1 in self.ts.intervals():
            x0, x1 = max(lo, c0), min(hi, c1)
            if x1 > x0:
                val, _ = gauss_kronrod(lambda t: self.density(which, t), x0, x1)
                total += val
        return total
