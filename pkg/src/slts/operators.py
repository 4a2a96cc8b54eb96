"""Boundary conditions, the differential expression and its symmetry."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .coefficients import (CoefficientSet, MeasureTriple, chebyshev_samples, extend_hat,
                           extend_hat_slope)
from .timescale import TimeScale, integrate

__all__ = [
    "BoundaryCondition",
    "BCViolation",
    "ValidityReport",
    "GridFunction",
    "validate_bc",
    "bc_residual",
    "apply_ell",
    "apply_tau",
    "ell_of",
    "inner_product",
    "norm",
    "symmetry_defect",
    "lagrange_boundary_term",
    "evaluation_points",
]

DET_TOL = 1e-12
EXCLUSION_RTOL = 1e-12
RESIDUAL_TOL = 1e-8


def _canonical_angle(name, value):
    value = float(value)
    reduced = math.fmod(value, math.pi)
    if reduced < 0:
        reduced += math.pi
    if reduced == math.pi:
        reduced = 0.0
    if not 0.0 <= value < math.pi:
        warnings.warn(f"{name} = {value!r} reduced mod pi to {reduced!r}", stacklevel=3)
    return reduced


@dataclass(frozen=True)
class BoundaryCondition:
    """Separated (``alpha``, ``beta``) or coupled (``phi``, ``R``) conditions.

    Use :meth:`separated` and :meth:`coupled` to construct; angles are
    reduced into ``[0, pi)``.
    """

    kind: str
    alpha: float = 0.0
    beta: float = 0.0
    phi: float = 0.0
    R: tuple = ((1.0, 0.0), (0.0, 1.0))

    def __post_init__(self):
        if self.kind not in ("separated", "coupled"):
            raise ValueError(f"kind must be 'separated' or 'coupled', not {self.kind!r}")
        object.__setattr__(self, "alpha", _canonical_angle("alpha", self.alpha))
        object.__setattr__(self, "beta", _canonical_angle("beta", self.beta))
        object.__setattr__(self, "phi", _canonical_angle("phi", self.phi))
        R = np.asarray(self.R, dtype=float)
        if R.shape != (2, 2) or not np.all(np.isfinite(R)):
            raise ValueError("R must be a finite real 2x2 matrix")
        if self.kind == "coupled" and abs(np.linalg.det(R) - 1.0) > DET_TOL:
            raise ValueError(f"coupled conditions need det R = 1, got {np.linalg.det(R)!r}")
        object.__setattr__(self, "R", tuple(map(tuple, R.tolist())))

    @classmethod
    def separated(cls, alpha: float, beta: float) -> "BoundaryCondition":
        return cls("separated", alpha=alpha, beta=beta)

    @classmethod
    def coupled(cls, phi: float, R) -> "BoundaryCondition":
        return cls("coupled", phi=phi, R=R)

    @classmethod
    def dirichlet(cls) -> "BoundaryCondition":
        return cls.separated(0.0, 0.0)

    @classmethod
    def from_json(cls, data: dict) -> "BoundaryCondition":
        kind = data.get("type")
        if kind == "separated":
            return cls.separated(data.get("alpha", 0.0), data.get("beta", 0.0))
        if kind == "coupled":
            return cls.coupled(data.get("phi", 0.0), data.get("R", [[1, 0], [0, 1]]))
        raise ValueError(f"bc.type must be 'separated' or 'coupled', not {kind!r}")

    def to_json(self) -> dict:
        if self.kind == "separated":
            return {"type": "separated", "alpha": self.alpha, "beta": self.beta}
        return {"type": "coupled", "phi": self.phi, "R": [list(r) for r in self.R]}

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.R, dtype=float)


@dataclass(frozen=True)
class BCViolation:
    clause: str
    message: str
    witness: dict = field(default_factory=dict)


@dataclass
class ValidityReport:
    violations: list[BCViolation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.valid:
            return "boundary conditions: valid"
        return "\n".join(f"{v.clause}: {v.message}" for v in self.violations)


_REMEDY = ("the operator would be multi-valued (its domain is not dense); "
           "drop the scattered endpoint and pose the problem on the trimmed scale instead")


def _close(x, y):
    return abs(x - y) <= EXCLUSION_RTOL * max(abs(x), abs(y), 1e-300)


def validate_bc(ts: TimeScale, cs: CoefficientSet, bc: BoundaryCondition) -> ValidityReport:
    """Reject the parameter choices that make the boundary value operator multi-valued."""
    report = ValidityReport()
    sa = ts.sigma_a()
    sa_scattered = float(ts.mu(sa)) > 0
    nu_b = ts.b - ts.rho_b()
    b_scattered = nu_b > 0
    p_b = float(cs.evaluate("p", ts.b, ts)[0])
    if bc.kind == "separated":
        if sa_scattered and bc.alpha == 0.0:
            report.violations.append(BCViolation(
                "sigma(a) right scattered",
                f"alpha = 0 is excluded when sigma(a) = {sa:g} is right scattered "
                f"(mu = {float(ts.mu(sa)):g}); {_REMEDY}",
                {"sigma_a": sa, "alpha": bc.alpha}))
        if b_scattered:
            lhs = p_b * math.sin(bc.beta)
            rhs = nu_b * math.cos(bc.beta)
            if _close(lhs, rhs):
                report.violations.append(BCViolation(
                    "rho(b) right scattered",
                    f"p(b) sin(beta) = (b - rho(b)) cos(beta) = {lhs:.17g} is excluded "
                    f"(p(b) = {p_b:g}, b - rho(b) = {nu_b:g}); {_REMEDY}",
                    {"p_b": p_b, "nu_b": nu_b, "beta": bc.beta}))
    else:
        if sa_scattered and b_scattered:
            R = bc.matrix
            lhs = p_b * R[0, 1]
            rhs = nu_b * R[1, 1]
            if _close(lhs, rhs):
                report.violations.append(BCViolation(
                    "coupled: sigma(a) and rho(b) right scattered",
                    f"p(b) R12 = (b - rho(b)) R22 = {lhs:.17g} is excluded "
                    f"(p(b) = {p_b:g}, b - rho(b) = {nu_b:g}); {_REMEDY}",
                    {"p_b": p_b, "nu_b": nu_b, "R12": R[0, 1], "R22": R[1, 1]}))
    return report


def _end_states(f):
    ts = f.ts
    ua, da = f.state(ts.sigma_a())
    ub, db = f.state(ts.b)
    return ua[0], da[0], ub[0], db[0]


def bc_residual(f, bc: BoundaryCondition, side: str = "left"):
    """Residual of ``f`` in the boundary condition at ``side`` (left, right or coupled)."""
    ua, da, ub, db = _end_states(f)
    if side == "left":
        return ua * math.cos(bc.alpha) - da * math.sin(bc.alpha)
    if side == "right":
        return ub * math.cos(bc.beta) - db * math.sin(bc.beta)
    if side == "coupled":
        return np.array([ub, db]) - np.exp(1j * bc.phi) * (bc.matrix @ np.array([ua, da]))
    raise ValueError(f"side must be left, right or coupled, not {side!r}")


# --- the differential expression ------------------------------------------

@dataclass(frozen=True)
class GridFunction:
    """Values of a function at sample locations."""

    x: np.ndarray
    values: np.ndarray

    def __iter__(self):
        return iter((self.x, self.values))


def evaluation_points(ts: TimeScale, n: int = 64):
    """Atoms of ``sigma_kappa`` followed by ``n`` interior Chebyshev points per interval."""
    atoms = np.array([t for t, _ in ts.atoms("sigma_kappa")])
    cont = [chebyshev_samples(lo, hi, n)[1:-1] for lo, hi in ts.intervals()]
    return np.sort(np.concatenate([atoms, *cont])) if cont or atoms.size else np.empty(0)


class _ChebyshevDerivative:
    """Differentiates ``func`` on interval components by Chebyshev interpolation."""

    def __init__(self, func, ts, tol=1e-13, max_deg=1024):
        self.func = func
        self.ts = ts
        self.tol = tol
        self.max_deg = max_deg
        self._cache = {}

    def _fit(self, lo, hi):
        key = (lo, hi)
        if key in self._cache:
            return self._cache[key]
        deg = 16
        while True:
            cheb = np.polynomial.Chebyshev.interpolate(self.func, deg, domain=[lo, hi])
            c = np.abs(cheb.coef)
            if c[-4:].max() <= self.tol * max(c.max(), 1e-300) or 2 * deg > self.max_deg:
                break
            deg *= 2
        # drop the noise tail so differentiation does not amplify it
        keep = np.nonzero(c > 10 * self.tol * c.max())[0]
        cut = keep[-1] + 1 if keep.size else 1
        fit = np.polynomial.Chebyshev(cheb.coef[:cut], domain=[lo, hi]).deriv()
        self._cache[key] = fit
        return fit

    def slope(self, x):
        x = np.atleast_1d(np.asarray(x, float))
        out = np.zeros(x.shape, complex)
        idx = self.ts.locate(x)
        for i in np.unique(idx):
            lo, hi = self.ts.components[i]
            sel = idx == i
            out[sel] = self._fit(lo, hi)(x[sel])
        return out


def ell_of(f, ts: TimeScale, cs: CoefficientSet, method: str = "auto"):
    """Callable ``x -> (ell f)(x)`` on ``T_kappa`` (atoms and interval points).

    ``method``: ``"trajectory"`` uses the solution's own ``(p u^nabla)^Delta``
    data, ``"spectral"`` differentiates the quasi-derivative by Chebyshev
    interpolation, ``"auto"`` prefers the former when available.
    """
    if method == "auto":
        method = "trajectory" if hasattr(f, "quasi_slope") else "spectral"
    if method not in ("trajectory", "spectral"):
        raise ValueError(f"unknown method {method!r}")
    cheb = _ChebyshevDerivative(f.quasi, ts) if method == "spectral" else None

    def ell(x):
        x = np.atleast_1d(np.asarray(x, float))
        r = cs.evaluate("r", x, ts)
        if np.any(r == 0):
            raise ZeroDivisionError(f"r = 0 at t = {x[r == 0][0]!r}")
        q = cs.evaluate("q", x, ts)
        u, d = f.state(x)
        mu = ts.mu(x)
        on_interval = np.array([ts.components[i][1] > ts.components[i][0] and mu_i == 0
                                for i, mu_i in zip(ts.locate(x), mu)], dtype=bool)
        slope = np.zeros(x.shape, complex)
        atom = ~on_interval
        if np.any(atom):
            if np.any(mu[atom] == 0):
                raise ValueError("ell is only defined on T_kappa (b has no successor)")
            _, d_next = f.state(ts.sigma(x[atom]))
            slope[atom] = (d_next - d[atom]) / mu[atom]
        if np.any(on_interval):
            slope[on_interval] = (cheb.slope(x[on_interval]) if cheb is not None
                                  else f.quasi_slope(x[on_interval]))
        out = (-slope + q * u) / r
        return out.real if not np.any(out.imag) else out

    return ell


def apply_ell(f, cs: CoefficientSet, ts: TimeScale, x=None, method: str = "auto") -> GridFunction:
    """``ell f`` at ``x`` (default: every atom plus 64 Chebyshev points per interval)."""
    x = evaluation_points(ts) if x is None else np.atleast_1d(np.asarray(x, float))
    return GridFunction(x, ell_of(f, ts, cs, method)(x))


def apply_tau(u, cs: CoefficientSet, ts: TimeScale, x=None) -> GridFunction:
    """Measure-coefficient expression ``-d/d(varrho) d/d(varsigma) uhat + (q/r) uhat``.

    ``uhat`` is the affine-on-gaps extension of ``u``; the Radon-Nikodym
    derivatives are taken with the measures of :class:`MeasureTriple`: jump
    quotients at atoms, Chebyshev differentiation on interval components.
    ``u`` needs ``value`` and (on intervals) ``derivative``.
    """
    x = evaluation_points(ts) if x is None else np.atleast_1d(np.asarray(x, float))
    mt = MeasureTriple(ts, cs)
    slope_of = getattr(u, "derivative", None)

    def flux(y):
        y = np.atleast_1d(np.asarray(y, float))
        return extend_hat_slope(u, ts, y, derivative=slope_of) / mt.density("varsigma", y)

    uh = extend_hat(u, ts, x)
    mu = ts.mu(x)
    atom = mu > 0
    out = np.zeros(x.shape, complex)
    if np.any(atom):
        xa = x[atom]
        rho_mass = np.array([mt.atom_mass("varrho", t) for t in xa])
        chi_mass = np.array([mt.atom_mass("chi", t) for t in xa])
        if np.any(rho_mass == 0):
            raise ValueError("tau is evaluated at atoms of sigma_kappa only (or interval points)")
        jump = flux(xa + 0.5 * mu[atom]) - flux(xa)
        out[atom] = -jump / rho_mass + chi_mass / rho_mass * uh[atom]
    dense = ~atom
    if np.any(dense):
        xd = x[dense]
        if np.any(ts.locate(xd) < 0):
            raise ValueError("tau is evaluated on the time scale only")
        cheb = _ChebyshevDerivative(flux, ts)
        rho_d = mt.density("varrho", xd)
        out[dense] = -cheb.slope(xd) / rho_d + mt.density("chi", xd) / rho_d * uh[dense]
    return GridFunction(x, out.real if not np.any(out.imag) else out)


# --- inner products ---------------------------------------------------------

def _fn(f):
    if hasattr(f, "value"):
        return f.value
    return f


def _breakpoints(*objs):
    nodes = [o.mesh_nodes() for o in objs if hasattr(o, "mesh_nodes")]
    return np.unique(np.concatenate(nodes)) if nodes else None


def inner_product(f, g, ts: TimeScale, cs: CoefficientSet, rtol=1e-12, atol=1e-14):
    """``<f, g> = int f conj(g) r d(sigma_kappa)`` over ``T_kappa``."""
    ff, gf = _fn(f), _fn(g)
    return integrate(ts, lambda x: ff(x) * np.conj(gf(x)), weight=lambda x: cs.evaluate("r", x, ts),
                     rtol=rtol, atol=atol, breakpoints=_breakpoints(f, g))


def norm(f, ts: TimeScale, cs: CoefficientSet) -> float:
    return float(math.sqrt(abs(inner_product(f, f, ts, cs))))


def symmetry_defect(f, g, bc: BoundaryCondition, cs: CoefficientSet, ts: TimeScale,
                    tol: float = RESIDUAL_TOL, method: str = "auto") -> float:
    """``|<ell f, g> - <f, ell g>|`` for ``f, g`` satisfying ``bc``."""
    sides = ("left", "right") if bc.kind == "separated" else ("coupled",)
    for name, h in (("f", f), ("g", g)):
        scale = 1.0 + float(np.max(np.abs(np.concatenate([np.atleast_1d(s) for s in _end_states(h)]))))
        for side in sides:
            res = np.max(np.abs(bc_residual(h, bc, side)))
            if res > tol * scale:
                raise ValueError(f"{name} violates the {side} boundary condition (residual {res:.3g})")
    lf, lg = ell_of(f, ts, cs, method), ell_of(g, ts, cs, method)
    ff, gf = _fn(f), _fn(g)

    def integrand(x):
        return lf(x) * np.conj(gf(x)) - ff(x) * np.conj(lg(x))

    val = integrate(ts, integrand, weight=lambda x: cs.evaluate("r", x, ts),
                    rtol=1e-12, atol=1e-14, breakpoints=_breakpoints(f, g))
    return float(abs(val))


def lagrange_boundary_term(f, g):
    """``W(f, conj g)(b) - W(f, conj g)(sigma(a))``."""
    ua, da, ub, db = _end_states(f)
    va, ea, vb, eb = (np.conj(v) for v in _end_states(g))
    return (ub * eb - db * vb) - (ua * ea - da * va)
