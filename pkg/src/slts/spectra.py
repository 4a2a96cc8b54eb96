"""Eigenvalues, Green kernel, m-function, eigenfunction transform and Weyl disks."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .coefficients import CoefficientSet, geometric_length
from .ivp import DEFAULT_TOL, LinearCombination, Propagator, Trajectory
from .operators import BoundaryCondition, inner_product, validate_bc
from .quadrature import gauss_kronrod, gauss_legendre_many
from .timescale import TimeScale

__all__ = [
    "SpectralResult",
    "MSample",
    "GreenKernel",
    "ResolventImage",
    "AsymptoticReport",
    "WeylDisk",
    "SpectralError",
    "ResolventPoleError",
    "BracketBudgetError",
    "characteristic_function",
    "find_eigenvalues",
    "spectrum",
    "eigenpair",
    "eigenspace",
    "green_kernel",
    "green",
    "resolvent_apply",
    "m_function",
    "spectral_transform",
    "asymptotic_ratio",
    "weyl_disk",
    "classify_weyl",
]

SCAN_POINTS = 256
REFINE_FACTOR = 4
REFINE_DEPTH = 4
ROOT_RTOL = 1e-12
POLE_GUARD = 1e-10
EVAL_BUDGET = 50_000
TRANSFER_WARN = 1e8


class SpectralError(ArithmeticError):
    pass


class ResolventPoleError(SpectralError):
    """``z`` is (numerically) an eigenvalue, so the resolvent does not exist there."""


class BracketBudgetError(SpectralError):
    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


@dataclass
class SpectralResult:
    eigenvalues: np.ndarray
    bc: BoundaryCondition
    eigenfunctions: list = field(default_factory=list)
    norming_constants: np.ndarray = field(default_factory=lambda: np.empty(0))
    multiplicities: list = field(default_factory=list)
    tolerance: dict = field(default_factory=dict)
    ts: TimeScale | None = None
    cs: CoefficientSet | None = None

    def __len__(self):
        return len(self.eigenvalues)

    def to_json(self) -> dict:
        out = {"eigenvalues": [float(e) for e in self.eigenvalues]}
        if len(self.norming_constants):
            out["norming_constants"] = [float(g) for g in self.norming_constants]
        if self.multiplicities and any(m != 1 for m in self.multiplicities):
            out["multiplicities"] = list(self.multiplicities)
        return out


@dataclass(frozen=True)
class MSample:
    z: complex
    m: complex


# --- characteristic function -------------------------------------------------

def _require_valid(ts, cs, bc):
    report = validate_bc(ts, cs, bc)
    if not report.valid:
        raise ValueError(str(report))


def _left_state(bc: BoundaryCondition):
    return math.sin(bc.alpha), math.cos(bc.alpha)


def _char(prop: Propagator, lam, bc: BoundaryCondition):
    ts = prop.ts
    M = prop.transfer(lam, ts.sigma_a(), ts.b)[:2, :2]
    if bc.kind == "separated":
        s, c = _left_state(bc)
        u, d = M @ np.array([s, c])
        return u * math.cos(bc.beta) - d * math.sin(bc.beta), M
    A = M - np.exp(1j * bc.phi) * bc.matrix if bc.phi else M - bc.matrix
    return A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0], M


def characteristic_function(lam, ts: TimeScale, cs: CoefficientSet, bc: BoundaryCondition,
                            tol=DEFAULT_TOL, propagator: Propagator | None = None):
    """``D(lam)``; zero exactly at the eigenvalues of the boundary value problem."""
    prop = propagator or Propagator(ts, cs, tol=tol)
    return _char(prop, lam, bc)[0]


def _complex_step(f, x, h):
    return f(complex(x, h)).imag / h


# --- eigenvalue search ----------------------------------------------------------

def find_eigenvalues(ts: TimeScale, cs: CoefficientSet, bc: BoundaryCondition, lam_range,
                     max_count: int | None = None, tol=DEFAULT_TOL,
                     scan_points: int = SCAN_POINTS) -> SpectralResult:
    """All real zeros of ``D`` in ``lam_range``, sorted and deduplicated.

    Sign changes on a uniform scan are bracketed and polished with Brent's
    method; cells where ``|D|`` has a local minimum without a sign change are
    rescanned ``x4`` (up to four times) to catch close pairs. Remaining
    sign-free minima are tested for double roots through ``D'`` (coupled
    conditions only; separated eigenvalues are simple).
    """
    lo, hi = map(float, lam_range)
    if not hi > lo:
        raise ValueError("lam_range must satisfy lo < hi")
    _require_valid(ts, cs, bc)
    if bc.kind == "coupled" and bc.phi != 0.0:
        raise ValueError("eigenvalue search with coupled conditions supports phi = 0 only; "
                         "evaluate characteristic_function at chosen points instead")
    prop = Propagator(ts, cs, tol=tol, zmax=max(abs(lo), abs(hi)))
    evals = 0
    big = [0.0]
    grid = np.linspace(lo, hi, scan_points)
    trace = {"grid": grid, "values": None}

    def D(lam):
        nonlocal evals
        evals += 1
        if evals > EVAL_BUDGET:
            raise BracketBudgetError(f"more than {EVAL_BUDGET} evaluations of D", trace)
        val, M = _char(prop, lam, bc)
        big[0] = max(big[0], float(np.abs(M).max()))
        return val.real if isinstance(lam, float) else val

    vals = np.array([D(float(x)) for x in grid])
    trace["values"] = vals
    roots = []
    suspects = []

    def scan(x, v, depth):
        for i in range(len(x) - 1):
            a, b, fa, fb = x[i], x[i + 1], v[i], v[i + 1]
            if fa == 0.0:
                roots.append(a)
            elif fa * fb < 0:
                roots.append(brentq(D, a, b, xtol=ROOT_RTOL * max(1.0, abs(a), abs(b)) * 1e-2,
                                    rtol=4 * np.finfo(float).eps, maxiter=200))
        if v[-1] == 0.0:
            roots.append(x[-1])
        mag = np.abs(v)
        for i in range(1, len(x) - 1):
            if mag[i] < mag[i - 1] and mag[i] <= mag[i + 1] and v[i - 1] * v[i + 1] > 0 and v[i] * v[i - 1] > 0:
                a, b = x[i - 1], x[i + 1]
                if depth < REFINE_DEPTH:
                    fine = np.linspace(a, b, 2 * REFINE_FACTOR + 1)
                    fv = np.array([v[i - 1]] + [D(float(t)) for t in fine[1:-1]] + [v[i + 1]])
                    scan(fine, fv, depth + 1)
                else:
                    suspects.append((a, b))

    scan(grid, vals, 0)
    if bc.kind == "coupled":
        for a, b in suspects:
            root = _double_root(D, a, b)
            if root is not None:
                roots.append(root)
    if big[0] > TRANSFER_WARN:
        warnings.warn(f"transfer matrix norm reached {big[0]:.3g}; shooting may be ill conditioned",
                      stacklevel=2)
    roots = np.array(sorted(roots))
    if roots.size:
        keep = np.concatenate([[True], np.diff(roots) > 1e-10 * np.maximum(1.0, np.abs(roots[1:]))])
        roots = roots[keep]
    if max_count is not None:
        roots = roots[:max_count]
    mult = [_multiplicity(prop, lam, bc) for lam in roots] if bc.kind == "coupled" else [1] * len(roots)
    return SpectralResult(eigenvalues=roots, bc=bc, multiplicities=mult,
                          tolerance={"rel": prop.rtol, "abs": prop.atol, "root_rtol": ROOT_RTOL,
                                     "evaluations": evals},
                          ts=ts, cs=cs)


def _double_root(D, a, b):
    """A root of ``D'`` in ``[a, b]`` at which ``D`` itself vanishes (to noise)."""
    h = 1e-20 * max(1.0, abs(a), abs(b))

    def dD(x):
        return _complex_step(D, x, h)

    da, db = dD(a), dD(b)
    if da * db > 0:
        return None
    x = brentq(dD, a, b, xtol=ROOT_RTOL * max(1.0, abs(a)) * 1e-2, rtol=4 * np.finfo(float).eps)
    curvature = abs(dD(b) - dD(a)) / (b - a)
    # a genuine double root: |D(x)| is at the level of its own evaluation noise
    if abs(D(x)) <= max(1e-9, 1e-7 * curvature * (b - a) ** 2):
        return x
    return None


def _multiplicity(prop, lam, bc):
    M = prop.transfer(lam, prop.ts.sigma_a(), prop.ts.b)[:2, :2]
    s = np.linalg.svd(M - bc.matrix, compute_uv=False)
    return int(np.sum(s <= 1e-6 * max(1.0, np.abs(M).max())))


# --- eigenfunctions ----------------------------------------------------------

def _check_root(prop, lam, bc, tol=1e-8):
    h = 1e-20 * max(1.0, abs(lam))
    val = _char(prop, lam, bc)[0]
    slope = _complex_step(lambda z: _char(prop, z, bc)[0], lam, h)
    if slope == 0 or abs(val / slope) > tol * max(1.0, abs(lam)):
        if abs(val) > 1e-12:
            raise SpectralError(f"lambda = {lam!r} is not an eigenvalue within tolerance (D = {val:.3g})")


def eigenpair(lam: float, ts: TimeScale, cs: CoefficientSet, bc: BoundaryCondition, tol=DEFAULT_TOL,
              propagator: Propagator | None = None):
    """Unit-norm eigenfunction at ``lam`` and the norming constant ``1 / ||phi_lam||^2``."""
    if bc.kind != "separated":
        raise ValueError("eigenpair needs separated conditions; use eigenspace for coupled ones")
    prop = propagator or Propagator(ts, cs, tol=tol)
    lam = float(lam)
    _check_root(prop, lam, bc)
    s, c = _left_state(bc)
    phi = prop.solve(lam, ts.sigma_a(), [(s, c)])[0]
    nrm2 = float(inner_product(phi, phi, ts, cs).real)
    k = 1.0 / math.sqrt(nrm2)
    unit = prop.solve(lam, ts.sigma_a(), [(s * k, c * k)])[0]
    return unit, 1.0 / nrm2


def eigenspace(lam: float, ts: TimeScale, cs: CoefficientSet, bc: BoundaryCondition, tol=DEFAULT_TOL):
    """Orthonormal eigenfunctions at ``lam`` (any condition type)."""
    prop = Propagator(ts, cs, tol=tol)
    if bc.kind == "separated":
        return [eigenpair(lam, ts, cs, bc, propagator=prop)[0]]
    M = prop.transfer(lam, ts.sigma_a(), ts.b)[:2, :2]
    A = M - np.exp(1j * bc.phi) * bc.matrix
    _, s, vh = np.linalg.svd(A)
    k = max(1, int(np.sum(s <= 1e-6 * max(1.0, np.abs(M).max()))))
    basis = vh[-k:].conj()
    if not np.iscomplexobj(A) or not np.any(basis.imag):
        basis = basis.real
    trajs = prop.solve(lam, ts.sigma_a(), [tuple(v) for v in basis])
    out = []
    for f in trajs:  # Gram-Schmidt in L^2(r dsigma_kappa)
        coeffs, parts = [1.0], [f]
        for e in out:
            coeffs.append(-inner_product(f, e, ts, cs))
            parts.append(e)
        g = LinearCombination(coeffs, parts)
        n = math.sqrt(abs(inner_product(g, g, ts, cs)))
        out.append(LinearCombination([1.0 / n], [g]))
    return out


def spectrum(ts: TimeScale, cs: CoefficientSet, bc: BoundaryCondition, lam_range,
             max_count: int | None = None, tol=DEFAULT_TOL) -> SpectralResult:
    """Eigenvalues with unit eigenfunctions and norming constants (separated conditions)."""
    sr = find_eigenvalues(ts, cs, bc, lam_range, max_count=max_count, tol=tol)
    prop = Propagator(ts, cs, tol=tol)
    pairs = [eigenpair(lam, ts, cs, bc, propagator=prop) for lam in sr.eigenvalues]
    sr.eigenfunctions = [p[0] for p in pairs]
    sr.norming_constants = np.array([p[1] for p in pairs])
    return sr


# --- Green kernel and resolvent ---------------------------------------------

@dataclass
class GreenKernel:
    """``G(x, y) = u_a(min) u_b(max) / W(u_b, u_a)``."""

    z: complex
    u_a: Trajectory
    u_b: Trajectory
    w: complex

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        lo, hi = np.minimum(x, y), np.maximum(x, y)
        shape = lo.shape
        out = self.u_a.value(lo.ravel()) * self.u_b.value(hi.ravel()) / self.w
        return out.reshape(shape)


def green(z, ts: TimeScale, cs: CoefficientSet, bc: BoundaryCondition, tol=DEFAULT_TOL) -> GreenKernel:
    if bc.kind != "separated":
        raise ValueError("the Green kernel is implemented for separated conditions")
    _require_valid(ts, cs, bc)
    prop = Propagator(ts, cs, tol=tol)
    s, c = _left_state(bc)
    u_a = prop.solve(z, ts.sigma_a(), [(s, c)])[0]
    u_b = prop.solve(z, ts.b, [(math.sin(bc.beta), math.cos(bc.beta))])[0]
    ua, da = (v[0] for v in u_a.state(ts.b))
    w = math.sin(bc.beta) * da - math.cos(bc.beta) * ua
    if abs(w) < POLE_GUARD * (abs(ua) + abs(da)):
        raise ResolventPoleError(f"resolvent pole: z = {z!r} is numerically an eigenvalue (|W| = {abs(w):.3g})")
    return GreenKernel(z, u_a, u_b, w)


def green_kernel(z, x, y, ts: TimeScale, cs: CoefficientSet, bc: BoundaryCondition, tol=DEFAULT_TOL):
    val = green(z, ts, cs, bc, tol)(x, y)
    return val if np.ndim(val) else complex(val)


def _as_callable(f):
    if hasattr(f, "value"):
        return f.value
    if callable(f):
        return f
    raise TypeError("f must be a vectorized callable or have a value() method")


class ResolventImage:
    """``v = R_z f`` with its quasi-derivative, from cumulative kernel integrals."""

    def __init__(self, kernel: GreenKernel, f, ts: TimeScale, cs: CoefficientSet, rtol=1e-12, atol=1e-14):
        self.kernel = kernel
        self.z = kernel.z
        self.ts, self.cs = ts, cs
        self.f = _as_callable(f)
        ua, ub = kernel.u_a, kernel.u_b
        r = lambda x: cs.evaluate("r", x, ts)
        self._ga = lambda x: ua.value(x) * self.f(x) * r(x)
        self._gb = lambda x: ub.value(x) * self.f(x) * r(x)
        self._atoms = np.array([t for t, _ in ts.atoms("sigma_kappa")])
        masses = np.array([m for _, m in ts.atoms("sigma_kappa")])
        if self._atoms.size:
            self._atom_a = masses * self._ga(self._atoms)
            self._atom_b = masses * self._gb(self._atoms)
        else:
            self._atom_a = self._atom_b = np.empty(0)
        nodes = np.unique(np.concatenate([ua.mesh_nodes(), ub.mesh_nodes()]))
        self._panels = []
        for lo, hi in ts.intervals():
            bp = nodes[(nodes > lo) & (nodes < hi)]
            _, ea = gauss_kronrod(self._ga, lo, hi, rtol=rtol, atol=atol, breakpoints=bp)
            _, eb = gauss_kronrod(self._gb, lo, hi, rtol=rtol, atol=atol, breakpoints=bp)
            edges = np.unique(np.concatenate([ea, eb]))
            ca = np.concatenate([[0], np.cumsum(gauss_legendre_many(self._ga, edges[:-1], edges[1:]))])
            cb = np.concatenate([[0], np.cumsum(gauss_legendre_many(self._gb, edges[:-1], edges[1:]))])
            self._panels.append((lo, hi, edges, ca, cb))
        self._total_b = np.sum(self._atom_b) + sum(p[4][-1] for p in self._panels)

    def _below(self, x):
        """``int_{y < x} u_a f r`` and ``int_{y < x} u_b f r`` (``d sigma_kappa``)."""
        A = np.zeros(x.shape, complex)
        B = np.zeros(x.shape, complex)
        if self._atoms.size:
            mask = self._atoms[None, :] < x[:, None]
            A += mask @ self._atom_a
            B += mask @ self._atom_b
        for lo, hi, edges, ca, cb in self._panels:
            full = x >= hi
            A[full] += ca[-1]
            B[full] += cb[-1]
            part = (x > lo) & (x < hi)
            if np.any(part):
                xp = x[part]
                j = np.searchsorted(edges, xp, side="right") - 1
                A[part] += ca[j] + gauss_legendre_many(self._ga, edges[j], xp)
                B[part] += cb[j] + gauss_legendre_many(self._gb, edges[j], xp)
        return A, B

    def state(self, x):
        x = np.atleast_1d(np.asarray(x, float))
        A, Bb = self._below(x)
        B = self._total_b - Bb
        k = self.kernel
        ua, da = k.u_a.state(x)
        ub, db = k.u_b.state(x)
        v = (ub * A + ua * B) / k.w
        d = (db * A + da * B) / k.w
        return v, d

    def value(self, x):
        return self.state(x)[0]

    def quasi(self, x):
        return self.state(x)[1]

    def __call__(self, x):
        return self.value(x)

    def quasi_slope(self, x):
        x = np.atleast_1d(np.asarray(x, float))
        v = self.value(x)
        return ((self.cs.evaluate("q", x, self.ts) - self.z * self.cs.evaluate("r", x, self.ts)) * v
                - self.cs.evaluate("r", x, self.ts) * self.f(x))

    def mesh_nodes(self):
        return np.unique(np.concatenate([p[2] for p in self._panels])) if self._panels else np.empty(0)

    def samples(self):
        x = np.unique(np.concatenate([self.kernel.u_a.samples()[0], self.mesh_nodes()]))
        v, d = self.state(x)
        return x, v, d


def resolvent_apply(z, f, ts: TimeScale, cs: CoefficientSet, bc: BoundaryCondition, tol=DEFAULT_TOL):
    """``(R_z f)(x) = int G_z(x, y) f(y) r(y) d sigma_kappa(y)`` as an evaluable function."""
    return ResolventImage(green(z, ts, cs, bc, tol), f, ts, cs)


# --- m-function --------------------------------------------------------------

def m_function(z, ts: TimeScale, cs: CoefficientSet, bc: BoundaryCondition, tol=DEFAULT_TOL,
               propagator: Propagator | None = None) -> MSample:
    """``m(z)`` such that ``theta_z + m(z) phi_z`` satisfies the right condition."""
    if bc.kind != "separated":
        raise ValueError("the m-function is defined for separated conditions")
    prop = propagator or Propagator(ts, cs, tol=tol)
    M = prop.transfer(z, ts.sigma_a(), ts.b)[:2, :2]
    ca, sa = math.cos(bc.alpha), math.sin(bc.alpha)
    th = M @ np.array([ca, -sa])
    ph = M @ np.array([sa, ca])
    cb, sb = math.cos(bc.beta), math.sin(bc.beta)
    num = th[0] * cb - th[1] * sb
    den = ph[0] * cb - ph[1] * sb
    if abs(den) < POLE_GUARD * (abs(ph[0]) + abs(ph[1])):
        raise ResolventPoleError(f"m-function pole: z = {z!r} is numerically an eigenvalue")
    return MSample(complex(z), complex(-num / den))


# --- eigenfunction transform ---------------------------------------------------

def spectral_transform(f, sr: SpectralResult, direction: str = "forward"):
    """Forward: ``c_k = <f, phi_k>`` with the unnormalized ``phi_k``; inverse: ``sum c_k gamma_k phi_k``.

    With ``gamma_k`` the norming constants, ``||f||^2 = sum |c_k|^2 gamma_k``
    whenever ``f`` lies in the span of the eigenfunctions.
    """
    if not sr.eigenfunctions:
        raise ValueError("spectral result carries no eigenfunctions; use spectrum()")
    ts, cs = sr.ts, sr.cs
    root = np.sqrt(sr.norming_constants)
    if direction == "forward":
        c = np.array([inner_product(f, e, ts, cs) for e in sr.eigenfunctions]) / root
        return c.real if not np.any(c.imag) else c
    if direction == "inverse":
        c = np.asarray(f)
        if c.shape != root.shape:
            raise ValueError(f"expected {root.size} coefficients, got {c.shape}")
        return LinearCombination(list(c * root), sr.eigenfunctions)
    raise ValueError(f"direction must be 'forward' or 'inverse', not {direction!r}")


# --- asymptotics ---------------------------------------------------------------

@dataclass
class AsymptoticReport:
    applicable: bool
    rows: list  # (n, E_n / n^2, pi^2 / L^2)
    limit: float | None
    relative_gap: float | None
    message: str = ""

    def to_json(self) -> dict:
        return {"applicable": self.applicable, "limit": self.limit, "relative_gap": self.relative_gap,
                "ratios": [[n, r, lim] for n, r, lim in self.rows], "message": self.message}


def asymptotic_ratio(sr: SpectralResult, L: float | None = None) -> AsymptoticReport:
    """Ratios ``E_n / n^2`` (``n >= 1``, zero-based index) against ``pi^2 / L^2``."""
    if L is None:
        L = geometric_length(sr.cs, sr.ts)
    if L <= 0:
        return AsymptoticReport(False, [], None, None,
                                "asymptotics not captured: the scale has no interval part (L = 0)")
    E = np.asarray(sr.eigenvalues, float)
    if E.size < 5:
        raise ValueError("asymptotic_ratio needs at least 5 eigenvalues")
    limit = math.pi ** 2 / L ** 2
    rows = [(n, float(E[n] / n ** 2), limit) for n in range(1, E.size)]
    gap = abs(rows[-1][1] - limit) / limit
    return AsymptoticReport(True, rows, limit, gap)


# --- Weyl disks ----------------------------------------------------------------

@dataclass(frozen=True)
class WeylDisk:
    b: float
    center: complex
    radius: float


def _nested(seq):
    for s, t in zip(seq, seq[1:]):
        if s.a != t.a or not t.b > s.b:
            return False
        for lo, hi in s.components[:-1]:
            if (lo, hi) not in t.components:
                return False
        lo, hi = s.components[-1]
        i = int(t.locate(lo))
        if i < 0 or t.components[i][0] != lo or not t.components[i][1] >= hi:
            return False
    return True


def _fit_circle(w):
    x, y = w.real, w.imag
    A = np.column_stack([x, y, np.ones_like(x)])
    sol, *_ = np.linalg.lstsq(A, -(x ** 2 + y ** 2), rcond=None)
    cx, cy = -sol[0] / 2, -sol[1] / 2
    return complex(cx, cy), float(math.sqrt(max(cx * cx + cy * cy - sol[2], 0.0)))


def weyl_disk(z, ts_sequence, cs: CoefficientSet, alpha: float = 0.0, n_angles: int = 64,
              tol=DEFAULT_TOL) -> list[WeylDisk]:
    """Disks of ``m``-values over all right angles, one per truncation (heuristic)."""
    z = complex(z)
    if not z.imag > 0:
        raise ValueError("weyl_disk needs Im z > 0")
    seq = list(ts_sequence)
    if not seq or not _nested(seq):
        raise ValueError("truncations must share the left portion and increase in b")
    betas = np.arange(n_angles) * math.pi / n_angles
    ca, sa = math.cos(alpha), math.sin(alpha)
    out = []
    for ts in seq:
        M = Propagator(ts, cs, tol=tol).transfer(z, ts.sigma_a(), ts.b)[:2, :2]
        th = M @ np.array([ca, -sa])
        ph = M @ np.array([sa, ca])
        m = -(th[0] * np.cos(betas) - th[1] * np.sin(betas)) / (ph[0] * np.cos(betas) - ph[1] * np.sin(betas))
        center, radius = _fit_circle(m)
        out.append(WeylDisk(ts.b, center, radius))
    return out


def classify_weyl(disks: list[WeylDisk]) -> str:
    """Heuristic limit-point / limit-circle reading of a radius sequence.

    Fits ``radius ~ r_inf + C / b`` by least squares and calls the endpoint
    limit circle when the extrapolated ``r_inf`` keeps a substantial share of
    the last radius. This is a reading of finitely many truncations, not a proof.
    """
    r = np.array([d.radius for d in disks])
    b = np.array([d.b for d in disks])
    if r.size < 3:
        return "undetermined (heuristic): need at least three truncations"
    if np.any(np.diff(r) > 1e-9 * r[:-1]):
        return "undetermined (heuristic): radii are not decreasing"
    A = np.column_stack([np.ones_like(b), 1.0 / b])
    (r_inf, _), *_ = np.linalg.lstsq(A, r, rcond=None)
    if r_inf > 0.5 * r[-1]:
        return f"limit circle (heuristic): radii approach about {r_inf:.6g}"
    return "limit point (heuristic): radii shrink toward zero"
