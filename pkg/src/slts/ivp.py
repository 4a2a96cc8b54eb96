"""Initial value problems ``(ell - z) u = g`` on a time scale.

The first-order system for the state ``(u, u^[1])`` is

    u' = u^[1] / p,      (u^[1])' = (q - z r) u - r g

on interval components, and the exact recurrence

    d' = d + mu * ((q(t) - z r(t)) u - r(t) g(t)),   u' = u + mu * d' / p(sigma(t))

across a right-scattered point ``t``. Because the system is linear, every
Dormand-Prince 5(4) step is a fixed matrix; the adaptive mesh for a segment is
chosen once (from the embedded error estimate of those step matrices) and
reused for every spectral parameter of comparable magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .coefficients import CoefficientSet, _call
from .timescale import TimeScale

__all__ = [
    "StatePair",
    "Trajectory",
    "TransferMatrix",
    "IntegrationError",
    "DEFAULT_TOL",
    "step_scattered",
    "step_continuous",
    "solve_ivp",
    "fundamental_system",
    "transfer_matrix",
    "wronskian",
    "wronskian_variation",
    "Propagator",
    "LinearCombination",
]

DEFAULT_TOL = (1e-10, 1e-12)  # (rel, abs)

# Dormand-Prince 5(4)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B - _B4

_MAX_REFINE = 80
_MAX_PANELS = 2_000_000


class IntegrationError(ArithmeticError):
    """Step-size underflow or an invalid coefficient inside a segment."""


@dataclass(frozen=True)
class StatePair:
    """Solution value ``u`` and first quasi-derivative ``d = p u^nabla``."""

    u: complex
    d: complex

    def as_array(self):
        return np.array([self.u, self.d])


# --- step matrices ---------------------------------------------------------

def _apply_A(P, Cz, RG, M):
    """``A @ M`` for the sparse system matrix ``[[0, P, 0], [Cz, 0, RG], [0, 0, 0]]``."""
    out = np.zeros_like(M)
    out[:, 0, :] = P[:, None] * M[:, 1, :]
    out[:, 1, :] = Cz[:, None] * M[:, 0, :]
    if M.shape[1] == 3:
        out[:, 1, :] += RG[:, None] * M[:, 2, :]
    return out


def _rk_matrices(h, P, Q, R, RG, z, dim, with_error=False):
    """Step matrices (and optionally embedded error matrices) for many panels.

    ``P, Q, R, RG`` have shape ``(N, 7)``: ``1/p``, ``q``, ``r`` and ``-r g`` at
    the Dormand-Prince stage nodes of each panel.
    """
    n = h.shape[0]
    dtype = np.result_type(P, Q, R, RG, np.asarray(z), float)
    eye = np.broadcast_to(np.eye(dim, dtype=dtype), (n, dim, dim))
    hh = h[:, None, None]
    stages = 7 if with_error else 6
    K = []
    for i in range(stages):
        M = eye.copy()
        for j, a in enumerate(_A[i]):
            if a:
                M = M + (hh * a) * K[j]
        K.append(_apply_A(P[:, i], Q[:, i] - z * R[:, i], RG[:, i], M))
    phi = eye.copy()
    for i in range(6):
        if _B[i]:
            phi = phi + (hh * _B[i]) * K[i]
    if not with_error:
        return phi
    err = np.zeros_like(phi)
    for i in range(7):
        if _E[i]:
            err = err + (hh * _E[i]) * K[i]
    return phi, err


def _unimodular(M):
    """Rescale each homogeneous 2x2 block to determinant one (the exact flow's)."""
    det = M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]
    root = np.sqrt(det.astype(complex)) if np.iscomplexobj(M) else np.sqrt(det)
    M[:, :2, :2] /= root[:, None, None]
    return M


def _tree_product(M):
    """``M[-1] @ ... @ M[0]`` by pairwise reduction."""
    while M.shape[0] > 1:
        if M.shape[0] % 2:
            M = np.concatenate([M, np.eye(M.shape[1], dtype=M.dtype)[None]], axis=0)
        M = M[1::2] @ M[0::2]
    return M[0]


def _prefix_products(M):
    """``[I, M0, M1 M0, ..., M_{N-1}...M0]`` via a doubling scan."""
    X = M.copy()
    off = 1
    n = X.shape[0]
    while off < n:
        X[off:] = X[off:] @ X[:-off]
        off *= 2
    eye = np.eye(M.shape[1], dtype=M.dtype)[None]
    return np.concatenate([eye, X], axis=0)


def _inverse(M):
    """Inverse of a unimodular 2x2 (or affine 3x3 extension of one)."""
    M = np.asarray(M)
    inv = np.zeros_like(M)
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    inv[0, 0], inv[0, 1] = M[1, 1] / det, -M[0, 1] / det
    inv[1, 0], inv[1, 1] = -M[1, 0] / det, M[0, 0] / det
    if M.shape[0] == 3:
        inv[:2, 2] = -inv[:2, :2] @ M[:2, 2]
        inv[2, 2] = 1.0
    return inv


# --- segment meshes --------------------------------------------------------

def _bucket(zmax: float) -> float:
    return float(2.0 ** math.ceil(math.log2(max(1.0, abs(zmax)))))


def _stage_values(f, nodes):
    return np.real_if_close(_call(f, nodes.ravel()).reshape(nodes.shape))


@dataclass(frozen=True)
class _Mesh:
    edges: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    RG: np.ndarray

    @property
    def h(self):
        return np.diff(self.edges)


def _coeff_arrays(fr, fp, fq, fg, nodes):
    p = _stage_values(fp, nodes)
    if np.any(p == 0) or not np.all(np.isfinite(p)):
        bad = nodes[(p == 0) | ~np.isfinite(p)][0]
        raise IntegrationError(f"p vanishes or is not finite at t = {bad!r} inside a segment")
    R = _stage_values(fr, nodes)
    Q = _stage_values(fq, nodes)
    RG = -R * _stage_values(fg, nodes) if fg is not None else np.zeros(nodes.shape)
    return 1.0 / p, Q, R, RG


@lru_cache(maxsize=512)
def _build_mesh(fr, fp, fq, fg, lo, hi, bucket, rtol, atol) -> _Mesh:
    """Adaptive panel partition of ``[lo, hi]`` for ``|z| <= bucket``.

    Panels are split until the Dormand-Prince embedded error of their step
    matrix, measured in variables balanced between ``u`` and ``u^[1]``, is
    below ``atol + rtol * |step|`` for ``z`` in ``{bucket, -bucket, i*bucket}``.
    """
    length = hi - lo
    dim = 3 if fg is not None else 2
    z_refs = (bucket, -bucket, 1j * bucket)
    edges = np.linspace(lo, hi, 9)
    for _ in range(_MAX_REFINE):
        h = np.diff(edges)
        nodes = edges[:-1, None] + _C[None, :] * h[:, None]
        P, Q, R, RG = _coeff_arrays(fr, fp, fq, fg, nodes)
        absp = 1.0 / np.abs(P)
        bad = np.zeros(h.shape, bool)
        split = np.ones(h.shape)
        for z in z_refs:
            cz = np.abs(Q - z * R)
            omega = np.sqrt(np.max(cz * np.abs(P), axis=1))
            s = np.maximum(np.sqrt(np.max(cz * absp, axis=1)), np.max(absp, axis=1) / length)
            phi, err = _rk_matrices(h, P, Q, R, RG, z, dim, with_error=True)
            # balance: scale the u^[1] row down and its column up by s
            scale = np.ones((h.size, dim))
            scale[:, 1] = s
            phi_b = phi * scale[:, None, :] / scale[:, :, None]
            err_b = err * scale[:, None, :] / scale[:, :, None]
            e = np.max(np.abs(err_b), axis=(1, 2)) / (atol + rtol * np.max(np.abs(phi_b), axis=(1, 2)))
            e = np.where(np.isfinite(e), e, np.inf)
            coarse = h * omega > 1.0
            need = (e > 1.0) | coarse
            k = np.ones(h.shape)
            with np.errstate(over="ignore", invalid="ignore"):
                k = np.maximum(k, np.ceil((e / 0.5) ** 0.2))
                k = np.where(coarse, np.maximum(k, np.ceil(h * omega)), k)
            k = np.where(np.isfinite(k), k, 64.0)
            bad |= need
            split = np.maximum(split, np.where(need, np.clip(k, 2, 64), 1))
        if not bad.any():
            return _Mesh(edges, P, Q, R, RG)
        if h[bad].min() < 1e-13 * max(1.0, length):
            where = edges[:-1][bad][0]
            raise IntegrationError(f"step size underflow near t = {where!r} on [{lo}, {hi}]")
        pieces = [edges[:-1][~bad, None]]
        kk = split[bad].astype(int)
        new = []
        for k in np.unique(kk):
            sel = kk == k
            frac = np.arange(k) / k
            new.append((edges[:-1][bad][sel, None] + h[bad][sel, None] * frac[None, :]).ravel())
        edges = np.unique(np.concatenate([pieces[0].ravel(), *new, [hi]]))
        if edges.size > _MAX_PANELS:
            raise IntegrationError(f"mesh on [{lo}, {hi}] exceeds {_MAX_PANELS} panels")
    raise IntegrationError(f"mesh refinement on [{lo}, {hi}] did not converge")


# --- pieces of the time scale ---------------------------------------------

@dataclass
class _Segment:
    lo: float
    hi: float
    component: int
    mesh: _Mesh
    fr: object
    fp: object
    fq: object
    fg: object

    def step_matrices(self, z, dim):
        m = self.mesh
        return _unimodular(_rk_matrices(m.h, m.P, m.Q, m.R, m.RG, z, dim))

    def dense_matrices(self, x, z, dim):
        """Partial-step matrices from the mesh node at or left of each ``x``."""
        e = self.mesh.edges
        j = np.clip(np.searchsorted(e, x, side="right") - 1, 0, e.size - 2)
        h = x - e[j]
        nodes = e[j][:, None] + _C[None, :] * h[:, None]
        P, Q, R, RG = _coeff_arrays(self.fr, self.fp, self.fq, self.fg, nodes)
        return j, _unimodular(_rk_matrices(h, P, Q, R, RG, z, dim))


def _scatter_matrix(mu, p_next, q, r, g, z, dim):
    c = q - z * r
    M = np.zeros((dim, dim), dtype=np.result_type(z, g, float))
    M[0, 0] = 1 + mu * mu * c / p_next
    M[0, 1] = mu / p_next
    M[1, 0] = mu * c
    M[1, 1] = 1.0
    if dim == 3:
        M[0, 2] = -mu * mu * r * g / p_next
        M[1, 2] = -mu * r * g
        M[2, 2] = 1.0
    return M


def _g_callable(g):
    if g is None:
        return None
    if hasattr(g, "value"):
        return g.value
    if isinstance(g, (int, float, complex)) and not isinstance(g, bool):
        val = g
        return lambda t: np.full(np.shape(t), val)
    if isinstance(g, str):
        from .expr import parse_coefficient

        return parse_coefficient(g)
    return g


class Propagator:
    """Transfer machinery for one problem ``(ts, cs, g)`` at a fixed tolerance.

    ``zmax`` fixes the mesh resolution for every ``z`` with ``|z| <= zmax``
    (so that, e.g., a characteristic function is one continuous function of
    the spectral parameter during a search). Without it the mesh follows
    ``|z|`` of each call.
    """

    def __init__(self, ts: TimeScale, cs: CoefficientSet, g=None, tol=DEFAULT_TOL, zmax=None):
        cs.check_layout(ts)
        self.ts = ts
        self.cs = cs
        self.g = _g_callable(g)
        self.rtol, self.atol = float(tol[0]), float(tol[1])
        self.zmax = zmax
        self.dim = 3 if self.g is not None else 2

    # pieces -------------------------------------------------------------

    def _segment(self, lo, hi, comp, z):
        bucket = _bucket(self.zmax if self.zmax is not None else abs(z))
        fr, fp, fq = (self.cs.piece(n, comp) for n in ("r", "p", "q"))
        mesh = _build_mesh(fr, fp, fq, self.g, float(lo), float(hi), bucket, self.rtol, self.atol)
        return _Segment(lo, hi, comp, mesh, fr, fp, fq, self.g)

    def _scatter(self, t, z):
        ts, cs = self.ts, self.cs
        s = float(ts.sigma(t))
        mu = s - t
        p_next = float(cs.evaluate("p", s, ts)[0])
        if p_next == 0:
            raise IntegrationError(f"p(sigma(t)) = 0 at sigma(t) = {s!r}")
        q = float(cs.evaluate("q", t, ts)[0])
        r = float(cs.evaluate("r", t, ts)[0])
        gv = complex(np.asarray(self.g(np.array([t])))[0]) if self.g is not None else 0.0
        if gv.imag == 0:
            gv = gv.real
        return _scatter_matrix(mu, p_next, q, r, gv, z, self.dim)

    def pieces(self, z, start=None, stop=None):
        """Elementary maps between ``start`` and ``stop`` (default ``a`` and ``b``).

        Yields ``("seg", _Segment)`` or ``("jump", t, matrix)`` in order.
        """
        ts = self.ts
        start = ts.a if start is None else start
        stop = ts.b if stop is None else stop
        out = []
        for i, (lo, hi) in enumerate(ts.components):
            if hi < start:
                continue
            if lo > stop:
                break
            a0, b0 = max(lo, start), min(hi, stop)
            if b0 > a0:
                out.append(("seg", self._segment(a0, b0, i, z)))
            if i < len(ts.components) - 1 and start <= hi < stop:
                out.append(("jump", hi, self._scatter(hi, z)))
        return out

    # transfers -------------------------------------------------------------

    def transfer(self, z, start=None, stop=None) -> np.ndarray:
        """Matrix mapping the state at ``start`` to the state at ``stop``."""
        dtype = np.result_type(z, float)
        total = np.eye(self.dim, dtype=dtype)
        for piece in self.pieces(z, start, stop):
            if piece[0] == "seg":
                M = _tree_product(piece[1].step_matrices(z, self.dim))
            else:
                M = piece[2]
            total = M @ total
        return total

    def solve(self, z, c, states) -> list["Trajectory"]:
        """Trajectories through the anchor ``c`` for each initial ``(u, d)`` in ``states``."""
        ts = self.ts
        if not ts.contains(c):
            raise ValueError(f"anchor c = {c!r} is not a point of the time scale")
        if ts.a_right_scattered() and c == ts.a:
            raise ValueError("anchor must lie in T_kappa (a is right scattered)")
        y0 = np.zeros((self.dim, len(states)), dtype=complex)
        for k, (d1, d2) in enumerate(states):
            y0[0, k], y0[1, k] = d1, d2
            if self.dim == 3:
                y0[2, k] = 1.0
        left = self.pieces(z, ts.a, c)
        right = self.pieces(z, c, ts.b)

        # state at a from the state at c
        dtype = np.result_type(z, float)
        to_c = np.eye(self.dim, dtype=dtype)
        left_data = []
        for piece in left:
            if piece[0] == "seg":
                pre = _prefix_products(piece[1].step_matrices(z, self.dim))
                left_data.append(("seg", piece[1], pre, to_c))
                to_c = pre[-1] @ to_c
            else:
                left_data.append(("jump", piece[1], piece[2], to_c))
                to_c = piece[2] @ to_c
        ya = _inverse(to_c) @ y0

        records = {}  # component index -> list of (kind, data)
        points = {}
        for entry in left_data:
            if entry[0] == "seg":
                _, seg, pre, before = entry
                states_nodes = np.einsum("nij,jk->nik", pre @ before, ya)
                records.setdefault(seg.component, []).append((seg, states_nodes))
            else:
                _, t, _, before = entry
                points[t] = before @ ya
        y = to_c @ ya
        y[:, :] = y0  # pin the anchor exactly
        points.setdefault(c, y.copy())
        for piece in right:
            if piece[0] == "seg":
                seg = piece[1]
                pre = _prefix_products(seg.step_matrices(z, self.dim))
                states_nodes = np.einsum("nij,jk->nik", pre, y)
                records.setdefault(seg.component, []).append((seg, states_nodes))
                y = states_nodes[-1]
            else:
                t, M = piece[1], piece[2]
                points[t] = y.copy()
                y = M @ y
        points[ts.b] = y.copy()
        return [Trajectory(self, z, c, k, records, points) for k in range(len(states))]


# --- trajectories ----------------------------------------------------------

def _maybe_real(v):
    return v.real if not np.any(v.imag) else v


class Trajectory:
    """A solution of ``(ell - z) u = g`` sampled on the whole time scale.

    Interval components carry the adaptive mesh states and evaluate between
    nodes by a partial Dormand-Prince step from the node to the left.
    """

    def __init__(self, prop: Propagator, z, c, column, records, points):
        self._prop = prop
        self.ts = prop.ts
        self.cs = prop.cs
        self.g = prop.g
        self.z = z
        self.anchor = c
        self._col = column
        self._records = records
        self._points = points

    # evaluation --------------------------------------------------------

    def state(self, x):
        """``(u, u^[1])`` at points ``x`` of the time scale, as two arrays."""
        x = np.atleast_1d(np.asarray(x, float))
        idx = self.ts.locate(x)
        if np.any(idx < 0):
            raise ValueError(f"x = {x[idx < 0][0]!r} is not a point of the time scale")
        u = np.empty(x.shape, complex)
        d = np.empty(x.shape, complex)
        comps = self.ts.components
        for i in np.unique(idx):
            sel = np.nonzero(idx == i)[0]
            lo, hi = comps[i]
            if hi == lo:
                y = self._points[lo][:, self._col]
                u[sel], d[sel] = y[0], y[1]
                continue
            for seg, nodes in self._records[i]:
                part = sel[(x[sel] >= seg.lo) & (x[sel] <= seg.hi)]
                if part.size == 0:
                    continue
                j, M = seg.dense_matrices(x[part], self.z, self._prop.dim)
                ys = np.einsum("nij,nj->ni", M, nodes[j, :, self._col])
                u[part], d[part] = ys[:, 0], ys[:, 1]
        return _maybe_real(u), _maybe_real(d)

    def value(self, x):
        return self.state(x)[0]

    def quasi(self, x):
        return self.state(x)[1]

    def __call__(self, x):
        return self.value(x)

    def derivative(self, x):
        """Classical derivative ``u^[1] / p`` on interval components."""
        x = np.atleast_1d(np.asarray(x, float))
        return self.quasi(x) / self.cs.evaluate("p", x, self.ts)

    def quasi_slope(self, x):
        """Delta derivative of ``u^[1]``: ``(q - z r) u - r g`` (exact for a solution)."""
        x = np.atleast_1d(np.asarray(x, float))
        u = self.value(x)
        out = (self.cs.evaluate("q", x, self.ts) - self.z * self.cs.evaluate("r", x, self.ts)) * u
        if self.g is not None:
            out = out - self.cs.evaluate("r", x, self.ts) * np.asarray(self.g(x))
        return out

    def samples(self):
        """``(x, u, u^[1])`` at every mesh node and isolated point, sorted."""
        xs = [np.array(list(self._points.keys()), float)]
        for recs in self._records.values():
            for seg, _ in recs:
                xs.append(seg.mesh.edges)
        x = np.unique(np.concatenate(xs))
        x = x[self.ts.contains(x)]
        u, d = self.state(x)
        return x, u, d

    def mesh_nodes(self):
        out = [seg.mesh.edges for recs in self._records.values() for seg, _ in recs]
        return np.unique(np.concatenate(out)) if out else np.empty(0)


@dataclass(frozen=True)
class TransferMatrix:
    """State map from ``sigma(a)`` to ``b`` at spectral parameter ``z``."""

    z: complex
    matrix: np.ndarray

    @property
    def det(self):
        M = self.matrix
        return M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]

    def norm(self):
        return float(np.linalg.norm(self.matrix, 2))


# --- public operations -----------------------------------------------------

def step_scattered(s: StatePair, t: float, cs: CoefficientSet, z, g_val, ts: TimeScale) -> StatePair:
    """Exact step from a right-scattered point ``t`` to ``sigma(t)``."""
    sig = float(ts.sigma(t))
    mu = sig - t
    if not mu > 0:
        raise ValueError(f"t = {t!r} is not right scattered")
    p_next = float(cs.evaluate("p", sig, ts)[0])
    if p_next == 0:
        raise IntegrationError(f"p(sigma(t)) = 0 at sigma(t) = {sig!r}")
    q = float(cs.evaluate("q", t, ts)[0])
    r = float(cs.evaluate("r", t, ts)[0])
    d_next = s.d + mu * ((q - z * r) * s.u - r * g_val)
    u_next = s.u + mu * d_next / p_next
    return StatePair(u_next, d_next)


def step_continuous(s: StatePair, segment, cs: CoefficientSet, z, g=None, tol=DEFAULT_TOL,
                    ts: TimeScale | None = None, component: int = 0):
    """Integrate across ``segment = (alpha, beta)`` of one interval component.

    Returns the state at ``beta`` and a dense-output callable ``x -> (u, d)``.
    """
    lo, hi = map(float, segment)
    if not hi > lo:
        raise ValueError("segment must have beta > alpha")
    if ts is None:
        ts = TimeScale(((lo, hi),))
        component = 0
    prop = Propagator(ts, cs, g=g, tol=tol)
    seg = prop._segment(lo, hi, component, z)
    fp = seg.fp
    pv = np.real(_call(fp, np.linspace(lo, hi, 65)))
    if np.any(pv > 0) and np.any(pv < 0):
        raise IntegrationError(f"p changes sign inside [{lo}, {hi}]")
    y0 = np.array([s.u, s.d] + ([1.0] if prop.dim == 3 else []), dtype=complex)
    pre = _prefix_products(seg.step_matrices(z, prop.dim))
    nodes = np.einsum("nij,j->ni", pre, y0)

    def dense(x):
        x = np.atleast_1d(np.asarray(x, float))
        if np.any((x < lo) | (x > hi)):
            raise ValueError("dense output requested outside the segment")
        j, M = seg.dense_matrices(x, z, prop.dim)
        ys = np.einsum("nij,nj->ni", M, nodes[j])
        return ys[:, 0], ys[:, 1]

    end = nodes[-1]
    return StatePair(complex(end[0]), complex(end[1])), dense


def solve_ivp(ts: TimeScale, cs: CoefficientSet, z, c, d1, d2, g=None, tol=DEFAULT_TOL) -> Trajectory:
    """Unique solution of ``(ell - z) u = g`` with ``u(c) = d1``, ``u^[1](c) = d2``."""
    return Propagator(ts, cs, g=g, tol=tol).solve(z, c, [(d1, d2)])[0]


def fundamental_system(ts: TimeScale, cs: CoefficientSet, z, alpha: float = 0.0, tol=DEFAULT_TOL,
                       propagator: Propagator | None = None):
    """Solutions ``theta, phi`` with ``theta = (cos, -sin)`` and ``phi = (sin, cos)``
    of ``alpha`` at ``sigma(a)``; their Wronskian is one."""
    prop = propagator or Propagator(ts, cs, tol=tol)
    ca, sa = math.cos(alpha), math.sin(alpha)
    theta, phi = prop.solve(z, ts.sigma_a(), [(ca, -sa), (sa, ca)])
    return theta, phi


def transfer_matrix(ts: TimeScale, cs: CoefficientSet, z, tol=DEFAULT_TOL,
                    propagator: Propagator | None = None) -> TransferMatrix:
    prop = propagator or Propagator(ts, cs, tol=tol)
    M = prop.transfer(z, ts.sigma_a(), ts.b)
    return TransferMatrix(z, M[:2, :2])


def _check_kappa(ts: TimeScale, x):
    x = np.atleast_1d(np.asarray(x, float))
    ok = ts.contains(x)
    if ts.a_right_scattered():
        ok &= x != ts.a
    if not np.all(ok):
        raise ValueError(f"x = {x[~ok][0]!r} is not in T_kappa")
    return x


def wronskian(f, g, x):
    """``W(f, g)(x) = f g^[1] - f^[1] g`` at points of ``T_kappa``."""
    x = _check_kappa(f.ts, x)
    fu, fd = f.state(x)
    gu, gd = g.state(x)
    return fu * gd - fd * gu


def wronskian_variation(f, g, x=None) -> float:
    """``max |W(x) - W(sigma(a))|`` over ``x`` (default: every sample node in ``T_kappa``)."""
    ts = f.ts
    if x is None:
        x, _, _ = f.samples()
        if ts.a_right_scattered():
            x = x[x != ts.a]
    w = wronskian(f, g, x)
    w0 = wronskian(f, g, ts.sigma_a())[0]
    return float(np.max(np.abs(w - w0)))


class LinearCombination:
    """``sum_k c_k f_k`` of trajectories sharing a scale (and spectral parameter)."""

    def __init__(self, coeffs, parts):
        if not parts:
            raise ValueError("need at least one trajectory")
        self.coeffs = [complex(c) if np.iscomplexobj(c) else float(c) for c in coeffs]
        self.parts = list(parts)
        self.ts = parts[0].ts
        self.cs = parts[0].cs

    def state(self, x):
        u = d = 0.0
        for c, f in zip(self.coeffs, self.parts):
            fu, fd = f.state(x)
            u = u + c * fu
            d = d + c * fd
        return u, d

    def value(self, x):
        return self.state(x)[0]

    def quasi(self, x):
        return self.state(x)[1]

    def __call__(self, x):
        return self.value(x)

    def quasi_slope(self, x):
        return sum(c * f.quasi_slope(x) for c, f in zip(self.coeffs, self.parts))

    def derivative(self, x):
        x = np.atleast_1d(np.asarray(x, float))
        return self.quasi(x) / self.cs.evaluate("p", x, self.ts)

    def samples(self):
        x = np.unique(np.concatenate([f.samples()[0] for f in self.parts]))
        u, d = self.state(x)
        return x, u, d

    def mesh_nodes(self):
        return np.unique(np.concatenate([f.mesh_nodes() for f in self.parts]))
