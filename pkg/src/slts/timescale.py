"""Time scales made of finitely many closed intervals and isolated points."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .quadrature import gauss_kronrod

__all__ = [
    "TimeScale",
    "PointClass",
    "ScaleMeasure",
    "Interval",
    "DegenerateScaleError",
    "jump",
    "trim",
    "measure_mass",
    "integrate",
]

QUAD_RTOL = 1e-10
QUAD_ATOL = 1e-12


class DegenerateScaleError(ValueError):
    """The requested operation leaves an empty (or otherwise unusable) scale."""


class Interval(NamedTuple):
    """A bounded real interval with explicit endpoint closedness."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def contains(self, t):
        t = np.asarray(t, float)
        left = t >= self.lo if self.lo_closed else t > self.lo
        right = t <= self.hi if self.hi_closed else t < self.hi
        return left & right


@dataclass(frozen=True)
class PointClass:
    in_scale: bool
    right_scattered: bool
    left_scattered: bool
    graininess: float


@dataclass(frozen=True)
class TimeScale:
    """Ordered disjoint closed components ``[alpha_i, beta_i]``.

    A component with ``alpha_i == beta_i`` is an isolated point. Components
    must be strictly separated (``beta_i < alpha_{i+1}``).

    ``snap`` is the tolerance used by :meth:`contains` when deciding whether
    a real number lies on a component endpoint; it defaults to exact
    comparison.
    """

    components: tuple[tuple[float, float], ...]
    snap: float = 0.0

    def __post_init__(self):
        comps = tuple((float(lo), float(hi)) for lo, hi in self.components)
        if not comps:
            raise DegenerateScaleError("a time scale needs at least one component")
        for lo, hi in comps:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"component [{lo}, {hi}] is not finite")
            if hi < lo:
                raise ValueError(f"component [{lo}, {hi}] has alpha > beta")
        for (_, hi), (lo, _) in zip(comps, comps[1:]):
            if not hi < lo:
                raise ValueError(f"components must be strictly increasing with positive gaps; "
                                 f"got beta={hi} followed by alpha={lo}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_points(cls, points: Iterable[float]) -> "TimeScale":
        return cls(tuple((p, p) for p in sorted(points)))

    @classmethod
    def from_json(cls, data: dict, snap: float = 0.0) -> "TimeScale":
        return cls(tuple(tuple(c) for c in data["components"]), snap=snap)

    def to_json(self) -> dict:
        return {"components": [list(c) for c in self.components]}

    # --- basic geometry -------------------------------------------------

    @property
    def a(self) -> float:
        return self.components[0][0]

    @property
    def b(self) -> float:
        return self.components[-1][1]

    @property
    def alphas(self) -> np.ndarray:
        return np.array([c[0] for c in self.components])

    @property
    def betas(self) -> np.ndarray:
        return np.array([c[1] for c in self.components])

    def intervals(self) -> list[tuple[float, float]]:
        """Components of positive length."""
        return [c for c in self.components if c[1] > c[0]]

    def isolated_points(self) -> list[float]:
        return [c[0] for c in self.components if c[1] == c[0]]

    def point_count(self) -> float:
        if self.intervals():
            return math.inf
        return float(len(self.components))

    def lebesgue_measure(self) -> float:
        return sum(hi - lo for lo, hi in self.components)

    def locate(self, t) -> np.ndarray:
        """Index of the component containing each ``t`` (``-1`` if none)."""
        t = np.asarray(t, float)
        al, be = self.alphas, self.betas
        idx = np.searchsorted(al, t + self.snap, side="right") - 1
        ok = idx >= 0
        safe = np.where(ok, idx, 0)
        ok &= t <= be[safe] + self.snap
        return np.where(ok, idx, -1)

    def contains(self, t):
        return self.locate(t) >= 0

    # --- jump operators ------------------------------------------------

    def sigma(self, t):
        """Forward jump; clamps to ``b`` for ``t >= b``."""
        t = np.asarray(t, float)
        al, be = self.alphas, self.betas
        n = len(al)
        idx = np.searchsorted(al, t, side="right") - 1
        safe = np.clip(idx, 0, n - 1)
        inside = (idx >= 0) & (t < be[safe])
        nxt = np.clip(idx + 1, 0, n - 1)
        out = np.where(inside, t, np.where(idx + 1 < n, al[nxt], self.b))
        return np.where(t >= self.b, self.b, out)

    def rho(self, t):
        """Backward jump; clamps to ``a`` for ``t <= a``."""
        t = np.asarray(t, float)
        al, be = self.alphas, self.betas
        n = len(al)
        idx = np.searchsorted(be, t, side="left")
        safe = np.clip(idx, 0, n - 1)
        inside = (idx < n) & (al[safe] < t)
        prev = np.clip(idx - 1, 0, n - 1)
        out = np.where(inside, t, np.where(idx >= 1, be[prev], self.a))
        return np.where(t <= self.a, self.a, out)

    def mu(self, t):
        """Graininess ``sigma(t) - t``."""
        t = np.asarray(t, float)
        return self.sigma(t) - t

    def nu(self, t):
        """Backward graininess ``t - rho(t)``."""
        t = np.asarray(t, float)
        return t - self.rho(t)

    def sigma_a(self) -> float:
        return float(self.sigma(self.a))

    def rho_b(self) -> float:
        return float(self.rho(self.b))

    def a_right_scattered(self) -> bool:
        return self.sigma_a() > self.a

    def b_left_scattered(self) -> bool:
        return self.rho_b() < self.b

    def sigma_kappa(self, x):
        """Forward jump of the trimmed scale ``T_kappa``."""
        x = np.asarray(x, float)
        return np.where(x > self.a, self.sigma(x), self.sigma_a())

    def classify(self, t) -> PointClass:
        t = float(t)
        inside = bool(self.contains(t))
        mu = float(self.sigma(t) - t) if inside else 0.0
        nu = float(t - self.rho(t)) if inside else 0.0
        return PointClass(in_scale=inside, right_scattered=inside and mu > 0,
                          left_scattered=inside and nu > 0, graininess=max(mu, 0.0))

    # --- measures ------------------------------------------------------

    def atoms(self, which: str = "sigma_kappa") -> list[tuple[float, float]]:
        """Point masses ``(t_n, mass)`` of the measure named by ``which``."""
        comps = self.components
        if which in ("sigma", "sigma_kappa"):
            out = [(comps[i][1], comps[i + 1][0] - comps[i][1]) for i in range(len(comps) - 1)]
            if which == "sigma_kappa" and out and out[0][0] == self.a and self.a_right_scattered():
                out = out[1:]
            return out
        if which == "rho":
            return [(comps[i][0], comps[i][0] - comps[i - 1][1]) for i in range(1, len(comps))]
        raise ValueError(f"unknown measure {which!r}; expected sigma, sigma_kappa or rho")

    def measure(self, which: str = "sigma_kappa") -> "ScaleMeasure":
        return ScaleMeasure(tuple(self.intervals()), tuple(self.atoms(which)))

    def distribution(self, which: str, x):
        """Distribution function of the measure ``which`` (right-continuous for
        sigma/sigma_kappa, left-continuous for rho)."""
        if which == "sigma":
            return self.sigma(x)
        if which == "sigma_kappa":
            return self.sigma_kappa(x)
        if which == "rho":
            return self.rho(x)
        raise ValueError(f"unknown measure {which!r}")


@dataclass(frozen=True)
class ScaleMeasure:
    """Lebesgue part on ``continuous_part`` plus point ``atoms``."""

    continuous_part: tuple[tuple[float, float], ...]
    atoms: tuple[tuple[float, float], ...]

    def mass(self, sets: Sequence) -> float:
        total = 0.0
        for s in _as_intervals(sets):
            for lo, hi in self.continuous_part:
                total += max(0.0, min(hi, s.hi) - max(lo, s.lo))
            for t, m in self.atoms:
                if s.contains(t):
                    total += m
        return total


def _as_intervals(sets) -> list[Interval]:
    if isinstance(sets, Interval):
        return [sets]
    if isinstance(sets, tuple) and len(sets) == 2 and np.isscalar(sets[0]):
        return [Interval(float(sets[0]), float(sets[1]))]
    return [s if isinstance(s, Interval) else Interval(float(s[0]), float(s[1])) for s in sets]


def jump(ts: TimeScale, t: float, direction: str = "forward") -> tuple[float, PointClass]:
    """Forward (``sigma``) or backward (``rho``) jump of ``t`` with a point report."""
    if direction == "forward":
        value = float(ts.sigma(t))
    elif direction == "backward":
        value = float(ts.rho(t))
    else:
        raise ValueError(f"direction must be 'forward' or 'backward', not {direction!r}")
    return value, ts.classify(t)


def trim(ts: TimeScale, side: str) -> TimeScale:
    """``T_kappa`` (``side='lower'`` or ``'lower_kappa'``) or ``T^kappa`` (``'upper'``)."""
    comps = list(ts.components)
    if side in ("lower", "lower_kappa"):
        if ts.a_right_scattered():
            comps = comps[1:]
    elif side == "upper":
        if ts.b_left_scattered():
            comps = comps[:-1]
    else:
        raise ValueError(f"side must be 'lower', 'upper' or 'lower_kappa', not {side!r}")
    if not comps:
        raise DegenerateScaleError(f"trimming the {side} end of {ts.components} leaves an empty scale")
    return TimeScale(tuple(comps), snap=ts.snap)


def measure_mass(ts: TimeScale, which: str, sets) -> float:
    """Mass of a finite union of bounded intervals under ``sigma``, ``sigma_kappa`` or ``rho``."""
    return ts.measure(which).mass(sets)


def integrate(ts: TimeScale, f, weight=None, rtol: float = QUAD_RTOL, atol: float = QUAD_ATOL,
              breakpoints=None):
    """``int f * weight d(sigma_kappa)`` over ``T_kappa``.

    ``f`` and ``weight`` must accept numpy arrays. Continuous components use
    adaptive Gauss-Kronrod panels; atoms contribute ``mass * f * weight``.
    ``breakpoints`` may supply a sorted array of preferred panel edges.
    """
    def integrand(x):
        v = np.asarray(f(x))
        return v * np.asarray(weight(x)) if weight is not None else v

    total = 0.0
    atoms = ts.atoms("sigma_kappa")
    if atoms:
        t = np.array([p for p, _ in atoms])
        m = np.array([w for _, w in atoms])
        vals = integrand(t)
        if not np.all(np.isfinite(vals)):
            raise ArithmeticError(f"non-finite integrand value at atom t = {t[~np.isfinite(vals)][0]!r}")
        total = total + np.sum(m * vals)
    for lo, hi in ts.intervals():
        bp = None
        if breakpoints is not None:
            bp = breakpoints[(breakpoints > lo) & (breakpoints < hi)]
        val, _ = gauss_kronrod(integrand, lo, hi, rtol=rtol, atol=atol, breakpoints=bp)
        total = total + val
    return total
