import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from instances import HYBRID, HYBRID_COEFFS
from oracles import circle_through, dirichlet_m, neumann_chain_eigenvalues

from slts import spectra
from slts.coefficients import CoefficientSet
from slts.ivp import LinearCombination, Propagator, fundamental_system
from slts.operators import BoundaryCondition, ell_of, inner_product, norm
from slts.spectra import (BracketBudgetError, ResolventPoleError, SpectralError, asymptotic_ratio,
                          characteristic_function, classify_weyl, eigenpair, eigenspace, find_eigenvalues,
                          green, green_kernel, m_function, resolvent_apply, spectral_transform, spectrum,
                          weyl_disk)
from slts.timescale import TimeScale

FLAT = CoefficientSet()
UNIT = TimeScale(((0.0, 1.0),))
DIRICHLET = BoundaryCondition.dirichlet()
NEUMANN = BoundaryCondition.separated(math.pi / 2, math.pi / 2)
PI2 = math.pi ** 2
MIXED = BoundaryCondition.separated(0.3, 1.1)


@pytest.fixture(scope="module")
def unit_spectrum():
    return spectrum(UNIT, FLAT, DIRICHLET, (0.0, 300.0))


@pytest.fixture(scope="module")
def hybrid_spectrum():
    return spectrum(HYBRID, HYBRID_COEFFS, MIXED, (-20.0, 300.0), max_count=5)


# --- characteristic function ---------------------------------------------------

@pytest.mark.parametrize("lam", [-7.3, 0.5, 12.0, 250.0, 3 + 4j])
def test_characteristic_function_closed_form(lam):
    s = np.sqrt(complex(lam))
    assert abs(characteristic_function(lam, UNIT, FLAT, DIRICHLET) - np.sin(s) / s) <= 1e-11


def test_characteristic_function_at_zero_and_first_eigenvalue():
    assert characteristic_function(0.0, UNIT, FLAT, DIRICHLET) == pytest.approx(1.0, abs=1e-13)
    assert abs(characteristic_function(PI2, UNIT, FLAT, DIRICHLET)) <= 1e-11


@settings(max_examples=15, deadline=None)
@given(st.floats(-50, 300), st.floats(-20, 20))
def test_characteristic_function_is_analytic(x, y):
    z, h = complex(x, y), 1e-4
    prop = Propagator(HYBRID, HYBRID_COEFFS, zmax=400.0)
    D = lambda w: characteristic_function(w, HYBRID, HYBRID_COEFFS, MIXED, propagator=prop)
    dx = (D(z + h) - D(z - h)) / (2 * h)
    dy = (D(z + 1j * h) - D(z - 1j * h)) / (2 * h)
    assert abs(0.5 * (dx + 1j * dy)) <= 1e-6 * max(abs(dx), abs(D(z)), 1.0)


def test_coupled_characteristic_function_is_a_determinant():
    bc = BoundaryCondition.coupled(0.4, np.eye(2))
    M = Propagator(UNIT, FLAT).transfer(7.0)[:2, :2]
    expected = np.linalg.det(M - np.exp(0.4j) * np.eye(2))
    assert abs(characteristic_function(7.0, UNIT, FLAT, bc) - expected) <= 1e-12


# --- eigenvalues ---------------------------------------------------------------

def test_classical_dirichlet_eigenvalues():
    sr = find_eigenvalues(UNIT, FLAT, DIRICHLET, (0.0, 100.0))
    np.testing.assert_allclose(sr.eigenvalues, [PI2, 4 * PI2, 9 * PI2], rtol=1e-8)
    assert sr.multiplicities == [1, 1, 1]


def test_discrete_eigenvalues_match_tridiagonal_oracle():
    ts = TimeScale.from_points(range(6))
    sr = find_eigenvalues(ts, FLAT, NEUMANN, (-1.0, 5.0))
    np.testing.assert_allclose(sr.eigenvalues, neumann_chain_eigenvalues(np.zeros(6)), atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.integers(6, 14), st.integers(0, 2 ** 32 - 1), st.floats(-3, 2), st.floats(0.5, 6))
def test_discrete_eigenvalue_count_matches_oracle(n, seed, lo, width):
    q = np.random.default_rng(seed).uniform(-2, 2, n)
    ts = TimeScale.from_points(range(n))
    cs = CoefficientSet(q=lambda t: q[np.rint(t).astype(int)])
    oracle = neumann_chain_eigenvalues(q)
    hi = lo + width
    # keep the range ends away from eigenvalues so that counting is well posed
    if np.min(np.abs(np.concatenate([oracle - lo, oracle - hi]))) < 1e-6:
        return
    sr = find_eigenvalues(ts, cs, NEUMANN, (lo, hi))
    inside = oracle[(oracle > lo) & (oracle < hi)]
    assert len(sr.eigenvalues) == len(inside)
    np.testing.assert_allclose(sr.eigenvalues, inside, atol=1e-10)


def test_dirichlet_and_neumann_interlace():
    half = BoundaryCondition.separated(0.0, math.pi / 2)
    for cs in (FLAT, CoefficientSet(q="5*sin(4*t)")):
        d = find_eigenvalues(UNIT, cs, DIRICHLET, (-10.0, 1000.0)).eigenvalues
        n = find_eigenvalues(UNIT, cs, NEUMANN, (-10.0, 1000.0)).eigenvalues
        m = find_eigenvalues(UNIT, cs, half, (-10.0, 1000.0)).eigenvalues
        # one end changed: strict interlacing
        k = min(len(d), len(m) - 1)
        assert np.all(m[:k] < d[:k]) and np.all(d[:k] < m[1:k + 1])
        # both ends changed: a rank-two change, so only N_k < D_k <= N_{k+2}
        k = min(len(d), len(n) - 2)
        assert np.all(n[:k] < d[:k]) and np.all(d[:k] <= n[2:k + 2] * (1 + 1e-10))


def test_eigenvalues_sorted_and_simple(hybrid_spectrum):
    sr = hybrid_spectrum
    assert np.all(np.diff(sr.eigenvalues) > 0)
    assert sr.multiplicities == [1] * len(sr)


def test_max_count_truncates():
    sr = find_eigenvalues(UNIT, FLAT, DIRICHLET, (0.0, 1000.0), max_count=2)
    np.testing.assert_allclose(sr.eigenvalues, [PI2, 4 * PI2], rtol=1e-10)


def test_invalid_requests():
    with pytest.raises(ValueError):
        find_eigenvalues(UNIT, FLAT, DIRICHLET, (10.0, 0.0))
    with pytest.raises(ValueError, match="sigma\\(a\\) right scattered"):
        find_eigenvalues(TimeScale.from_points(range(6)), FLAT, DIRICHLET, (0.0, 4.0))
    with pytest.raises(ValueError, match="phi = 0"):
        find_eigenvalues(UNIT, FLAT, BoundaryCondition.coupled(0.5, np.eye(2)), (0.0, 10.0))


def test_bracket_budget_reports_trace(monkeypatch):
    monkeypatch.setattr(spectra, "EVAL_BUDGET", 300)
    with pytest.raises(BracketBudgetError) as info:
        find_eigenvalues(UNIT, FLAT, DIRICHLET, (0.0, 5000.0))
    assert len(info.value.trace["grid"]) == spectra.SCAN_POINTS


def test_large_transfer_norm_warns():
    with pytest.warns(UserWarning, match="transfer matrix norm"):
        find_eigenvalues(UNIT, CoefficientSet(q="400"), DIRICHLET, (0.0, 50.0))


# --- coupled conditions ------------------------------------------------------

def test_periodic_spectrum_with_double_eigenvalues():
    sr = find_eigenvalues(UNIT, FLAT, BoundaryCondition.coupled(0.0, np.eye(2)), (-1.0, 400.0))
    np.testing.assert_allclose(sr.eigenvalues, [0.0, 4 * PI2, 16 * PI2, 36 * PI2], atol=1e-7)
    assert sr.multiplicities == [1, 2, 2, 2]


def test_antiperiodic_spectrum():
    sr = find_eigenvalues(UNIT, FLAT, BoundaryCondition.coupled(0.0, -np.eye(2)), (0.0, 300.0))
    np.testing.assert_allclose(sr.eigenvalues, [PI2, 9 * PI2, 25 * PI2], rtol=1e-9)
    assert sr.multiplicities == [2, 2, 2]


def test_discrete_periodic_spectrum():
    ts = TimeScale.from_points(range(8))
    sr = find_eigenvalues(ts, FLAT, BoundaryCondition.coupled(0.0, np.eye(2)), (-0.5, 4.5))
    np.testing.assert_allclose(sr.eigenvalues, [0.0, 1.0, 3.0, 4.0], atol=1e-9)
    assert sr.multiplicities == [1, 2, 2, 1]


def test_coupled_eigenspace_is_orthonormal():
    bc = BoundaryCondition.coupled(0.0, np.eye(2))
    basis = eigenspace(16 * PI2, UNIT, FLAT, bc)
    assert len(basis) == 2
    G = np.array([[inner_product(f, g, UNIT, FLAT) for g in basis] for f in basis])
    np.testing.assert_allclose(G, np.eye(2), atol=1e-9)
    x = np.linspace(0.05, 0.95, 7)
    for f in basis:
        np.testing.assert_allclose(ell_of(f, UNIT, FLAT)(x), 16 * PI2 * f.value(x), atol=1e-7)


# --- eigenpairs ----------------------------------------------------------------

def test_first_eigenfunction_is_the_sine(unit_spectrum):
    e = unit_spectrum.eigenfunctions[0]
    x = np.linspace(0, 1, 101)
    err = np.max(np.abs(e.value(x) - math.sqrt(2) * np.sin(math.pi * x)))
    assert err <= 1e-7
    np.testing.assert_allclose(unit_spectrum.norming_constants, 2 * PI2 * np.arange(1, 6) ** 2, rtol=1e-9)


def test_eigenfunctions_are_orthonormal(hybrid_spectrum):
    sr = hybrid_spectrum
    G = np.array([[inner_product(f, g, HYBRID, HYBRID_COEFFS) for g in sr.eigenfunctions]
                  for f in sr.eigenfunctions])
    np.testing.assert_allclose(G, np.eye(len(sr)), atol=1e-8)


def test_eigenpair_rejects_non_eigenvalues():
    with pytest.raises(SpectralError):
        eigenpair(5.0, UNIT, FLAT, DIRICHLET)
    with pytest.raises(ValueError):
        eigenpair(0.0, UNIT, FLAT, BoundaryCondition.coupled(0.0, np.eye(2)))


def test_spectral_result_json(unit_spectrum):
    data = unit_spectrum.to_json()
    assert set(data) == {"eigenvalues", "norming_constants"}
    assert len(data["eigenvalues"]) == 5


# --- Green kernel and resolvent --------------------------------------------

def test_green_kernel_closed_forms():
    assert green_kernel(0.0, 0.25, 0.75, UNIT, FLAT, DIRICHLET) == pytest.approx(0.0625, abs=1e-13)
    x, y = np.meshgrid(np.linspace(0, 1, 9), np.linspace(0, 1, 9))
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    exact = np.sinh(lo) * np.sinh(1 - hi) / math.sinh(1)
    np.testing.assert_allclose(green_kernel(-1.0, x, y, UNIT, FLAT, DIRICHLET), exact, atol=1e-12)


def test_green_kernel_symmetric_in_a_gap(hybrid_spectrum):
    lam = hybrid_spectrum.eigenvalues
    z = 0.5 * (lam[1] + lam[2])
    x = np.array([0.0, 0.3, 0.9, 1.0, 1.3, 1.7, 2.5])
    X, Y = np.meshgrid(x, x)
    G = green_kernel(z, X, Y, HYBRID, HYBRID_COEFFS, MIXED)
    H = green_kernel(z, Y, X, HYBRID, HYBRID_COEFFS, MIXED)
    assert np.max(np.abs(G - H)) <= 1e-12


def test_green_kernel_pole():
    with pytest.raises(ResolventPoleError, match="resolvent pole"):
        green(PI2, UNIT, FLAT, DIRICHLET)
    with pytest.raises(ResolventPoleError):
        m_function(4 * PI2, UNIT, FLAT, DIRICHLET)


def test_resolvent_of_constant():
    v = resolvent_apply(0.0, lambda t: np.ones_like(t), UNIT, FLAT, DIRICHLET)
    x = np.linspace(0, 1, 21)
    np.testing.assert_allclose(v.value(x), x * (1 - x) / 2, atol=1e-12)


def test_resolvent_of_zero_is_zero():
    v = resolvent_apply(3.0 + 1j, lambda t: np.zeros_like(t), HYBRID, HYBRID_COEFFS, MIXED)
    assert np.all(v.value(np.array([0.0, 0.5, 1.3, 2.0])) == 0)


def test_resolvent_on_eigenfunctions(hybrid_spectrum):
    sr = hybrid_spectrum
    x = np.array([0.0, 0.2, 0.7, 1.0, 1.3, 1.5, 2.1, 2.5])
    for z in (4.0 + 3j, -7.0):
        for lam, e in zip(sr.eigenvalues[:3], sr.eigenfunctions):
            v = resolvent_apply(z, e, HYBRID, HYBRID_COEFFS, MIXED)
            np.testing.assert_allclose(v.value(x), e.value(x) / (lam - z), atol=1e-7)


def test_resolvent_residual_on_points():
    ts = TimeScale.from_points(np.arange(8) * 0.5)
    bc = BoundaryCondition.separated(0.6, 0.2)
    f = lambda t: np.cos(t) + t
    v = resolvent_apply(1.5 - 2j, f, ts, FLAT, bc)
    x = np.arange(1, 7) * 0.5
    np.testing.assert_allclose(ell_of(v, ts, FLAT)(x) - (1.5 - 2j) * v.value(x), f(x), atol=1e-11)


# --- m-function --------------------------------------------------------------

def test_m_function_closed_form():
    assert m_function(-1.0, UNIT, FLAT, DIRICHLET).m == pytest.approx(-1 / math.tanh(1.0), abs=1e-10)
    for z in (1j, 30 + 2j, -50 + 0.1j):
        assert abs(m_function(z, UNIT, FLAT, DIRICHLET).m - dirichlet_m(z)) <= 1e-9 * abs(dirichlet_m(z))
    assert m_function(1j, UNIT, FLAT, DIRICHLET).m.imag > 0


def test_m_function_blows_up_at_the_first_eigenvalue():
    prop = Propagator(UNIT, FLAT)
    mags = [abs(m_function(PI2 + 1j * eps, UNIT, FLAT, DIRICHLET, propagator=prop).m)
            for eps in (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)]
    assert np.all(np.diff(mags) > 0) and mags[-1] > 1e5


def test_m_function_needs_separated_conditions():
    with pytest.raises(ValueError):
        m_function(1j, UNIT, FLAT, BoundaryCondition.coupled(0.0, np.eye(2)))


def test_m_function_residues_are_norming_constants(hybrid_spectrum):
    sr = hybrid_spectrum
    prop = Propagator(HYBRID, HYBRID_COEFFS)
    eps = 1e-6
    for lam, gamma in zip(sr.eigenvalues, sr.norming_constants):
        # (z - lam) m(z) at z = lam + i eps; only Im m carries the pole term
        residue = -eps * m_function(lam + 1j * eps, HYBRID, HYBRID_COEFFS, MIXED, propagator=prop).m.imag
        assert abs(residue + gamma) <= 1e-6 * max(1.0, gamma)


def test_m_function_increases_between_poles(hybrid_spectrum):
    lam = hybrid_spectrum.eigenvalues
    prop = Propagator(HYBRID, HYBRID_COEFFS)
    for a, b in zip(lam, lam[1:]):
        x = np.linspace(a, b, 42)[1:-1]
        m = np.array([m_function(t, HYBRID, HYBRID_COEFFS, MIXED, propagator=prop).m.real for t in x])
        assert np.all(np.diff(m) > 0)


def test_spectral_support_from_im_m(unit_spectrum):
    prop = Propagator(UNIT, FLAT, zmax=300.0)
    grid = np.arange(-5.0, 260.0, 0.25)
    im = np.array([m_function(t + 1e-4j, UNIT, FLAT, DIRICHLET, propagator=prop).m.imag for t in grid])
    peaks = grid[1:-1][(im[1:-1] > im[:-2]) & (im[1:-1] > im[2:])]
    lam = unit_spectrum.eigenvalues
    assert len(peaks) == len(lam)
    assert np.max(np.abs(peaks - lam)) <= 0.25


@settings(max_examples=30, deadline=None)
@given(st.floats(-300, 1000), st.floats(-2, 2))
def test_herglotz_property_on_hybrid(x, log_y):
    z = complex(x, 10 ** log_y)
    assert m_function(z, HYBRID, HYBRID_COEFFS, MIXED).m.imag > 0


# --- transform ----------------------------------------------------------------

def test_transform_round_trip(hybrid_spectrum):
    sr = hybrid_spectrum
    e0 = sr.eigenfunctions[0]
    back = spectral_transform(spectral_transform(e0, sr), sr, "inverse")
    x = np.array([0.0, 0.4, 1.0, 1.3, 1.8, 2.5])
    np.testing.assert_allclose(back.value(x), e0.value(x), atol=1e-8)
    c = np.array([0.3, -1.2, 0.0, 2.2, 0.5])
    again = spectral_transform(spectral_transform(c, sr, "inverse"), sr)
    np.testing.assert_allclose(again, c, atol=1e-8)


def test_parseval_with_three_terms(hybrid_spectrum):
    sr = hybrid_spectrum
    three = spectra.SpectralResult(sr.eigenvalues[:3], sr.bc, sr.eigenfunctions[:3],
                                   sr.norming_constants[:3], ts=sr.ts, cs=sr.cs)
    f = LinearCombination([1.0, 0.5, -2.0], three.eigenfunctions)
    c = spectral_transform(f, three)
    assert c.size == 3
    assert abs(norm(f, HYBRID, HYBRID_COEFFS) ** 2 - np.sum(c ** 2 * three.norming_constants)) <= 1e-8


def test_transform_intertwines_ell_on_the_domain(hybrid_spectrum):
    sr = hybrid_spectrum
    z = -4.0 + 1j
    f = resolvent_apply(z, lambda t: np.exp(-t) * np.cos(2 * t), HYBRID, HYBRID_COEFFS, MIXED)
    ell_f = ell_of(f, HYBRID, HYBRID_COEFFS, method="spectral")
    lhs = spectral_transform(ell_f, sr)
    rhs = sr.eigenvalues * spectral_transform(f, sr)
    assert np.linalg.norm(lhs - rhs) <= 1e-7


def test_transform_argument_errors(hybrid_spectrum):
    with pytest.raises(ValueError):
        spectral_transform([1.0], hybrid_spectrum, "inverse")
    with pytest.raises(ValueError):
        spectral_transform(np.sin, hybrid_spectrum, "sideways")
    with pytest.raises(ValueError):
        spectral_transform(np.sin, find_eigenvalues(UNIT, FLAT, DIRICHLET, (0.0, 50.0)))


# --- asymptotics -----------------------------------------------------------------

def test_asymptotic_table_for_unit_interval(unit_spectrum):
    report = asymptotic_ratio(unit_spectrum, 1.0)
    assert report.applicable and report.limit == pytest.approx(PI2)
    n, ratio, _ = report.rows[3]
    assert n == 4 and ratio == pytest.approx(25 * PI2 / 16, rel=1e-10)
    assert report.relative_gap == pytest.approx((1 + 1 / 4) ** 2 - 1, rel=1e-9)
    assert report.to_json()["limit"] == report.limit


def test_asymptotic_limit_uses_geometric_length():
    sr = find_eigenvalues(TimeScale(((0.0, 2.0),)), FLAT, DIRICHLET, (0.0, 100.0))
    report = asymptotic_ratio(sr)
    assert report.limit == pytest.approx(PI2 / 4)


def test_asymptotics_not_captured_on_points():
    ts = TimeScale.from_points(range(8))
    sr = find_eigenvalues(ts, FLAT, NEUMANN, (-1.0, 5.0))
    report = asymptotic_ratio(sr)
    assert not report.applicable and "asymptotics not captured" in report.message


def test_asymptotics_need_five_eigenvalues():
    with pytest.raises(ValueError):
        asymptotic_ratio(find_eigenvalues(UNIT, FLAT, DIRICHLET, (0.0, 100.0)), 1.0)


# --- Weyl disks -----------------------------------------------------------------

def test_single_truncation_disk_matches_independent_formulas():
    z = 2.0 + 0.5j
    (disk,) = weyl_disk(z, [HYBRID], HYBRID_COEFFS, alpha=0.4)
    assert disk.radius > 0
    _, phi = fundamental_system(HYBRID, HYBRID_COEFFS, z, alpha=0.4)
    radius = 1 / (2 * z.imag * norm(phi, HYBRID, HYBRID_COEFFS) ** 2)
    assert disk.radius == pytest.approx(radius, rel=1e-8)
    ms = [m_function(z, HYBRID, HYBRID_COEFFS, BoundaryCondition.separated(0.4, b)).m for b in (0.1, 1.0, 2.5)]
    center, r3 = circle_through(*ms)
    assert abs(center - disk.center) <= 1e-8 * abs(center) and r3 == pytest.approx(disk.radius, rel=1e-8)


def test_free_half_line_is_limit_point():
    bs = [5.0, 10.0, 20.0, 40.0]
    disks = weyl_disk(1 + 0.01j, [TimeScale(((0.0, b),)) for b in bs], FLAT)
    r = np.array([d.radius for d in disks])
    assert np.all(np.diff(r) < 0)
    rb = r * np.array(bs)
    # radii scale like C / b_k: r_k b_k stays in a narrow band
    assert rb.max() / rb.min() < 1.25
    assert r[-1] < r[0] / 5
    assert classify_weyl(disks).startswith("limit point")


def test_negative_quartic_potential_is_limit_circle():
    bs = [2.0, 3.0, 4.0, 6.0, 8.0]
    disks = weyl_disk(1j, [TimeScale(((0.0, b),)) for b in bs], CoefficientSet(q="-t^4"))
    r = np.array([d.radius for d in disks])
    assert np.all(np.diff(r) < 0)
    assert r[-1] > 0.5 * r[0]
    assert classify_weyl(disks).startswith("limit circle")


def test_weyl_disk_argument_errors():
    with pytest.raises(ValueError):
        weyl_disk(1j, [TimeScale(((0.0, 2.0),)), TimeScale(((0.0, 1.0),))], FLAT)
    with pytest.raises(ValueError):
        weyl_disk(1j, [TimeScale(((0.0, 1.0),)), TimeScale(((0.5, 2.0),))], FLAT)
    with pytest.raises(ValueError):
        weyl_disk(-1j, [UNIT], FLAT)
    assert classify_weyl(weyl_disk(1j, [UNIT], FLAT)).startswith("undetermined")
