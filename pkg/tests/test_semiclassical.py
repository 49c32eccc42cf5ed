import math

import numpy as np
import pytest

from ergophase import app, semiclassical
from ergophase.app import WeakValueSeries
from ergophase.errors import DegenerateEnergies, NoCrossing, UnmatchedPairs
from ergophase.freespace import (FreeParticleConfig, free_weak_energy,
                                 tunnel_weak_energy)
from ergophase.models import momentum_ring


def test_arrival_on_free_weak_energy():
    cfg = FreeParticleConfig(p=2.0, x=10.0)
    times = np.linspace(1.0, 20.0, 191)
    weak = free_weak_energy(cfg, times)
    cross = semiclassical.classical_arrival(weak, cfg.E_p)
    assert len(cross) == 1
    dt = times[1] - times[0]
    # spline refinement: well inside a grid step
    assert abs(cross[0].t_classical - cfg.t_c) < 0.05 * dt
    exact = semiclassical.classical_arrival(
        weak, cfg.E_p, evaluate=lambda t: free_weak_energy(cfg, [t]).values[0])
    assert abs(exact[0].t_classical - cfg.t_c) <= dt * 1e-3


def test_arrival_on_momentum_grid():
    ring = momentum_ring(N=128, dx=0.25)
    spec, X = ring.spectrum, ring.bases['X']
    k, j = 20, 20                       # momentum index and target site
    p = ring.grid['p'][k]
    L = j * ring.grid['dx']
    t_c = L / p
    n = spec.basis.index(f'p{k}')
    times = np.linspace(0.5 * t_c, 2.0 * t_c, 301)
    weak = app.weak_energy_series(X, f'x{j}', X['x0'], spec, times)
    cross = semiclassical.classical_arrival(weak, spec.eigenvalues[n])
    first = cross[0].t_classical
    assert abs(first - t_c) / t_c < 0.02
    assert p * L > 10                   # action well above hbar


def test_tunneling_has_no_crossing():
    cfg = FreeParticleConfig(x=2.0, V=1.5, E=1.0)
    weak = tunnel_weak_energy(cfg, np.linspace(0.1, 50, 500))
    with pytest.raises(NoCrossing):
        semiclassical.classical_arrival(weak, cfg.E)


def test_flat_for_stationary_state(qubit):
    spec, X, E = qubit.spectrum, qubit.bases['X'], qubit.bases['E']
    n = spec.basis.index('0')
    weak = app.weak_energy_series(E, '0', X['+'], spec, np.linspace(0, 3, 31))
    assert semiclassical.classical_arrival(weak, spec.eigenvalues[n]) is semiclassical.Flat.EVERYWHERE


def test_discrete_time_estimate():
    assert semiclassical.discrete_time_estimate(3.0, 1.0, 2.0, 1.0) == 2.0
    with pytest.raises(DegenerateEnergies):
        semiclassical.discrete_time_estimate(3.0, 1.0, 2.0, 2.0)


def test_t_nm_second_order_on_free_actions():
    cfg = FreeParticleConfig(p=1.5, x=7.0, m=2.0)
    E0 = cfg.E_p
    S_E = lambda E: math.sqrt(2 * cfg.m * E) * cfg.L
    exact = cfg.L * math.sqrt(cfg.m / (2 * E0))
    assert exact == pytest.approx(cfg.t_c)
    errs = [abs(semiclassical.discrete_time_estimate(S_E(E0 + h / 2), S_E(E0 - h / 2),
                                                     E0 + h / 2, E0 - h / 2) - exact)
            for h in (0.08, 0.04, 0.02)]
    assert 3.5 < errs[0] / errs[1] < 4.5
    assert 3.5 < errs[1] / errs[2] < 4.5


def test_unwrap_actions():
    true = np.linspace(0, 20, 50)
    wrapped = np.angle(np.exp(1j * true))
    np.testing.assert_allclose(semiclassical.unwrap_actions(wrapped), true, atol=1e-12)
    np.testing.assert_allclose(semiclassical.unwrap_actions(2 * wrapped, hbar=2.0), 2 * true, atol=1e-12)


def test_coarse_grain_constant_unchanged():
    E = np.arange(10.0)
    P = np.full(10, 0.1 + 0.0j)
    np.testing.assert_allclose(semiclassical.coarse_grain_energy(P, E, 1.3), P, atol=1e-15)
    with pytest.raises(ValueError):
        semiclassical.coarse_grain_energy(P, E, 0.0)


def test_coarse_grain_monotone_on_ladder(ladder16):
    A, B, spec = ladder16.bases['A'], ladder16.bases['B'], ladder16.spectrum
    for b in range(16):
        p = app.conditional_app(A, B, spec, 0, b)
        norms = [np.abs(semiclassical.coarse_grain_energy(p, spec.eigenvalues, d).imag).sum()
                 for d in (0.25, 0.5, 1.0, 2.0, 4.0)]
        assert all(y <= x + 1e-12 for x, y in zip(norms, norms[1:])), (b, norms)


def test_coarse_grain_wide_kernel_nonnegative(ladder16):
    A, B, spec = ladder16.bases['A'], ladder16.bases['B'], ladder16.spectrum
    p = app.conditional_app(A, B, spec, 0, 3)
    out = semiclassical.coarse_grain_energy(p, spec.eigenvalues, 1e4)
    assert np.all(out.real >= -1e-3)
    assert abs(out.sum() - 1) < 1e-6


def _free_tables(cfg, ts, Es):
    S_t = [(t, cfg.m * cfg.L ** 2 / (2 * t)) for t in ts]
    S_E = [(E, math.sqrt(2 * cfg.m * E) * cfg.L) for E in Es]
    return S_t, S_E


def test_legendre_consistent_pairs():
    cfg = FreeParticleConfig(p=2.0, x=10.0)
    ts = np.linspace(2, 10, 81)
    Es = np.linspace(0.5, 10, 96)
    S_t, S_E = _free_tables(cfg, ts, Es)
    E = np.array([1.0, 2.0, 4.0])
    t = cfg.L * np.sqrt(cfg.m / (2 * E))
    assert semiclassical.legendre_check(S_t, S_E, np.column_stack([t, E])) < 1e-4
    # single tabulated pair: exact by construction
    assert semiclassical.legendre_check([(5.0, 10.0)], [(2.0, 20.0)], [(5.0, 2.0)]) == 0.0


def test_legendre_residual_quadratic_in_mismatch():
    cfg = FreeParticleConfig(p=2.0, x=10.0)
    ts = np.linspace(2, 10, 801)
    Es = np.linspace(0.5, 10, 951)
    S_t, S_E = _free_tables(cfg, ts, Es)
    E = 2.0
    t = cfg.L * math.sqrt(cfg.m / (2 * E))
    res = [semiclassical.legendre_check(S_t, S_E, [(t + d, E)]) for d in (0.2, 0.1, 0.05)]
    assert 3.5 < res[0] / res[1] < 4.5 and 3.5 < res[1] / res[2] < 4.5


def test_legendre_unmatched():
    with pytest.raises(UnmatchedPairs):
        semiclassical.legendre_check([(1.0, 0.0), (2.0, 1.0)], [(1.0, 0.0), (2.0, 1.0)], [(3.0, 1.5)])
    with pytest.raises(UnmatchedPairs):
        semiclassical.legendre_check([(1.0, 0.0)], [(1.0, 0.0)], [])


def test_weak_value_series_validation():
    with pytest.raises(Exception):
        WeakValueSeries(np.array([0.0, 0.0, 1.0]), np.zeros(3, complex))
