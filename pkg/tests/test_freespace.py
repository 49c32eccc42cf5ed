import math

import numpy as np
import pytest
import sympy as sp
from scipy import integrate, special

from ergophase import freespace as fs
from ergophase.errors import (NonpositiveTime, NotTunneling, WidthTooLarge,
                              WindowCrossesZero)
from ergophase.freespace import FreeParticleConfig


def _propagator(cfg, t):
    """Free kernel sqrt(m / 2 pi i hbar t) exp(i m L^2 / 2 hbar t)."""
    return np.sqrt(cfg.m / (2j * math.pi * cfg.hbar * t)) * np.exp(1j * cfg.m * cfg.L ** 2 / (2 * cfg.hbar * t))


def test_free_app_is_plane_wave_times_kernel():
    cfg = FreeParticleConfig(m=1.3, p=0.7, x0=0.5, x=6.0, hbar=0.8)
    t = np.linspace(0.5, 20, 40)
    # <x|U(t)|x0> times <p|x> / <p|x0> up to the energy phase exp(i E_p t)
    ref = _propagator(cfg, t) * np.exp(-1j * cfg.p * cfg.L / cfg.hbar) * np.exp(1j * cfg.E_p * t / cfg.hbar)
    np.testing.assert_allclose(fs.free_app(cfg, t), ref, atol=1e-12)
    np.testing.assert_allclose(np.abs(fs.free_app(cfg, t)), np.sqrt(cfg.m / (2 * math.pi * cfg.hbar * t)))


def test_free_app_rejects_nonpositive_time():
    cfg = FreeParticleConfig(p=1.0, x=1.0)
    with pytest.raises(NonpositiveTime):
        fs.free_app(cfg, 0.0)


@pytest.mark.parametrize('p', [0.5, 2.0, 7.0])
@pytest.mark.parametrize('L', [1.0, 30.0])
def test_action_split_identity(p, L):
    cfg = FreeParticleConfig(p=p, x=L)
    for t in np.geomspace(0.05, 50, 25):
        assert fs.free_action_split(cfg, t).residual() < 1e-9


def test_action_split_at_arrival():
    cfg = FreeParticleConfig(p=3.0, x=12.0, hbar=0.5)
    d = fs.free_action_split(cfg, cfg.t_c)
    assert d.S_t + d.E_n_t - d.S_E == pytest.approx(-cfg.hbar * math.pi / 4, abs=1e-12)
    assert d.total == pytest.approx(-cfg.hbar * math.pi / 4, abs=1e-12)


def test_stationary_width_matches_symbolic_curvature():
    m, p, L, hb, t = sp.symbols('m p L hbar t', positive=True)
    phi = m * (L - p * t / m) ** 2 / (2 * hb * t)
    curv = sp.simplify(sp.diff(phi, t, 2).subs(t, m * L / p))
    assert sp.simplify(curv - p ** 3 / (hb * m ** 2 * L)) == 0
    width = sp.lambdify((m, p, L, hb), 1 / sp.sqrt(curv))
    for vals in [(1.0, 2.0, 40.0, 1.0), (2.5, 0.3, 7.0, 0.1)]:
        cfg = FreeParticleConfig(m=vals[0], p=vals[1], x=vals[2], hbar=vals[3])
        assert fs.stationary_width(cfg) == pytest.approx(width(*vals), rel=1e-14)


def test_window_errors():
    with pytest.raises(WindowCrossesZero):
        fs.partial_ergodic_free(FreeParticleConfig(p=4.0, x=40.0), 100.0)
    with pytest.raises(WidthTooLarge):
        fs.partial_ergodic_free(FreeParticleConfig(p=2.0, x=40.0), 10.0)


def test_partial_ergodic_against_plain_quadrature():
    cfg = FreeParticleConfig(p=2.0, x=40.0)
    T = 12.0
    res = fs.partial_ergodic_free(cfg, T, enforce_width=False)
    lo, hi = cfg.t_c - T / 2, cfg.t_c + T / 2
    re = integrate.quad(lambda t: fs.free_app(cfg, t).real, lo, hi, limit=400, epsabs=1e-13)[0]
    im = integrate.quad(lambda t: fs.free_app(cfg, t).imag, lo, hi, limit=400, epsabs=1e-13)[0]
    assert abs(res.integral - complex(re, im) / T) < 1e-10
    assert res.claimed == pytest.approx(cfg.m / (T * cfg.p))


def test_partial_ergodic_large_window_close_to_closed_form():
    cfg = FreeParticleConfig(p=4.0, x=4000.0)
    res = fs.partial_ergodic_free(cfg, 600.0)
    assert res.rel_error < 0.01


def test_stationary_region_matches_fresnel():
    cfg = FreeParticleConfig(p=2.0, x=2000.0)
    w = fs.stationary_width(cfg)
    lo, hi = cfg.t_c - 3 * w, cfg.t_c + 3 * w
    re = integrate.quad(lambda t: fs.free_app(cfg, t).real, lo, hi, limit=200)[0]
    im = integrate.quad(lambda t: fs.free_app(cfg, t).imag, lo, hi, limit=200)[0]
    frac = abs(complex(re, im)) / (cfg.m / cfg.p)
    S, C = special.fresnel(3 / math.sqrt(math.pi))
    fresnel = abs(2 * math.sqrt(math.pi) * complex(C, S)) / math.sqrt(2 * math.pi)
    assert fresnel == pytest.approx(0.9116, abs=1e-4)
    assert frac == pytest.approx(fresnel, rel=0.01)


def test_tunnel_example_value():
    cfg = FreeParticleConfig(x=2.0, V=1.5, E=1.0)
    res = fs.tunnel_ergodic(cfg, 1.0)
    assert res.claimed == pytest.approx(math.exp(-4), rel=1e-12)
    assert res.numeric == pytest.approx(1.8316e-2, rel=0.02)
    assert res.rel_error < 1e-6
    # the integral equals -i times the real closed form
    assert abs(res.integral / res.claimed + 1j) < 1e-6


def test_tunnel_zero_length_and_suppression_scaling():
    base = fs.tunnel_ergodic(FreeParticleConfig(x=0.0, V=1.5, E=1.0), 1.0)
    assert base.numeric / (1.0 / FreeParticleConfig(V=1.5, E=1.0).kappa) == pytest.approx(1.0, abs=1e-8)
    one = fs.tunnel_ergodic(FreeParticleConfig(x=1.0, V=1.5, E=1.0), 1.0).numeric / base.numeric
    two = fs.tunnel_ergodic(FreeParticleConfig(x=2.0, V=1.5, E=1.0), 1.0).numeric / base.numeric
    assert two == pytest.approx(one ** 2, rel=1e-6)


def test_tunnel_tolerance_stability():
    cfg = FreeParticleConfig(x=2.0, V=1.5, E=1.0)
    a = fs.tunnel_ergodic(cfg, 1.0, rtol=1e-10).numeric
    b = fs.tunnel_ergodic(cfg, 1.0, rtol=5e-11).numeric
    assert abs(a - b) / a < 1e-3


def test_tunnel_static_factor_split():
    cfg = FreeParticleConfig(x=2.0, V=1.5, E=1.0)
    full, _ = fs.tunnel_time_integral(cfg)
    bare, _ = fs.tunnel_time_integral(cfg, include_static=False)
    assert abs(full - bare * math.exp(-cfg.kappa * 2.0)) < 1e-14


def test_not_tunneling():
    with pytest.raises(NotTunneling):
        fs.tunnel_ergodic(FreeParticleConfig(x=1.0, V=1.0, E=2.0), 1.0)


def test_free_weak_energy_is_log_derivative():
    cfg = FreeParticleConfig(m=1.7, p=2.0, x=9.0, hbar=0.6)
    t = np.linspace(1.0, 10.0, 19)
    h = 1e-5
    dlog = (np.log(_propagator(cfg, t + h)) - np.log(_propagator(cfg, t - h))) / (2 * h)
    np.testing.assert_allclose(fs.free_weak_energy(cfg, t).values, 1j * cfg.hbar * dlog, rtol=1e-7)


def test_free_weak_energy_crosses_at_arrival():
    cfg = FreeParticleConfig(p=2.0, x=10.0)
    w = fs.free_weak_energy(cfg, [cfg.t_c]).values[0]
    assert w.real == pytest.approx(cfg.E_p, rel=1e-14)


def test_tunnel_weak_energy_stays_above_energy():
    cfg = FreeParticleConfig(x=2.0, V=1.5, E=1.0)
    w = fs.tunnel_weak_energy(cfg, np.geomspace(1e-3, 1e3, 100)).values
    assert np.all(w.real > cfg.E)


def test_free_phase_hand_values():
    cfg = FreeParticleConfig(p=1.0, x=5.0)
    assert fs.free_phase(cfg, 4.0) == pytest.approx(0.125 - math.pi / 4, abs=1e-15)
    # classical point: quadratic term vanishes
    assert fs.free_phase(cfg, cfg.t_c) == pytest.approx(-math.pi / 4, abs=1e-15)
    # modulus independent of x
    other = FreeParticleConfig(p=1.0, x=-17.0)
    assert abs(fs.free_app(cfg, 3.0)) == pytest.approx(abs(fs.free_app(other, 3.0)), rel=1e-15)


def test_action_split_zero_length():
    d = fs.free_action_split(FreeParticleConfig(p=2.0, x=0.0, hbar=0.3), 1.7)
    assert d.S_E == 0.0
    assert d.S_t == pytest.approx(-0.3 * math.pi / 4)


def test_stationary_width_hand_values():
    assert fs.stationary_width(FreeParticleConfig(p=1.0, x=1.0)) == pytest.approx(1.0)
    w1 = fs.stationary_width(FreeParticleConfig(p=1.3, x=2.0))
    w4 = fs.stationary_width(FreeParticleConfig(p=1.3, x=8.0))
    assert w4 == pytest.approx(2 * w1, rel=1e-15)


def test_window_average_scaling_and_phase():
    cfg = FreeParticleConfig(p=4.0, x=4000.0)
    r1, r2 = fs.partial_ergodic_free(cfg, 600.0), fs.partial_ergodic_free(cfg, 1200.0)
    assert r2.claimed == pytest.approx(r1.claimed / 2)
    for r in (r1, r2):
        assert r.rel_error < 0.02
        assert abs(r.integral.imag) < 0.02 * abs(r.integral)


def test_tunnel_app_modulus():
    cfg = FreeParticleConfig(x=2.0, V=1.5, E=1.0)
    t = np.array([0.5, 2.0, 9.0])
    np.testing.assert_allclose(np.abs(fs.tunnel_app(cfg, t)),
                               np.sqrt(1 / (2 * math.pi * t)) * math.exp(-2.0), rtol=1e-14)
    flat = FreeParticleConfig(x=0.0, V=1.5, E=1.0)
    np.testing.assert_allclose(np.abs(fs.tunnel_app(flat, t)), np.sqrt(1 / (2 * math.pi * t)), rtol=1e-14)
    mods = [abs(fs.tunnel_app(FreeParticleConfig(x=L, V=1.5, E=1.0), 1.0)) for L in (0.5, 1, 2, 4)]
    assert all(b < a for a, b in zip(mods, mods[1:]))
    with pytest.raises(NotTunneling):
        fs.tunnel_app(FreeParticleConfig(x=1.0, V=1.0, E=1.0), 1.0)
