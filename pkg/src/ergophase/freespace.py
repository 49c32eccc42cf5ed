"""Closed-form action phase probabilities of a free particle.

Covers propagation with momentum ``p`` from ``x0`` to ``x`` and tunneling
through a flat barrier of height ``V`` at energy ``E < V``. Every closed form
that involves a time integral has a quadrature counterpart here, so the two
can be compared directly.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .app import ActionDecomposition, WeakValueSeries, action_phase
from .errors import (InvalidGeometry, NonpositiveTime, NotTunneling,
                     TailNotConverged, ValidationError, WidthTooLarge,
                     WindowCrossesZero)
from .quadrature import fourier_tail, oscillatory_quad

__all__ = ['FreeParticleConfig', 'ErgodicIntegral', 'free_app', 'free_action_split',
           'free_phase', 'partial_ergodic_free', 'stationary_width', 'tunnel_app',
           'tunnel_ergodic', 'tunnel_time_integral', 'free_weak_energy',
           'tunnel_weak_energy']

MAX_WIDTH_RATIO = 0.05


@dataclass(frozen=True)
class FreeParticleConfig:
    """Parameters of the free particle problem (consistent units, explicit hbar)."""

    m: float = 1.0
    p: float = None
    x0: float = 0.0
    x: float = 0.0
    hbar: float = 1.0
    V: float = None
    E: float = None

    def __post_init__(self):
        if not self.m > 0:
            raise ValidationError("mass must be positive")
        if not self.hbar > 0:
            raise ValidationError("hbar must be positive")

    @property
    def L(self):
        return self.x - self.x0

    @property
    def E_p(self):
        return self._momentum() ** 2 / (2 * self.m)

    @property
    def t_c(self):
        """Classical arrival time m L / p."""
        return self.m * self.L / self._momentum()

    @property
    def kappa(self):
        """Decay constant sqrt(2 m (V - E)) of the tunneling branch."""
        if self.V is None or self.E is None:
            raise ValidationError("tunneling needs both V and E")
        if not self.V > self.E:
            raise NotTunneling(f"V = {self.V} does not exceed E = {self.E}")
        return math.sqrt(2 * self.m * (self.V - self.E))

    def _momentum(self):
        if self.p is None or self.p == 0:
            raise ValidationError("propagating branch needs a nonzero momentum")
        return self.p


@dataclass(frozen=True)
class ErgodicIntegral:
    """A time integral evaluated numerically next to its closed form.

    ``integral`` is the complex quadrature result (already divided by the
    window length), ``numeric`` the real number reported next to ``claimed``
    and ``rel_error`` the relative distance used for acceptance.
    """

    numeric: float
    claimed: float
    integral: complex
    abserr: float
    rel_error: float


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise NonpositiveTime("time must be positive")
    return t


def free_phase(cfg, t):
    """Arg of the free action phase probability, unwrapped (radians)."""
    t = _check_time(t)
    v = cfg._momentum() / cfg.m
    return cfg.m / (2 * cfg.hbar * t) * (cfg.L - v * t) ** 2 - math.pi / 4


def free_app(cfg, t):
    """P(x(t)|x0,p) = sqrt(m / 2 pi hbar t) exp(i m (x - x0 - p t/m)^2 / 2 hbar t - i pi/4)."""
    t = _check_time(t)
    val = np.sqrt(cfg.m / (2 * math.pi * cfg.hbar * t)) * np.exp(1j * free_phase(cfg, t))
    return val if val.ndim else complex(val)


def free_action_split(cfg, t):
    """S_t = m L^2 / 2t - hbar pi/4, E_p t, and S_E = sqrt(2 m E_p) L."""
    t = float(_check_time(t))
    p = cfg._momentum()
    if p < 0:
        raise ValidationError("action split assumes p > 0")
    return ActionDecomposition(
        S_t=cfg.m * cfg.L ** 2 / (2 * t) - cfg.hbar * math.pi / 4,
        E_n_t=cfg.E_p * t,
        S_E=math.sqrt(2 * cfg.m * cfg.E_p) * cfg.L,
        total=action_phase(free_app(cfg, t), cfg.hbar),
        hbar=cfg.hbar,
    )


def _free_scalar(cfg):
    """Scalar phase and integrand closures for the quadrature (no array overhead)."""
    m, hb, L, v = cfg.m, cfg.hbar, cfg.L, cfg._momentum() / cfg.m
    c = m / (2 * math.pi * hb)

    def phase(t):
        return m / (2 * hb * t) * (L - v * t) ** 2 - math.pi / 4

    def f(t):
        return math.sqrt(c / t) * cmath.exp(1j * phase(t))
    return f, phase


def stationary_width(cfg):
    """Delta t = (m/p) sqrt(hbar L / p), the width of the stationary-phase region."""
    p = cfg.p
    if p is None or p <= 0 or cfg.L <= 0:
        raise InvalidGeometry("stationary width needs p > 0 and x > x0")
    return cfg.m / p * math.sqrt(cfg.hbar * cfg.L / p)


def partial_ergodic_free(cfg, T, rtol=1e-9, enforce_width=True):
    """Window average (1/T) int_{t_c - T/2}^{t_c + T/2} P(x(t)|x0,p) dt.

    The closed form is m / (T p). ``numeric`` is the real part of the window
    average; ``rel_error`` measures the full complex distance
    |average - m/(T p)| / (m/(T p)).

    Raises
    ------
    WindowCrossesZero
        If the window reaches t <= 0.
    WidthTooLarge
        If Delta t / T exceeds 0.05 (skipped with ``enforce_width=False``).
    """
    tc = cfg.t_c
    lo, hi = tc - T / 2, tc + T / 2
    if lo <= 0:
        raise WindowCrossesZero(f"window starts at t = {lo!r}")
    width = stationary_width(cfg)
    if enforce_width and width / T > MAX_WIDTH_RATIO:
        raise WidthTooLarge(f"Delta t / T = {width / T:.4f} > {MAX_WIDTH_RATIO}")
    f, phase = _free_scalar(cfg)
    val, err = oscillatory_quad(f, lo, hi, phase, rtol=rtol)
    avg = val / T
    claimed = cfg.m / (T * cfg.p)
    return ErgodicIntegral(avg.real, claimed, avg, err / T, abs(avg - claimed) / claimed)


def tunnel_app(cfg, t):
    """Action phase probability below a barrier of height V over length L.

    sqrt(m / 2 pi hbar t) exp(i m L^2 / 2 hbar t - i (V - E) t / hbar - i pi/4)
    times the static suppression exp(-sqrt(2 m (V - E)) L / hbar).
    """
    t = _check_time(t)
    k = cfg.kappa
    phase = cfg.m * cfg.L ** 2 / (2 * cfg.hbar * t) - (cfg.V - cfg.E) * t / cfg.hbar - math.pi / 4
    val = np.sqrt(cfg.m / (2 * math.pi * cfg.hbar * t)) * np.exp(1j * phase) \
        * math.exp(-k * abs(cfg.L) / cfg.hbar)
    return val if val.ndim else complex(val)


def tunnel_time_integral(cfg, rtol=1e-10, include_static=True):
    """int_0^inf of the tunneling action phase probability over t.

    The integrand oscillates without bound near t = 0 and decays only like
    t^(-1/2) at large t. The range is split at t*/4 and 4 t*, where
    t* = sqrt(alpha / beta) balances the two phase rates:

    * [0, t*/4] is mapped by s = 1/t onto a Fourier integral on [4/t*, inf);
      for L = 0 the substitution u = sqrt(t) is used instead,
    * [t*/4, 4 t*] is integrated on phase-resolved panels,
    * [4 t*, inf) is a Fourier integral.

    Both Fourier integrals use QUADPACK QAWF.

    Returns
    -------
    value : complex
    abserr : float
    """
    k = cfg.kappa
    hb, m, L = cfg.hbar, cfg.m, abs(cfg.L)
    alpha = m * L ** 2 / (2 * hb)
    beta = (cfg.V - cfg.E) / hb
    pref = math.sqrt(m / (2 * math.pi * hb)) * complex(math.cos(math.pi / 4), -math.sin(math.pi / 4))
    scale = math.sqrt(math.pi / beta) * math.exp(-k * L / hb)
    atol = rtol * scale

    if alpha > 0:
        tstar = math.sqrt(alpha / beta)
        t1, t2 = tstar / 4, 4 * tstar
        head, e0 = fourier_tail(lambda s: s ** -1.5 * np.exp(-1j * beta / s), 1 / t1, alpha, atol)
        body, e1 = oscillatory_quad(lambda t: t ** -0.5 * np.exp(1j * (alpha / t - beta * t)),
                                    t1, t2, lambda t: alpha / t - beta * t, rtol=rtol)
    else:
        t2 = 4 / beta
        head, e0 = 0j, 0.0
        body, e1 = oscillatory_quad(lambda u: 2 * np.exp(-1j * beta * u * u),
                                    0.0, math.sqrt(t2), lambda u: -beta * u * u, rtol=rtol)
    tail, e2 = fourier_tail(lambda t: t ** -0.5 * np.exp(1j * alpha / t), t2, -beta, atol)
    total = head + body + tail
    err = e0 + e1 + e2
    if e0 + e2 > 1e-4 * abs(total):
        raise TailNotConverged(f"Fourier tail error {e0 + e2:.3e} vs integral {abs(total):.3e}")
    value = pref * total
    if include_static:
        value *= math.exp(-k * L / hb)
    return complex(value), abs(pref) * err


def tunnel_ergodic(cfg, T, rtol=1e-10):
    """(1/T) int_0^inf tunnel_app dt against m / (T sqrt(2m(V-E))) exp(-2 sqrt(2m(V-E)) L / hbar).

    The quadrature result carries an overall phase factor -i; ``numeric`` is
    its modulus.
    """
    k = cfg.kappa
    val, err = tunnel_time_integral(cfg, rtol)
    claimed = cfg.m / (T * k) * math.exp(-2 * k * abs(cfg.L) / cfg.hbar)
    numeric = abs(val) / T
    return ErgodicIntegral(numeric, claimed, val / T, err / T, abs(numeric - claimed) / claimed)


def free_weak_energy(cfg, times):
    """Weak energy of the free propagator, m L^2 / 2t^2 - i hbar / 2t."""
    t = _check_time(times)
    return WeakValueSeries(t, cfg.m * cfg.L ** 2 / (2 * t ** 2) - 1j * cfg.hbar / (2 * t))


def tunnel_weak_energy(cfg, times):
    """Weak energy implied by the tunneling series, V + m L^2 / 2t^2 - i hbar / 2t."""
    t = _check_time(times)
    cfg.kappa  # validates V > E
    return WeakValueSeries(t, cfg.V + cfg.m * cfg.L ** 2 / (2 * t ** 2) - 1j * cfg.hbar / (2 * t))
