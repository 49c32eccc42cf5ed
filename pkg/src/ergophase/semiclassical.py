"""Classical-limit diagnostics for action phase probabilities.

Arrival times from the condition Re H(b,a,t) = E_n, finite-difference time
estimates from the energy dependence of S_E, Gaussian coarse graining in
energy, and the Legendre relation between S_t and S_E. Nothing here decides
whether a system is "classical"; residuals are returned to the caller.
"""

import enum
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import bisect

from .errors import DegenerateEnergies, NoCrossing, UnmatchedPairs

__all__ = ['ArrivalEstimate', 'Flat', 'classical_arrival', 'discrete_time_estimate',
           'unwrap_actions', 'coarse_grain_energy', 'legendre_check']


class Flat(enum.Enum):
    """Returned by ``classical_arrival`` when Re H equals E_n on the whole grid."""

    EVERYWHERE = 'flat'


@dataclass(frozen=True)
class ArrivalEstimate:
    t_classical: float
    method: str
    residual: float


def classical_arrival(weak, E_n, flat_tol=1e-9, evaluate=None):
    """Times where Re H(b,a,t) crosses E_n.

    Sign changes of Re H - E_n on the grid are refined by bisection on a cubic
    spline through the series, to a resolution of 1e-3 grid steps. If
    ``evaluate`` is given (a callable t -> complex weak value), it replaces
    the spline for both the refinement and the reported residual.

    Returns
    -------
    list of ArrivalEstimate, or ``Flat.EVERYWHERE`` if |Re H - E_n| stays
    below ``flat_tol`` on the grid.

    Raises
    ------
    NoCrossing
        If Re H - E_n never changes sign (no classical connection).
    """
    t = weak.times
    f = weak.values.real - E_n
    if np.all(np.abs(f) <= flat_tol * max(1.0, abs(E_n))):
        return Flat.EVERYWHERE
    if evaluate is None:
        spline = CubicSpline(t, weak.values.real)
        g = lambda s: float(spline(s)) - E_n
    else:
        g = lambda s: complex(evaluate(s)).real - E_n
    dt = float(np.min(np.diff(t)))
    out = []
    for i in range(len(t) - 1):
        if f[i] == 0:
            root = t[i]
        elif f[i] * f[i + 1] < 0:
            root = bisect(g, t[i], t[i + 1], xtol=dt * 1e-3)
        else:
            continue
        out.append(ArrivalEstimate(float(root), 'weak_value_crossing', abs(g(root))))
    if not out:
        raise NoCrossing(f"Re H - E_n keeps the sign of {np.sign(f[0]):+.0f} on "
                         f"[{t[0]}, {t[-1]}]")
    return out


def discrete_time_estimate(S_E_n, S_E_m, E_n, E_m):
    """t_nm = (S_E(E_n) - S_E(E_m)) / (E_n - E_m).

    Both actions must be on the same branch; see ``unwrap_actions``.
    """
    if E_n == E_m:
        raise DegenerateEnergies("t_nm needs two different energies")
    return (S_E_n - S_E_m) / (E_n - E_m)


def unwrap_actions(actions, hbar=1.0):
    """Nearest-branch continuation: add the 2 pi hbar multiple minimizing each jump.

    Fails silently when the true action changes by more than pi hbar between
    neighbouring energies, so sparse energy grids need care.
    """
    return hbar * np.unwrap(np.asarray(actions, dtype=float) / hbar)


def coarse_grain_energy(values, energies, delta_E):
    """Gaussian smoothing of P(n|a,b) along the energy axis.

    Output n is sum_m w_nm P(m) with w_nm proportional to
    exp(-(E_n - E_m)^2 / 2 delta_E^2) and normalized over m, so a constant
    distribution is unchanged. Contributions whose action phase varies
    quickly in energy cancel.
    """
    if not delta_E > 0:
        raise ValueError("delta_E must be positive")
    P = np.asarray(values, dtype=complex)
    E = np.asarray(energies, dtype=float)
    if P.shape != E.shape:
        raise ValueError("values and energies differ in length")
    d = (E[:, None] - E[None, :]) / delta_E
    w = np.exp(-0.5 * d * d)
    w /= w.sum(axis=1, keepdims=True)
    return w @ P


def _lookup(series, x, name):
    xs, ys = np.asarray(series, dtype=float).T
    order = np.argsort(xs)
    xs, ys = xs[order], ys[order]
    if np.any((x < xs[0]) | (x > xs[-1])):
        raise UnmatchedPairs(f"{name} value outside the tabulated range "
                             f"[{xs[0]}, {xs[-1]}]")
    if len(xs) >= 4:
        return CubicSpline(xs, ys)(x)
    if len(xs) == 1:
        if np.any(x != xs[0]):
            raise UnmatchedPairs(f"{name} value not tabulated")
        return np.full(np.shape(x), ys[0])
    return np.interp(x, xs, ys)


def legendre_check(S_t_series, S_E_series, pairs):
    """max |S_E(E) - (S_t(t) + E t)| over matched (t, E) pairs.

    The series are (t, S_t) and (E, S_E) tables, interpolated by cubic
    splines when they hold at least four points. In the classical regime the
    result is small compared with hbar up to a constant offset.
    """
    pairs = np.atleast_2d(np.asarray(pairs, dtype=float))
    if pairs.shape[1] != 2 or pairs.shape[0] == 0:
        raise UnmatchedPairs("pairs must be a non-empty list of (t, E)")
    t, E = pairs.T
    S_t = _lookup(S_t_series, t, 'time')
    S_E = _lookup(S_E_series, E, 'energy')
    return float(np.max(np.abs(S_E - (S_t + E * t))))
