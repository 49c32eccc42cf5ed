"""Invariant suite run by ``ergophase check``.

Every invariant of every module is evaluated and reported with its measured
residual next to the tolerance. Model-dependent invariants run on the given
model; the rest (uncertainty, semiclassical, freespace) run on fixed
reference problems, so each report is complete on its own.

Tolerances default to ``DEFAULT_TOLERANCES`` and can be overridden from a
JSON file (``load_tolerances``).
"""

import dataclasses
import json
import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import app, ergodic, freespace, semiclassical
from .errors import ErgophaseError, SingularCondition, ValidationError
from .hilbert import eigendecompose_hermitian, propagator
from .models import ladder

__all__ = ['DEFAULT_TOLERANCES', 'CheckResult', 'load_tolerances', 'run_checks',
           'format_report']

DEFAULT_TOLERANCES = {
    'eps_sing': 1e-12,
    'unitarity': 1e-10,
    'spectral_exactness': 1e-10,
    'reconstruction': 1e-10,
    'normalization': 1e-10,
    'gauge': 1e-12,
    'mixture_law': 1e-10,
    'conjugation': 1e-12,
    'unitary_identity': 1e-10,
    'second_order_low': 3.5,
    'second_order_high': 4.5,
    'ergodic_law': 1e-12,
    'a_independence': 1e-12,
    'ergodic_rate_low': 1.6,
    'ergodic_rate_high': 2.4,
    'dephasing_factor': 2.0,
    'dephasing_projector': 1e-12,
    'gaussian_minimality': 1e-4,
    'grid_independence': 1e-5,
    'coarse_grain_slack': 0.0,
    'free_phase_identity': 1e-9,
    'stationary_fraction': 0.99,
    'tunnel_split': 0.03,
    'free_ergodic': 0.02,
    'tunnel_ergodic': 0.02,
}


@dataclass(frozen=True)
class CheckResult:
    module: str
    name: str
    measured: float
    tolerance: object
    passed: bool
    detail: str = ''


def load_tolerances(path=None, overrides=None):
    """Defaults updated from a JSON object of ``{name: value}``."""
    tol = dict(DEFAULT_TOLERANCES)
    extra = {}
    if path is not None:
        from .io import read_json
        extra = read_json(path)
        if not isinstance(extra, dict):
            raise ValidationError("tolerance file must hold a JSON object")
    extra.update(overrides or {})
    unknown = sorted(set(extra) - set(tol))
    if unknown:
        raise ValidationError(f"unknown tolerance names: {', '.join(unknown)}")
    for k, v in extra.items():
        if not isinstance(v, (int, float)):
            raise ValidationError(f"tolerance {k!r} must be a number")
        tol[k] = float(v)
    return tol


def _rel(x, y):
    x, y = np.asarray(x), np.asarray(y)
    return float(np.max(np.abs(x - y) / np.maximum(1.0, np.abs(y)))) if x.size else 0.0


def _leq(module, name, measured, tol, detail=''):
    return CheckResult(module, name, float(measured), tol, bool(measured <= tol), detail)


def _geq(module, name, measured, tol, detail=''):
    return CheckResult(module, name, float(measured), tol, bool(measured >= tol), detail)


def _within(module, name, measured, lo, hi, detail=''):
    return CheckResult(module, name, float(measured), [lo, hi], bool(lo <= measured <= hi), detail)


# --------------------------------------------------------------------- helpers

def _pairs(model):
    names = sorted(model.bases)
    return list(permutations(names, 2))


def _valid_ab(A, B, eps):
    ba = B.matrix.conj().T @ A.matrix         # ba[b, a] = <b|a>
    return [(a, b) for a in range(A.dim) for b in range(B.dim) if abs(ba[b, a]) > eps]


def _valid_an(A, spec, eps):
    na = spec.vectors.conj().T @ A.matrix     # na[n, a] = <n|a>
    return [(a, n) for a in range(A.dim) for n in range(spec.dim) if abs(na[n, a]) > eps]


def _subset(items, k):
    """At most ``k`` items spread evenly (deterministic)."""
    if len(items) <= k:
        return list(items)
    idx = np.linspace(0, len(items) - 1, k).round().astype(int)
    return [items[i] for i in idx]


def _time_scale(spec, hbar):
    spread = float(spec.eigenvalues[-1] - spec.eigenvalues[0])
    return hbar / spread if spread > 0 else 1.0


def _min_gap(spec):
    levels = [spec.eigenvalues[g[0]] for g in spec.degeneracy_groups]
    gaps = np.diff(levels)
    return float(gaps.min()) if gaps.size else None


def _phases(rng, k):
    return np.exp(2j * np.pi * rng.random(k))


# -------------------------------------------------------------------- hilbert

def check_hilbert(model, tol):
    spec, hb = model.spectrum, model.hbar
    ts = _time_scale(spec, hb) * np.array([0.1, 1.0, 10.0, 1000.0])
    I = np.eye(spec.dim)
    unit = max(float(np.max(np.abs(propagator(spec, t, hb) @ propagator(spec, t, hb).conj().T - I)))
               for t in ts)
    exact = 0.0
    for t in ts:
        U = propagator(spec, t, hb)
        expected = spec.vectors * np.exp(-1j * spec.eigenvalues * t / hb)[None, :]
        exact = max(exact, float(np.max(np.abs(U @ spec.vectors - expected))))
    s1 = eigendecompose_hermitian(model.hamiltonian, spec.eps_deg)
    s2 = eigendecompose_hermitian(model.hamiltonian, spec.eps_deg)
    same = np.array_equal(s1.vectors, s2.vectors) and np.array_equal(s1.eigenvalues, s2.eigenvalues)
    recon = float(np.max(np.abs(s1.reconstruct() - model.hamiltonian)))
    return [
        _leq('hilbert', 'unitarity max|U U^dagger - 1|', unit, tol['unitarity']),
        _leq('hilbert', 'spectral exactness U|n> = exp(-iE_n t)|n>', exact, tol['spectral_exactness']),
        _leq('hilbert', 'phase-fixing determinism (0 = bit-identical)', 0.0 if same else 1.0, 0.0),
        _leq('hilbert', 'eigendecomposition reconstruction', recon, tol['reconstruction']),
    ]


# ------------------------------------------------------------------------ app

def check_app(model, tol, rng):
    spec, hb, eps = model.spectrum, model.hbar, tol['eps_sing']
    ts = _time_scale(spec, hb) * np.array([0.0, 0.37, 1.9, 7.3])
    out = []
    norm_kd = norm_cond = norm_td = 0.0
    gauge = mix = conj = uni = 0.0
    for nameA, nameB in _pairs(model):
        A, B = model.bases[nameA], model.bases[nameB]
        pa, pb, pn = _phases(rng, A.dim), _phases(rng, B.dim), _phases(rng, spec.dim)
        A2, B2 = A.regauged(pa), B.regauged(pb)
        spec2 = dataclasses.replace(spec, basis=spec.basis.regauged(pn))
        for psi in model.states.values():
            t1 = app.kd_joint(psi, A, B)
            t2 = app.kd_joint(psi.with_phase(np.exp(0.7j)), A2, B2)
            norm_kd = max(norm_kd, t1.normalization_error())
            gauge = max(gauge, _rel(t2.values, t1.values))
        for a, b in _valid_ab(A, B, eps):
            p = app.conditional_app(A, B, spec, a, b, eps)
            norm_cond = max(norm_cond, abs(p.sum() - 1))
            gauge = max(gauge, _rel(app.conditional_app(A2, B2, spec2, a, b, eps), p))
            q = app.conditional_app(B, A, spec, b, a, eps)
            conj = max(conj, _rel(q, p.conj()))
        for a, b in _subset(_valid_ab(A, B, eps), 6):
            S = rng.uniform(-10, 10, spec.dim) * hb
            lhs, rhs = app.unitary_decomposition_check(A, B, None, spec, S, a, b, hb, eps)
            uni = max(uni, abs(lhs - rhs))
        an = _valid_an(A, spec, eps)
        for a in sorted({a for a, _ in an})[:4]:
            born_ba = np.abs(B.matrix.conj().T @ A.matrix[:, a]) ** 2
            na = np.abs(spec.vectors.conj().T @ A.matrix[:, a]) ** 2
            acc = np.zeros(B.dim, dtype=complex)
            for n in [n for aa, n in an if aa == a]:
                tab = app.time_dependent_app(A, B, spec, a, n, ts, hb, eps)
                norm_td = max(norm_td, tab.normalization_error())
                tab2 = app.time_dependent_app(A2, B2, spec2, a, n, ts, hb, eps)
                gauge = max(gauge, _rel(tab2.values, tab.values))
                acc += tab.values[:, 0] * na[n]
            mix = max(mix, float(np.max(np.abs(acc - born_ba))))
            state, state2 = A[a], A2[a]
            for b in range(B.dim):
                try:
                    w1 = app.weak_energy_series(B, b, state, spec, ts, hb, eps)
                except SingularCondition:
                    continue
                w2 = app.weak_energy_series(B2, b, state2, spec2, ts, hb, eps)
                gauge = max(gauge, _rel(w2.values, w1.values))
    out += [
        _leq('app', 'normalization sum rho(a,b) = 1', norm_kd, tol['normalization']),
        _leq('app', 'normalization sum_n P(n|a,b) = 1', norm_cond, tol['normalization']),
        _leq('app', 'normalization sum_b P(b(t)|a,n) = 1', norm_td, tol['normalization']),
        _leq('app', 'gauge invariance (kd, conditional, time series, weak energy)', gauge, tol['gauge'],
             'relative to max(1, |value|)'),
        _leq('app', 'mixture law sum_n P(b(0)|a,n)|<n|a>|^2 = |<b|a>|^2', mix, tol['mixture_law']),
        _leq('app', 'conjugation P(n|b,a) = conj P(n|a,b)', conj, tol['conjugation']),
        _leq('app', 'unitary decomposition identity', uni, tol['unitary_identity']),
    ]
    out.append(_phase_order(model, tol))
    return out


def _phase_order(model, tol):
    """Halving dt must divide the central-difference residual by about four."""
    spec, hb, eps = model.spectrum, model.hbar, tol['eps_sing']
    nameA, nameB, a, na = _pick_a(model, eps)
    A, B = model.bases[nameA], model.bases[nameB]
    n = int(np.argmax(na[:, a]))
    b = int(np.argmax(np.abs(B.matrix.conj().T @ A.matrix[:, a])))
    if na[n, a] <= eps:
        return CheckResult('app', 'phase evolution second order', math.nan, None, True,
                           'skipped: no nonsingular (a, n)')
    T = 0.5 * _time_scale(spec, hb)
    res = []
    for k in (40, 80):
        times = np.linspace(0.0, T, k + 1)
        tab = app.time_dependent_app(A, B, spec, a, n, times, hb, eps)
        weak = app.weak_energy_series(B, b, A[a], spec, times, hb, eps)
        res.append(app.phase_evolution_check(tab, weak, spec.eigenvalues[n], hb, b=b))
    return _within('app', 'phase evolution residual ratio (dt halved)', res[0] / res[1],
                   tol['second_order_low'], tol['second_order_high'],
                   f"residuals {res[0]:.3e}, {res[1]:.3e}")


# -------------------------------------------------------------------- ergodic

def check_ergodic(model, tol):
    spec, hb, eps = model.spectrum, model.hbar, tol['eps_sing']
    im_max = re_dev = a_dep = 0.0
    for nameA, nameB in _pairs(model):
        A, B = model.bases[nameA], model.bases[nameB]
        born = np.abs(B.matrix.conj().T @ spec.vectors) ** 2          # [b, n]
        ab = _valid_ab(A, B, eps)
        an = set(_valid_an(A, spec, eps))
        t0 = {}
        for a, n in an:
            t0[a, n] = app.time_dependent_app(A, B, spec, a, n, [0.0], hb, eps).values[:, 0]
        prods = {}
        for a, b in ab:
            p = app.conditional_app(A, B, spec, a, b, eps)
            for n in range(spec.dim):
                if (a, n) not in an:
                    continue
                v = p[n] * t0[a, n][b]
                im_max = max(im_max, abs(v.imag))
                re_dev = max(re_dev, abs(v.real - born[b, n]))
                prods.setdefault((b, n), []).append(v)
        for vals in prods.values():
            a_dep = max(a_dep, float(np.max(np.abs(np.array(vals) - vals[0]))))
    out = [
        _leq('ergodic', 'ergodic law: max |Im P(n|a,b) P(b|a,n)|', im_max, tol['ergodic_law']),
        _leq('ergodic', 'ergodic law: max |Re - |<b|n>|^2|', re_dev, tol['ergodic_law']),
        _leq('ergodic', 'ergodic law independent of a', a_dep, tol['a_independence']),
    ]
    out += _ergodic_rate(model, tol)
    out += _dephasing(model, tol)
    out += check_uncertainty(tol)
    return out


def _pick_a(model, eps):
    """Basis A and vector a with the largest min_n |<n|a>|, and a partner basis B.

    B is the basis (other than A, preferably not the eigenbasis) whose
    overlaps with a are largest in the worst case.
    """
    spec = model.spectrum
    best = None
    for name in sorted(model.bases):
        na = np.abs(spec.vectors.conj().T @ model.bases[name].matrix)
        a = int(np.argmax(na.min(axis=0)))
        if best is None or na[:, a].min() > best[2][:, best[1]].min() + 1e-12:
            best = (name, a, na)
    nameA, a, na = best
    va = model.bases[nameA].matrix[:, a]
    others = [n for n in sorted(model.bases) if n != nameA]
    others.sort(key=lambda n: (n == model.eigenbasis_name,
                               -np.abs(model.bases[n].matrix.conj().T @ va).min()))
    return nameA, others[0], a, na


def _ergodic_rate(model, tol):
    spec, hb, eps = model.spectrum, model.hbar, tol['eps_sing']
    gap = _min_gap(spec)
    name = 'ergodic numeric average O(1/T): envelope ratio T vs 2T'
    if gap is None:
        return [CheckResult('ergodic', name, math.nan, None, True, 'skipped: single level')]
    nameA, nameB, a, na = _pick_a(model, eps)
    A, B = model.bases[nameA], model.bases[nameB]
    n = int(np.argmax(na[:, a]))
    period = 2 * math.pi * hb / gap
    T = 50 * period
    spread = float(spec.eigenvalues[-1] - spec.eigenvalues[0])
    dt = min(math.pi * hb / (20 * spread), period / 64)
    gen = ergodic.app_series_generator(A, B, spec, a, n, hb, eps)
    times, avg = ergodic.running_average(gen, 2 * T + period, dt, hb)
    born = np.abs(B.matrix.conj().T @ spec.vectors[:, n]) ** 2
    r1 = ergodic.ergodic_residual_envelope(times, avg, born, T, period)
    r2 = ergodic.ergodic_residual_envelope(times, avg, born, 2 * T, period)
    return [_within('ergodic', name, r1 / r2, tol['ergodic_rate_low'], tol['ergodic_rate_high'],
                    f"T = {T:.6g}: residuals {r1:.3e}, {r2:.3e}")]


def _dephasing(model, tol):
    spec, hb, eps = model.spectrum, model.hbar, tol['eps_sing']
    out = []
    psi_list = list(model.states.values())
    if not psi_list:
        nameA, _, a, _ = _pick_a(model, eps)
        psi_list = [model.bases[nameA][a]]
    psi = psi_list[0]
    rho = ergodic.dephase(psi, spec).matrix
    if not spec.is_degenerate:
        c = np.abs(spec.vectors.conj().T @ psi.amplitudes) ** 2
        ref = (spec.vectors * c[None, :]) @ spec.vectors.conj().T
        out.append(_leq('ergodic', 'dephasing equals sum_n P(n|a) Pi_n',
                        float(np.max(np.abs(rho - ref))), tol['dephasing_projector']))
    const = ergodic.dephasing_constant(psi, spec, hb)
    gap = _min_gap(spec)
    if gap is None or const == 0:
        out.append(CheckResult('ergodic', 'dephasing vs long-time average', 0.0, None, True,
                               'state is stationary'))
        return out
    spread = float(spec.eigenvalues[-1] - spec.eigenvalues[0])
    dt = math.pi * hb / (40 * spread)
    worst = 0.0
    for T in (40 * 2 * math.pi * hb / gap, 80 * 2 * math.pi * hb / gap):
        num = ergodic.time_average_density(psi, spec, T, dt, hb)
        worst = max(worst, float(np.max(np.abs(num - rho))) / (const / T))
    out.append(_leq('ergodic', 'dephasing vs long-time average (in units of const/T)', worst,
                    tol['dephasing_factor']))
    return out


def check_uncertainty(tol, sigma=0.8, hbar=1.0):
    G = ergodic.RandomizationKernel.gaussian(sigma)
    U = ergodic.RandomizationKernel.uniform(sigma * math.sqrt(3))
    span = 12 * hbar / sigma
    grid = np.linspace(-span, span, 2001)
    fine = np.linspace(-span, span, 4001)
    g1 = ergodic.uncertainty_product(G, grid, hbar)
    g2 = ergodic.uncertainty_product(G, fine, hbar)
    u1 = ergodic.uncertainty_product(U, grid, hbar)
    u2 = ergodic.uncertainty_product(U, fine, hbar)
    target = 1 / math.sqrt(2)
    refine = max(abs(g1.product_over_hbar - g2.product_over_hbar) / g1.product_over_hbar,
                 abs(u1.product_over_hbar - u2.product_over_hbar) / u1.product_over_hbar)
    return [
        _leq('ergodic', 'gaussian kernel: |dE dt / hbar - 1/sqrt2| relative',
             abs(g1.product_over_hbar - target) / target, tol['gaussian_minimality']),
        CheckResult('ergodic', 'uniform kernel: dE dt / hbar > 1/sqrt2', u1.product_over_hbar,
                    target, bool(u1.product_over_hbar > target)),
        _leq('ergodic', 'uncertainty product under 2x grid refinement', refine,
             tol['grid_independence']),
    ]


# -------------------------------------------------------------- semiclassical

def check_semiclassical(tol):
    out = []
    cfg = freespace.FreeParticleConfig(p=3.0, x=20.0)
    E_n = cfg.E_p
    times = np.linspace(0.5 * cfg.t_c, 2.0 * cfg.t_c, 301)
    weak = freespace.free_weak_energy(cfg, times)
    ev = lambda t: freespace.free_weak_energy(cfg, [t]).values[0]
    cross = semiclassical.classical_arrival(weak, E_n, evaluate=ev)
    dt = times[1] - times[0]
    xtol = dt * 1e-3
    worst = 0.0
    for c in cross:
        t = c.t_classical
        h = 1e-4 * cfg.t_c
        dphi = (freespace.free_phase(cfg, t + h) - freespace.free_phase(cfg, t - h)) / (2 * h)
        dre = (ev(t + h).real - ev(t - h).real) / (2 * h)
        # allowed: bisection interval times the slope, plus the O(h^2) difference error
        allowed = xtol * abs(dre) + 1e-6 * abs(dre) * cfg.t_c
        worst = max(worst, abs(cfg.hbar * dphi) / allowed)
    out.append(_leq('semiclassical', 'stationarity at crossing (in units of allowed bound)',
                    worst, 1.0, f"{len(cross)} crossing(s), t_c = {cfg.t_c:.6g}"))

    lad = ladder(16)
    A, B = lad.bases['A'], lad.bases['B']
    p = app.conditional_app(A, B, lad.spectrum, 0, 3)
    norms = [float(np.abs(semiclassical.coarse_grain_energy(p, lad.spectrum.eigenvalues, d).imag).sum())
             for d in (0.5, 1.0, 2.0, 4.0)]
    rises = max(b - a for a, b in zip(norms, norms[1:]))
    out.append(_leq('semiclassical', 'coarse graining: Im L1 non-increasing in dE (max rise)',
                    rises, tol['coarse_grain_slack'],
                    'L1 norms ' + ', '.join(f"{v:.4g}" for v in norms)))

    E0 = cfg.E_p
    S_E = lambda E: math.sqrt(2 * cfg.m * E) * cfg.L
    exact = cfg.L * math.sqrt(cfg.m / (2 * E0))
    errs = []
    for h in (0.2, 0.1, 0.05):
        t_nm = semiclassical.discrete_time_estimate(S_E(E0 + h / 2), S_E(E0 - h / 2),
                                                    E0 + h / 2, E0 - h / 2)
        errs.append(abs(t_nm - exact))
    ratio = min(errs[0] / errs[1], errs[1] / errs[2])
    out.append(_within('semiclassical', 'Legendre duality: t_nm error ratio (spacing halved)',
                       ratio, tol['second_order_low'], tol['second_order_high'],
                       'errors ' + ', '.join(f"{e:.3e}" for e in errs)))
    return out


# ------------------------------------------------------------------ freespace

EQ37_FIXTURE = dict(p=4.0, x=4000.0, T=600.0)        # Delta t / T = 0.013
STATIONARY_FIXTURE = dict(p=2.0, x=400.0, T=150.0)   # Delta t / T = 0.047
TUNNEL_FIXTURE = dict(V=1.5, E=1.0, x=2.0, T=1.0)


def check_freespace(tol):
    out = []
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(200):
        cfg = freespace.FreeParticleConfig(m=rng.uniform(0.5, 2), p=rng.uniform(0.5, 5),
                                           x0=rng.uniform(-5, 5), x=rng.uniform(5, 50),
                                           hbar=rng.uniform(0.5, 2))
        t = rng.uniform(0.1, 3) * cfg.t_c
        worst = max(worst, freespace.free_action_split(cfg, t).residual() / cfg.hbar)
    out.append(_leq('freespace', 'phase decomposition identity (radians, 200 draws)', worst,
                    tol['free_phase_identity']))

    fx = STATIONARY_FIXTURE
    cfg = freespace.FreeParticleConfig(p=fx['p'], x=fx['x'])
    width = freespace.stationary_width(cfg)
    full = freespace.partial_ergodic_free(cfg, fx['T'])
    from .quadrature import oscillatory_quad
    f, phase = freespace._free_scalar(cfg)
    part, _ = oscillatory_quad(f, cfg.t_c - 3 * width, cfg.t_c + 3 * width, phase)
    frac = abs(part) / abs(full.integral * fx['T'])
    out.append(_geq('freespace', 'stationary phase: +-3 Delta t window / full window modulus',
                    frac, tol['stationary_fraction'], f"Delta t / T = {width / fx['T']:.4f}"))

    consts = []
    for L in (1.0, 2.0, 4.0):
        c = freespace.FreeParticleConfig(x=L, V=1.5, E=1.0)
        val, _ = freespace.tunnel_time_integral(c, include_static=False)
        consts.append(abs(val) * math.exp(c.kappa * L / c.hbar))
    spread = max(consts) / min(consts) - 1
    out.append(_leq('freespace', 'tunneling: time integral carries exp(-kappa L) (L sweep spread)',
                    spread, tol['tunnel_split']))

    fx = EQ37_FIXTURE
    r = freespace.partial_ergodic_free(freespace.FreeParticleConfig(p=fx['p'], x=fx['x']), fx['T'])
    out.append(_leq('freespace', 'window average vs m/(T p), relative', r.rel_error, tol['free_ergodic']))
    fx = TUNNEL_FIXTURE
    r = freespace.tunnel_ergodic(freespace.FreeParticleConfig(x=fx['x'], V=fx['V'], E=fx['E']), fx['T'])
    out.append(_leq('freespace', 'tunneling ergodic probability vs closed form, relative',
                    r.rel_error, tol['tunnel_ergodic']))
    return out


# ------------------------------------------------------------------------ cli

def check_serialization(model, tol):
    from .io import dumps
    nameA, nameB = _pairs(model)[0]
    A, B = model.bases[nameA], model.bases[nameB]
    psi = next(iter(model.states.values()), A[0])
    tab = app.kd_joint(psi, A, B)
    result = {'values': tab.values, 'labels': tab.axis_labels}
    text = dumps(result)
    back = json.loads(text)
    arr = np.asarray(back['values'])
    exact = np.array_equal(arr[..., 0], tab.values.real) and np.array_equal(arr[..., 1], tab.values.imag)
    again = dumps({'values': app.kd_joint(psi, A, B).values, 'labels': tab.axis_labels})
    return [
        _leq('cli', 'JSON round trip bit-exact (0 = exact)', 0.0 if exact else 1.0, 0.0),
        _leq('cli', 'deterministic output (0 = byte-identical)', 0.0 if again == text else 1.0, 0.0),
    ]


# ---------------------------------------------------------------------- suite

def _guard(module, name, fn, *args):
    try:
        return fn(*args)
    except ErgophaseError as exc:
        return [CheckResult(module, name, math.nan, None, False, f"{exc.code}: {exc}")]


def run_checks(model, tol=None, seed=0):
    """Run every invariant; returns a list of ``CheckResult``."""
    tol = dict(DEFAULT_TOLERANCES if tol is None else tol)
    rng = np.random.default_rng(seed)
    results = []
    results += _guard('hilbert', 'hilbert invariants', check_hilbert, model, tol)
    results += _guard('app', 'app invariants', check_app, model, tol, rng)
    results += _guard('ergodic', 'ergodic invariants', check_ergodic, model, tol)
    results += _guard('semiclassical', 'semiclassical invariants', check_semiclassical, tol)
    results += _guard('freespace', 'freespace invariants', check_freespace, tol)
    results += _guard('cli', 'serialization invariants', check_serialization, model, tol)
    return results


def format_report(results):
    lines = []
    for r in results:
        mark = 'PASS' if r.passed else 'FAIL'
        tol = r.tolerance if not isinstance(r.tolerance, float) else f"{r.tolerance:.3g}"
        line = f"{mark}  [{r.module}] {r.name}: measured {r.measured:.6g} (tolerance {tol})"
        if r.detail:
            line += f"  -- {r.detail}"
        lines.append(line)
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} invariants hold")
    return '\n'.join(lines)
