"""Full and partial ergodic averaging.

The infinite time average of the dynamics is evaluated analytically from the
spectrum (dephasing onto eigenspaces, the product law P(n|a,b) P(b|a,n)).
Finite time averages and kernel convolutions are evaluated numerically and
serve as independent checks of the analytic results.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .app import (EPS_SING, ComplexProbTable, _require, conditional_app,
                  time_dependent_app)
from .errors import (DegenerateUpdate, DimensionMismatch, GridTooCoarse,
                     GridTooNarrow, KernelTruncated, ValidationError, ZeroNorm)
from .hilbert import NORM_TOL, StateVector

__all__ = ['DensityMatrix', 'RandomizationKernel', 'UncertaintyReport',
           'dephase', 'dephasing_constant', 'time_average_density',
           'app_series_generator', 'ergodic_average_numeric', 'running_average',
           'ergodic_residual_envelope',
           'ergodic_law_analytic', 'partial_randomize', 'decoherence_factor',
           'decoherence_factors', 'bayesian_energy_update', 'uncertainty_product',
           'randomized_state', 'composed_state_joint']

GAUSS_HERMITE_POINTS = 64
UNIFORM_POINTS = 4097
TAIL_MASS = 1e-8


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        rho = np.array(self.matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got {rho.shape}")
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > NORM_TOL:
            raise ValidationError(f"density matrix not Hermitian ({herm:.3e})")
        tr = np.trace(rho).real
        if abs(tr - 1) > NORM_TOL:
            raise ValidationError(f"density matrix trace {tr!r} != 1")
        if np.min(np.linalg.eigvalsh(rho)) < -NORM_TOL:
            raise ValidationError("density matrix has negative eigenvalues")
        rho.setflags(write=False)
        object.__setattr__(self, 'matrix', rho)

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class RandomizationKernel:
    """Normalized distribution G(t) of randomized evolution times.

    ``kind='gaussian'``: ``width`` is the standard deviation.
    ``kind='uniform'``: ``width`` is the half-width of the support.
    ``kind='grid'``: explicit ``(t, weight)`` pairs with weights summing to one.
    """

    kind: str
    center: float = 0.0
    width: float = 0.0
    grid: tuple = field(default=None)

    def __post_init__(self):
        if self.kind not in ('gaussian', 'uniform', 'grid'):
            raise ValidationError(f"unknown kernel kind {self.kind!r}")
        if self.kind == 'grid':
            if not self.grid:
                raise ValidationError("grid kernel needs (t, weight) pairs")
            t, w = np.asarray(self.grid, dtype=float).T
            if np.any(w < 0):
                raise ValidationError("kernel weights must be nonnegative")
            if abs(w.sum() - 1) > 1e-10:
                raise ValidationError(f"kernel weights sum to {w.sum()!r}, not 1")
            object.__setattr__(self, 'grid', tuple(zip(t.tolist(), w.tolist())))
        elif not self.width > 0:
            raise ValidationError("kernel width must be positive")

    @classmethod
    def gaussian(cls, sigma, center=0.0):
        return cls('gaussian', center, sigma)

    @classmethod
    def uniform(cls, half_width, center=0.0):
        return cls('uniform', center, half_width)

    @classmethod
    def delta(cls, t=0.0):
        return cls('grid', grid=((t, 1.0),))

    def nodes(self):
        """Quadrature nodes and weights representing integration against G."""
        if self.kind == 'gaussian':
            x, w = np.polynomial.hermite.hermgauss(GAUSS_HERMITE_POINTS)
            return self.center + math.sqrt(2) * self.width * x, w / math.sqrt(math.pi)
        if self.kind == 'uniform':
            t = np.linspace(self.center - self.width, self.center + self.width, UNIFORM_POINTS)
            w = np.full(UNIFORM_POINTS, 1.0 / (UNIFORM_POINTS - 1))
            w[[0, -1]] *= 0.5
            return t, w
        t, w = np.asarray(self.grid, dtype=float).T
        return t, w

    @property
    def std(self):
        if self.kind == 'gaussian':
            return self.width
        if self.kind == 'uniform':
            return self.width / math.sqrt(3)
        t, w = self.nodes()
        mean = np.dot(w, t)
        return float(math.sqrt(max(np.dot(w, (t - mean) ** 2), 0.0)))

    def support_mass_outside(self, lo, hi):
        """Kernel mass outside [lo, hi]."""
        if self.kind == 'gaussian':
            s = self.width * math.sqrt(2)
            return 0.5 * (math.erfc((hi - self.center) / s) + math.erfc((self.center - lo) / s))
        if self.kind == 'uniform':
            a, b = self.center - self.width, self.center + self.width
            inside = max(0.0, min(b, hi) - max(a, lo))
            return 1.0 - inside / (b - a)
        t, w = self.nodes()
        return float(w[(t < lo) | (t > hi)].sum())


@dataclass(frozen=True)
class UncertaintyReport:
    delta_t: float
    delta_E: float
    product_over_hbar: float
    metadata: dict = field(default_factory=dict)


def dephase(a_state, spec):
    """Infinite time average of U(t)|a><a|U(t)^dagger.

    Each degeneracy group keeps its internal coherence: the result is
    sum_g Pi_g |a><a| Pi_g, which reduces to sum_n |<n|a>|^2 |n><n| for a
    nondegenerate spectrum.
    """
    if a_state.dim != spec.dim:
        raise DimensionMismatch("state and spectrum dimensions differ")
    psi = a_state.amplitudes
    rho = np.zeros((spec.dim, spec.dim), dtype=complex)
    for g in spec.degeneracy_groups:
        V = spec.vectors[:, list(g)]
        proj = V @ (V.conj().T @ psi)
        rho += np.outer(proj, proj.conj())
    return DensityMatrix(rho)


def dephasing_constant(a_state, spec, hbar=1.0):
    """max over n != m (different levels) of |<n|a><a|m>| hbar / |E_n - E_m|.

    The finite time average over [0, T] differs from ``dephase`` by at most
    2 * constant / T in max-norm.
    """
    c = spec.vectors.conj().T @ a_state.amplitudes
    E = spec.eigenvalues
    best = 0.0
    for i in range(spec.dim):
        for j in range(spec.dim):
            if spec.group_of(i) is spec.group_of(j):
                continue
            best = max(best, abs(c[i] * c[j].conjugate()) * hbar / abs(E[i] - E[j]))
    return best


def time_average_density(a_state, spec, T, dt, hbar=1.0):
    """(1/T) int_0^T U(t)|a><a|U(t)^dagger dt by the composite trapezoid rule."""
    n = int(round(T / dt))
    times = np.linspace(0.0, T, n + 1)
    c = spec.vectors.conj().T @ a_state.amplitudes
    E = spec.eigenvalues
    # average of exp(-i (E_i - E_j) t) on the grid, then rotate back
    w = np.full(n + 1, 1.0)
    w[[0, -1]] = 0.5
    w /= n
    ph = np.exp(-1j * np.outer(E, times) / hbar)
    avg = (ph * w[None, :]) @ ph.conj().T
    rho_e = np.outer(c, c.conj()) * avg
    V = spec.vectors
    return V @ rho_e @ V.conj().T


def app_series_generator(A, B, spec, a, n, hbar=1.0, eps_sing=EPS_SING):
    """Callable mapping a time array to the (b, t) array of P(b(t)|a,n)."""
    def generate(times):
        return time_dependent_app(A, B, spec, a, n, times, hbar, eps_sing).values
    generate.energies = spec.eigenvalues
    generate.labels = B.labels
    return generate


def ergodic_average_numeric(generator, T, dt, hbar=1.0, energies=None, chunk=20000):
    """(1/T) int_0^T P(b(t)|a,n) dt with the composite trapezoid rule.

    Parameters
    ----------
    generator : callable
        Maps a 1-d time array to an array of shape (number of b, len(times)).
        If it exposes an ``energies`` attribute (as produced by
        ``app_series_generator``) the step size is checked against the
        fastest Bohr frequency.
    T, dt : float
        Averaging window and grid step.

    Raises
    ------
    GridTooCoarse
        If dt > pi hbar / (10 max|E_n - E_m|).
    """
    if energies is None:
        energies = getattr(generator, 'energies', None)
    if energies is not None and len(energies) > 1:
        spread = float(np.max(energies) - np.min(energies))
        if spread > 0 and dt > math.pi * hbar / (10 * spread):
            raise GridTooCoarse(
                f"dt = {dt} exceeds pi hbar / (10 * {spread:.4g}) = "
                f"{math.pi * hbar / (10 * spread):.4g}")
    n = int(round(T / dt))
    if n < 1:
        raise GridTooCoarse("window shorter than one step")
    times = np.linspace(0.0, T, n + 1)
    total = None
    for start in range(0, n + 1, chunk):
        ts = times[start:start + chunk]
        vals = np.asarray(generator(ts))
        w = np.ones(ts.size)
        if start == 0:
            w[0] = 0.5
        if start + chunk >= n + 1:
            w[-1] = 0.5
        part = vals @ w
        total = part if total is None else total + part
    return total / n


def running_average(generator, T, dt, hbar=1.0, energies=None):
    """Averages (1/T') int_0^T' P(b(t)|a,n) dt for every grid time T' in (0, T].

    Cumulative trapezoid on a single grid, so averages over many window
    lengths cost one pass. Returns ``(times, averages)`` with averages of
    shape (number of b, len(times)); the T' = 0 column is dropped.
    """
    if energies is None:
        energies = getattr(generator, 'energies', None)
    if energies is not None and len(energies) > 1:
        spread = float(np.max(energies) - np.min(energies))
        if spread > 0 and dt > math.pi * hbar / (10 * spread):
            raise GridTooCoarse(f"dt = {dt} too coarse for spectral spread {spread:.4g}")
    n = int(round(T / dt))
    if n < 1:
        raise GridTooCoarse("window shorter than one step")
    times = np.linspace(0.0, T, n + 1)
    vals = np.asarray(generator(times))
    cum = cumulative_trapezoid(vals, times, axis=-1)
    return times[1:], cum / times[None, 1:]


def ergodic_residual_envelope(times, averages, target, T, period):
    """max |average(T') - target| over T' in [T, T + period] (all rows).

    Finite-time residuals oscillate at Bohr frequencies; the maximum over
    one slowest period measures the O(1/T) envelope rather than a point
    that may sit near a node.
    """
    sel = (times >= T) & (times <= T + period)
    if not np.any(sel):
        raise GridTooCoarse("no grid points in the envelope window")
    target = np.asarray(target)
    diff = averages[:, sel] - (target[:, None] if target.ndim else target)
    return float(np.max(np.abs(diff)))


def ergodic_law_analytic(A, B, N, a, b, n, eps_sing=EPS_SING):
    """P(n|a,b) P(b(0)|a,n) and the Born probability |<b|n>|^2.

    Returns
    -------
    product : complex
        Real up to rounding, independent of ``a``.
    born : float
    """
    basis_n = N.basis if hasattr(N, 'basis') else N
    va = A.matrix[:, A.index(a)]
    vb = B.matrix[:, B.index(b)]
    k = basis_n.index(n)
    vn = basis_n.matrix[:, k]
    na = np.vdot(vn, va)
    _require(na, eps_sing, '<n|a>')
    p_nab = conditional_app(A, B, basis_n, a, b, eps_sing)[k]
    ba = np.vdot(vb, va)
    p_ban = ba * np.vdot(vn, vb) / na
    return complex(p_nab * p_ban), float(abs(np.vdot(vb, vn)) ** 2)


def partial_randomize(generator, G, times, support=None):
    """Convolution P_G(b(t)) = int G(t') P(b(t - t')) dt' on a time grid.

    Quadrature follows the kernel: Gauss-Hermite for gaussian, trapezoid for
    uniform, the explicit weights for grid kernels.

    ``support`` optionally gives the interval (lo, hi) on which the series is
    defined; shifted arguments falling outside it must carry kernel mass
    below 1e-8, otherwise ``KernelTruncated`` is raised.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if support is not None:
        lo, hi = support
        # t - t' in [lo, hi]  <=>  t' in [t - hi, t - lo] for every t
        mass = max(G.support_mass_outside(t - hi, t - lo) for t in (times[0], times[-1]))
        if mass > TAIL_MASS:
            raise KernelTruncated(f"kernel mass {mass:.3e} falls outside the series support")
    nodes, weights = G.nodes()
    shifted = (times[None, :] - nodes[:, None]).ravel()
    vals = np.asarray(generator(shifted))
    vals = vals.reshape(vals.shape[0], nodes.size, times.size)
    out = np.einsum('k,bkt->bt', weights, vals)
    labels = getattr(generator, 'labels', tuple(str(i) for i in range(out.shape[0])))
    return ComplexProbTable((labels, tuple(times.tolist())), out, 'time_series',
                            0, {'kernel': G.kind, 'kernel_std': G.std})


def decoherence_factor(G, E_n, E_m, hbar=1.0):
    """D(n,m) = int G(t) exp(-i (E_n - E_m) t / hbar) dt."""
    return complex(decoherence_factors(G, np.array([E_n - E_m]), hbar)[0])


def decoherence_factors(G, energy_differences, hbar=1.0):
    """Vectorized D for an array of energy differences E_n - E_m.

    Gaussian kernels use the closed form exp(-w^2 sigma^2 / 2 - i w t0);
    other kinds integrate on the kernel nodes.
    """
    omega = np.asarray(energy_differences, dtype=float) / hbar
    if G.kind == 'gaussian':
        return np.exp(-0.5 * (omega * G.width) ** 2 - 1j * omega * G.center)
    t, w = G.nodes()
    out = np.empty(omega.shape, dtype=complex)
    flat = omega.ravel()
    res = out.ravel()
    for start in range(0, flat.size, 512):
        block = flat[start:start + 512]
        res[start:start + 512] = np.exp(-1j * np.outer(block, t)) @ w
    return res.reshape(omega.shape)


def bayesian_energy_update(prior, D_values):
    """Posterior proportional to |D(n, prep)|^2 P(n|a)."""
    prior = np.asarray(prior, dtype=float)
    like = np.abs(np.asarray(D_values, dtype=complex)) ** 2
    if prior.shape != like.shape:
        raise DimensionMismatch("prior and likelihood lengths differ")
    post = like * prior
    z = post.sum()
    if z <= 1e-300:
        raise DegenerateUpdate(f"normalization {z!r} vanishes")
    return post / z


def _trapz(y, x):
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


def uncertainty_product(G, energy_grid, hbar=1.0):
    """Time spread of G against the energy resolution of |D(E)|^2.

    The energy resolution is the standard deviation of the likelihood
    |D(E)|^2 normalized over a flat prior on ``energy_grid`` (energies
    measured from the prepared level).
    """
    E = np.asarray(energy_grid, dtype=float)
    if E.ndim != 1 or E.size < 3 or np.any(np.diff(E) <= 0):
        raise GridTooNarrow("energy grid must be increasing with at least 3 points")
    like = np.abs(decoherence_factors(G, E, hbar)) ** 2
    z = _trapz(like, E)
    mean = _trapz(E * like, E) / z
    var = _trapz((E - mean) ** 2 * like, E) / z
    dE = math.sqrt(var)
    span = E[-1] - E[0]
    if span < 8 * dE:
        raise GridTooNarrow(f"grid span {span:.4g} < 8 * Delta E = {8 * dE:.4g}")
    dt = G.std
    return UncertaintyReport(dt, dE, dt * dE / hbar,
                             {'prior': 'flat on energy grid', 'kernel': G.kind,
                              'grid_points': int(E.size)})


def randomized_state(a_state, spec, G, E_prep, hbar=1.0):
    """psi(a, G): eigen-amplitudes <n|a> multiplied by D(n, prep), renormalized."""
    c = spec.vectors.conj().T @ a_state.amplitudes
    D = decoherence_factors(G, spec.eigenvalues - E_prep, hbar)
    amps = c * D
    norm = np.linalg.norm(amps)
    if norm < 1e-150:
        raise ZeroNorm("all energy components suppressed")
    return StateVector(spec.vectors @ (amps / norm), a_state.label + '~')


def composed_state_joint(psi_prep, B, N):
    """rho(b, n) = <psi|b><b|n><n|psi>, axes (B.labels, N.labels)."""
    basis_n = N.basis if hasattr(N, 'basis') else N
    norm = np.linalg.norm(psi_prep.amplitudes)
    if norm < 1e-150:
        raise ZeroNorm("state has vanishing norm")
    cb = B.coefficients(psi_prep)
    cn = basis_n.coefficients(psi_prep)
    bn = B.matrix.conj().T @ basis_n.matrix      # <b|n>
    values = cb.conj()[:, None] * bn * cn[None, :]
    return ComplexProbTable((B.labels, basis_n.labels), values, 'joint')
