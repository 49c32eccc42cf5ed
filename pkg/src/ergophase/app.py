"""Action phase probabilities.

Complex joint and conditional probabilities for non-commuting properties,
their time dependence along a stationary state, the weak value of energy and
the split of the total action phase into time, energy and eigenvalue parts.

Index conventions: ``a`` labels a vector of basis ``A`` (the initial
condition), ``b`` a vector of basis ``B`` (the final condition) and ``n`` an
energy eigenvector. Indices may be integers or basis labels.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (DimensionMismatch, GridMismatch, SingularCondition,
                     ValidationError, ZeroProbability)
from .hilbert import SpectralDecomposition

__all__ = ['ComplexProbTable', 'WeakValueSeries', 'ActionDecomposition',
           'EPS_SING', 'kd_joint', 'conditional_app', 'action_phase',
           'wrap_action', 'unitary_decomposition_check', 'two_time_correlation',
           'time_dependent_app', 'weak_energy', 'weak_energy_series',
           'phase_evolution_check', 'decompose_action']

EPS_SING = 1e-12
NORM_TOL = 1e-10


@dataclass(frozen=True)
class ComplexProbTable:
    """Labelled array of complex probabilities.

    ``kind`` is one of ``'joint'``, ``'conditional'`` or ``'time_series'``.
    For conditional tables the axis summed to one is ``norm_axis``; time
    series are normalized over axis 0 (the final condition) at every time.
    """

    axis_labels: tuple
    values: np.ndarray
    kind: str
    norm_axis: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ('joint', 'conditional', 'time_series'):
            raise ValidationError(f"unknown table kind {self.kind!r}")
        vals = np.array(self.values, dtype=complex)
        vals.setflags(write=False)
        if vals.shape != tuple(len(ax) for ax in self.axis_labels):
            raise DimensionMismatch(
                f"values shape {vals.shape} does not match labels "
                f"{tuple(len(ax) for ax in self.axis_labels)}")
        object.__setattr__(self, 'values', vals)
        object.__setattr__(self, 'axis_labels', tuple(tuple(ax) for ax in self.axis_labels))

    def normalization_error(self):
        """Largest deviation of the relevant sums from one."""
        if self.kind == 'joint':
            return float(abs(self.values.sum() - 1.0))
        return float(np.max(np.abs(self.values.sum(axis=self.norm_axis) - 1.0)))

    def marginal(self, axis):
        """Sum over every axis except ``axis``."""
        other = tuple(i for i in range(self.values.ndim) if i != axis)
        return self.values.sum(axis=other)

    @property
    def T(self):
        return ComplexProbTable(self.axis_labels[::-1], self.values.T, self.kind,
                                self.values.ndim - 1 - self.norm_axis, dict(self.metadata))


@dataclass(frozen=True)
class WeakValueSeries:
    """Complex weak values of energy on an increasing time grid."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if t.shape != v.shape or t.ndim != 1:
            raise DimensionMismatch("times and values must be 1-d of equal length")
        if np.any(np.diff(t) <= 0):
            raise GridMismatch("times must be strictly increasing")
        object.__setattr__(self, 'times', t)
        object.__setattr__(self, 'values', v)


@dataclass(frozen=True)
class ActionDecomposition:
    """Time part, eigenvalue part and energy part of an action phase.

    ``total`` is hbar * Arg of the time dependent action phase probability and
    agrees with ``S_t + E_n_t - S_E`` modulo 2 pi hbar.
    """

    S_t: float
    E_n_t: float
    S_E: float
    total: float
    hbar: float = 1.0

    def residual(self):
        """|total - (S_t + E_n t - S_E)| reduced modulo 2 pi hbar."""
        return abs(wrap_action(self.total - (self.S_t + self.E_n_t - self.S_E), self.hbar))


def _basis_of(N):
    return N.basis if isinstance(N, SpectralDecomposition) else N


def _check_dims(*objs):
    dims = {o.dim for o in objs}
    if len(dims) > 1:
        raise DimensionMismatch(f"dimensions disagree: {sorted(dims)}")


def _require(amp, eps, what):
    if abs(amp) <= eps:
        raise SingularCondition(f"|{what}| = {abs(amp):.3e} <= {eps:.1e}")


def action_phase(p, hbar=1.0):
    """hbar * Arg(p) on the branch (-pi hbar, pi hbar]."""
    p = complex(p)
    if p == 0:
        raise ZeroProbability("action phase of a zero probability is undefined")
    phi = np.angle(p)
    if phi <= -np.pi:
        phi = np.pi
    return float(hbar * phi)


def wrap_action(S, hbar=1.0):
    """Reduce an action to (-pi hbar, pi hbar]."""
    x = np.mod(np.asarray(S, dtype=float) / hbar + np.pi, 2 * np.pi) - np.pi
    x = np.where(x <= -np.pi, np.pi, x)
    return hbar * x if np.ndim(x) else float(hbar * x)


def kd_joint(psi, A, B):
    """Kirkwood-Dirac joint quasi-probability rho(a, b) = <psi|b><b|a><a|psi>.

    Returns a ``joint`` table with axes ``(A.labels, B.labels)``.
    """
    _check_dims(psi, A, B)
    ca = A.coefficients(psi)
    cb = B.coefficients(psi)
    ba = B.matrix.conj().T @ A.matrix          # ba[b, a] = <b|a>
    values = cb.conj()[None, :] * ba.T * ca[:, None]
    return ComplexProbTable((A.labels, B.labels), values, 'joint')


def conditional_app(A, B, N, a, b, eps_sing=EPS_SING, eigenspace=False):
    """Complex conditional probability P(n|a,b) = <b|n><n|a> / <b|a>.

    Parameters
    ----------
    A, B : OrthonormalBasis
    N : OrthonormalBasis or SpectralDecomposition
        Basis of the outcome ``n``.
    a, b : int or str
    eps_sing : float
        Smallest admissible |<b|a>|.
    eigenspace : bool
        With a ``SpectralDecomposition`` for ``N``, sum over each degeneracy
        group, i.e. use <b|Pi_n|a>. The result then has one entry per group.

    Returns
    -------
    ndarray of complex, summing to one.
    """
    basis_n = _basis_of(N)
    _check_dims(A, B, basis_n)
    va = A.matrix[:, A.index(a)]
    vb = B.matrix[:, B.index(b)]
    ba = np.vdot(vb, va)
    _require(ba, eps_sing, '<b|a>')
    bn = basis_n.matrix.conj().T @ vb           # <n|b>
    na = basis_n.matrix.conj().T @ va           # <n|a>
    per_vector = bn.conj() * na / ba
    if eigenspace:
        if not isinstance(N, SpectralDecomposition):
            raise ValidationError("eigenspace=True needs a SpectralDecomposition")
        return np.array([per_vector[list(g)].sum() for g in N.degeneracy_groups])
    return per_vector


def unitary_decomposition_check(A, B, N, spec, actions, a, b, hbar=1.0,
                                eps_sing=EPS_SING):
    """Both sides of |<b|U|a>|^2 = P(b|a) |sum_n P(n|a,b) exp(-i S_n/hbar)|^2.

    The left side is evaluated from the matrix U = sum_n |n><n| exp(-i S_n/hbar)
    and the right side from the conditional probabilities. ``N`` defaults to
    the eigenbasis in ``spec`` when ``None``.
    """
    basis_n = spec.basis if N is None else _basis_of(N)
    actions = np.asarray(actions, dtype=float)
    if actions.shape != (basis_n.dim,):
        raise DimensionMismatch(f"need {basis_n.dim} actions, got {actions.shape}")
    V = basis_n.matrix
    U = (V * np.exp(-1j * actions / hbar)[None, :]) @ V.conj().T
    va = A.matrix[:, A.index(a)]
    vb = B.matrix[:, B.index(b)]
    lhs = abs(np.vdot(vb, U @ va)) ** 2
    p_nab = conditional_app(A, B, basis_n, a, b, eps_sing)
    p_ba = abs(np.vdot(vb, va)) ** 2
    rhs = p_ba * abs(np.sum(p_nab * np.exp(-1j * actions / hbar))) ** 2
    return float(lhs), float(rhs)


def two_time_correlation(A_op, B_op, spec, n, t, hbar=1.0):
    """<n| B U(t) A |n> exp(i E_n t / hbar) for an energy eigenstate n."""
    A_op = np.asarray(A_op, dtype=complex)
    B_op = np.asarray(B_op, dtype=complex)
    if A_op.shape != (spec.dim, spec.dim) or B_op.shape != (spec.dim, spec.dim):
        raise DimensionMismatch("operators must be square with the system dimension")
    n = spec.basis.index(n)
    vn = spec.vectors[:, n]
    V = spec.vectors
    # U(t) A|n> via the eigenbasis
    ua = V @ (np.exp(-1j * spec.eigenvalues * t / hbar) * (V.conj().T @ (A_op @ vn)))
    return complex(np.vdot(vn, B_op @ ua) * np.exp(1j * spec.eigenvalues[n] * t / hbar))


def _evolved_overlaps(spec, vb, va, times, hbar, with_energy=False):
    """<b|U(t)|a> (and optionally <b|U(t)H|a>) for the columns b of ``vb``.

    Result shape is (number of b, number of times).
    """
    V = spec.vectors
    ca = V.conj().T @ va                                   # <k|a>
    bk = vb.conj().T @ V                                   # <b|k>
    ph = np.exp(-1j * np.outer(spec.eigenvalues, times) / hbar)
    amp = bk @ (ca[:, None] * ph)
    if not with_energy:
        return amp
    amp_h = bk @ ((spec.eigenvalues * ca)[:, None] * ph)
    return amp, amp_h


def time_dependent_app(A, B, spec, a, n, times, hbar=1.0, eps_sing=EPS_SING,
                       eigenspace=False):
    """P(b(t)|a,n) = <b|U(t)|a> exp(i E_n t/hbar) <n|b>/<n|a> on a time grid.

    ``n`` indexes the eigenbasis of ``spec``. With ``eigenspace=True`` the
    ratio <n|b>/<n|a> is replaced by its gauge-invariant projector form
    <a|Pi_n|b>/<a|Pi_n|a>, which sums over a degenerate level.

    Returns a ``time_series`` table with axes ``(B.labels, times)``.
    """
    _check_dims(A, B, spec)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    n = spec.basis.index(n)
    va = A.matrix[:, A.index(a)]
    vn = spec.vectors[:, n]
    if eigenspace:
        P = spec.projector(n)
        pa = va.conj() @ P                                  # <a|Pi_n
        denom = pa @ va
        _require(denom, eps_sing ** 2, '<a|Pi_n|a>')
        ratio = (pa @ B.matrix) / denom
    else:
        na = np.vdot(vn, va)
        _require(na, eps_sing, '<n|a>')
        ratio = (vn.conj() @ B.matrix) / na                 # <n|b>/<n|a>
    amp = _evolved_overlaps(spec, B.matrix, va, times, hbar)
    phase = np.exp(1j * spec.eigenvalues[n] * times / hbar)
    values = amp * phase[None, :] * ratio[:, None]
    meta = {'a': A.labels[A.index(a)], 'n': spec.basis.labels[n],
            'E_n': float(spec.eigenvalues[n]), 'hbar': hbar,
            'basis_dependent': (not eigenspace) and len(spec.group_of(n)) > 1}
    return ComplexProbTable((B.labels, tuple(times.tolist())), values, 'time_series',
                            0, meta)


def weak_energy_series(B, b, a_state, spec, times, hbar=1.0, eps_sing=EPS_SING):
    """Weak value H(b,a,t) = <b|U(t) H|a> / <b|U(t)|a> on a time grid."""
    _check_dims(B, a_state, spec)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    vb = B.matrix[:, [B.index(b)]]
    amp, amp_h = _evolved_overlaps(spec, vb, a_state.amplitudes, times, hbar,
                                   with_energy=True)
    amp, amp_h = amp[0], amp_h[0]
    small = np.abs(amp) <= eps_sing
    if np.any(small):
        t_bad = times[np.argmax(small)]
        raise SingularCondition(f"|<b|U(t)|a>| <= {eps_sing:.1e} at t = {t_bad!r}")
    return WeakValueSeries(times, amp_h / amp)


def weak_energy(B, b, a_state, spec, t, hbar=1.0, eps_sing=EPS_SING):
    """Weak value of energy at a single time."""
    return complex(weak_energy_series(B, b, a_state, spec, [t], hbar, eps_sing).values[0])


def _uniform_step(times):
    times = np.asarray(times, dtype=float)
    if times.size < 3:
        raise GridMismatch("need at least three grid points")
    steps = np.diff(times)
    dt = steps.mean()
    if np.max(np.abs(steps - dt)) > 1e-9 * max(1.0, abs(dt)):
        raise GridMismatch("time grid is not uniform")
    return dt


def phase_evolution_check(series, weak, E_n, hbar=1.0, b=None):
    """Residual of dP/dt = (i/hbar)(E_n - H(b,a,t)) P along a time series.

    ``series`` is a ``time_series`` table (row ``b`` is used; the row may be
    omitted when the table has a single row) or a plain complex array. The
    derivative is a central difference, so the returned maximum residual over
    interior points is O(dt^2).
    """
    if isinstance(series, ComplexProbTable):
        times = np.asarray(series.axis_labels[1], dtype=float)
        vals = series.values
        if b is None:
            if vals.shape[0] != 1:
                raise ValidationError("table has several rows; pass b")
            row = vals[0]
        else:
            row = vals[list(series.axis_labels[0]).index(str(b)) if isinstance(b, str) else b]
    else:
        row = np.asarray(series, dtype=complex)
        times = weak.times
    if row.shape != weak.values.shape or not np.array_equal(times, weak.times):
        raise GridMismatch("probability series and weak values use different grids")
    dt = _uniform_step(times)
    dP = (row[2:] - row[:-2]) / (2 * dt)
    rhs = 1j / hbar * (E_n - weak.values[1:-1]) * row[1:-1]
    return float(np.max(np.abs(dP - rhs)))


def decompose_action(A, B, spec, a, b, n, t, hbar=1.0, eps_sing=EPS_SING):
    """Split the action phase of P(b(t)|a,n) into S_t, E_n t and S_E.

    S_t = hbar Arg <b|U(t)|a>, S_E = hbar Arg(<b|n><n|a>) and the total is
    hbar Arg P(b(t)|a,n).
    """
    _check_dims(A, B, spec)
    n = spec.basis.index(n)
    va = A.matrix[:, A.index(a)]
    vb = B.matrix[:, B.index(b)]
    vn = spec.vectors[:, n]
    bua = _evolved_overlaps(spec, vb[:, None], va, [t], hbar)[0, 0]
    na = np.vdot(vn, va)
    bn = np.vdot(vb, vn)
    for amp, what in ((bua, '<b|U(t)|a>'), (na, '<n|a>'), (bn, '<b|n>')):
        _require(amp, eps_sing, what)
    E_n = float(spec.eigenvalues[n])
    p = bua * np.exp(1j * E_n * t / hbar) * bn.conjugate() / na
    return ActionDecomposition(
        S_t=action_phase(bua, hbar),
        E_n_t=E_n * t,
        S_E=action_phase(bn * na, hbar),
        total=action_phase(p, hbar),
        hbar=hbar,
    )
