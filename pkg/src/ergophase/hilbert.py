"""Finite-dimensional Hilbert space: states, bases, spectra and propagators.

Everything here is a thin, validated layer over dense complex numpy arrays.
Objects are frozen after construction; the arrays they hold are made
read-only so that sharing them between computations is safe.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (ConvergenceFailure, DimensionMismatch, NotHermitian,
                     NotNormalized, NotUnitary, ValidationError)

__all__ = ['StateVector', 'OrthonormalBasis', 'SpectralDecomposition',
           'as_complex_matrix', 'jacobi_eigh', 'eigendecompose_hermitian',
           'propagator', 'inner', 'fix_phases', 'random_hermitian',
           'random_unitary', 'random_state']

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
MAX_DIM = 256


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


def as_complex_matrix(M, square=True):
    """Validate and return ``M`` as a complex 2-d array."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValidationError("matrix has non-finite entries")
    return M


@dataclass(frozen=True)
class StateVector:
    """Unit vector in C^d with an optional label."""

    amplitudes: np.ndarray
    label: str = ''

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1:
            raise DimensionMismatch(f"state must be 1-d, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValidationError("state has non-finite amplitudes")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"state {self.label!r} has norm {norm!r}")
        object.__setattr__(self, 'amplitudes', _frozen(amps))

    @classmethod
    def normalized(cls, amplitudes, label=''):
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise NotNormalized("cannot normalize the zero vector")
        return cls(amps / norm, label)

    @property
    def dim(self):
        return self.amplitudes.shape[0]

    def with_phase(self, phase):
        """The same ray multiplied by the unit complex number ``phase``."""
        return StateVector(self.amplitudes * phase, self.label)


@dataclass(frozen=True)
class OrthonormalBasis:
    """Ordered orthonormal basis, stored as the columns of a unitary matrix."""

    matrix: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        U = as_complex_matrix(self.matrix)
        dev = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
        if dev > NORM_TOL:
            raise NotUnitary(f"basis columns are not orthonormal (max deviation {dev:.3e})")
        labels = tuple(str(x) for x in self.labels) if len(self.labels) else \
            tuple(str(i) for i in range(U.shape[0]))
        if len(labels) != U.shape[0]:
            raise DimensionMismatch(f"{len(labels)} labels for {U.shape[0]} vectors")
        object.__setattr__(self, 'matrix', _frozen(U))
        object.__setattr__(self, 'labels', labels)

    @classmethod
    def from_vectors(cls, vectors, labels=()):
        vecs = [v.amplitudes if isinstance(v, StateVector) else np.asarray(v)
                for v in vectors]
        return cls(np.column_stack(vecs), labels)

    @classmethod
    def standard(cls, dim, labels=()):
        return cls(np.eye(dim), labels)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __len__(self):
        return self.dim

    def __getitem__(self, i):
        i = self.index(i)
        return StateVector(self.matrix[:, i], self.labels[i])

    @property
    def vectors(self):
        return [self[i] for i in range(self.dim)]

    def index(self, key):
        """Position of a vector given either its integer index or its label."""
        if isinstance(key, (int, np.integer)):
            if not -self.dim <= key < self.dim:
                raise IndexError(f"basis index {key} out of range")
            return int(key) % self.dim
        try:
            return self.labels.index(str(key))
        except ValueError:
            raise KeyError(f"no basis vector labelled {key!r}") from None

    def coefficients(self, state):
        """Components <k|psi> of a state (or raw vector) in this basis."""
        psi = state.amplitudes if isinstance(state, StateVector) else np.asarray(state)
        if psi.shape[0] != self.dim:
            raise DimensionMismatch(f"state dim {psi.shape[0]} != basis dim {self.dim}")
        return self.matrix.conj().T @ psi

    def regauged(self, phases):
        """Copy with column ``k`` multiplied by ``phases[k]``."""
        return OrthonormalBasis(self.matrix * np.asarray(phases)[None, :], self.labels)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending), phase-fixed eigenbasis and degeneracy groups."""

    eigenvalues: np.ndarray
    basis: OrthonormalBasis
    degeneracy_groups: tuple
    eps_deg: float
    hamiltonian: np.ndarray = field(default=None, repr=False)

    @property
    def dim(self):
        return self.eigenvalues.shape[0]

    @property
    def vectors(self):
        return self.basis.matrix

    def group_of(self, n):
        for g in self.degeneracy_groups:
            if n in g:
                return g
        raise IndexError(n)

    def projector(self, n):
        """Projector onto the eigenspace containing eigenvector ``n``."""
        V = self.vectors[:, list(self.group_of(n))]
        return V @ V.conj().T

    @property
    def is_degenerate(self):
        return any(len(g) > 1 for g in self.degeneracy_groups)

    def reconstruct(self):
        V = self.vectors
        return (V * self.eigenvalues[None, :]) @ V.conj().T

    def energy_of(self, n):
        return float(self.eigenvalues[n])


def _off_norm(A):
    return np.linalg.norm(A - np.diag(np.diag(A)))


def jacobi_eigh(H, tol=1e-13, max_sweeps=60):
    """Cyclic Jacobi diagonalization of a dense Hermitian matrix.

    Each rotation first removes the phase of the pivot ``A[p, q]`` with a
    diagonal unitary and then applies the real symmetric Jacobi rotation,
    so the 2x2 update is ``G = diag(1, exp(-i phi)) @ [[c, s], [-s, c]]``.

    Parameters
    ----------
    H : (d, d) complex array
        Hermitian input. Not modified.
    tol : float
        Convergence threshold on the off-diagonal Frobenius norm, relative to
        ``max(1, ||H||_F)``.
    max_sweeps : int
        Sweep budget.

    Returns
    -------
    w : (d,) float array
        Unsorted eigenvalues.
    V : (d, d) complex array
        Eigenvectors as columns.
    """
    A = np.array(H, dtype=complex)
    d = A.shape[0]
    V = np.eye(d, dtype=complex)
    scale = max(1.0, np.linalg.norm(A))
    for _ in range(max_sweeps):
        if _off_norm(A) < tol * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                app, aqq = A[p, p].real, A[q, q].real
                theta = (aqq - app) / (2.0 * r)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                G = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ G
                A[idx, :] = G.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                V[:, idx] = V[:, idx] @ G
    else:
        if _off_norm(A) >= tol * scale:
            raise ConvergenceFailure(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {_off_norm(A):.3e})")
    return np.diag(A).real.copy(), V


def fix_phases(V):
    """Make the largest-magnitude component of every column real positive."""
    V = np.array(V, dtype=complex)
    for k in range(V.shape[1]):
        j = int(np.argmax(np.abs(V[:, k])))
        V[:, k] *= abs(V[j, k]) / V[j, k]
        V[j, k] = abs(V[j, k])
    return V


def _degeneracy_groups(w, eps):
    groups, current = [], [0]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] <= eps:
            current.append(i)
        else:
            groups.append(tuple(current))
            current = [i]
    groups.append(tuple(current))
    return tuple(groups)


def eigendecompose_hermitian(H, eps_deg=None, labels=None):
    """Spectral decomposition of a Hermitian matrix.

    ``eps_deg`` defaults to ``1e-9 * max|E_n|``. Eigenvector labels default to
    ``'0', '1', ...`` in ascending energy order.
    """
    H = as_complex_matrix(H)
    d = H.shape[0]
    if d > MAX_DIM:
        raise ValidationError(f"dimension {d} exceeds the supported maximum {MAX_DIM}")
    asym = np.max(np.abs(H - H.conj().T))
    if asym > HERMITIAN_TOL:
        i, j = np.unravel_index(np.argmax(np.abs(H - H.conj().T)), H.shape)
        raise NotHermitian(f"|H - H^dagger| = {asym:.3e} at entry ({i}, {j})")
    H = 0.5 * (H + H.conj().T)
    w, V = jacobi_eigh(H)
    order = np.argsort(w, kind='stable')
    w, V = w[order], fix_phases(V[:, order])
    if eps_deg is None:
        eps_deg = 1e-9 * max(np.max(np.abs(w)), np.finfo(float).tiny)
    w.setflags(write=False)
    return SpectralDecomposition(
        eigenvalues=w,
        basis=OrthonormalBasis(V, labels or ()),
        degeneracy_groups=_degeneracy_groups(w, eps_deg),
        eps_deg=float(eps_deg),
        hamiltonian=_frozen(H),
    )


def propagator(spec, t, hbar=1.0):
    """U(t) = sum_n exp(-i E_n t / hbar) |n><n|."""
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    V = spec.vectors
    return (V * np.exp(-1j * spec.eigenvalues * t / hbar)[None, :]) @ V.conj().T


def inner(u, v):
    """<u|v>, conjugate-linear in ``u``."""
    a = u.amplitudes if isinstance(u, StateVector) else np.asarray(u)
    b = v.amplitudes if isinstance(v, StateVector) else np.asarray(v)
    if a.shape != b.shape:
        raise DimensionMismatch(f"dims {a.shape} and {b.shape} differ")
    return complex(np.vdot(a, b))


# -- random objects for tests and fixtures ---------------------------------

def random_hermitian(dim, rng, scale=1.0):
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (X + X.conj().T) / 2


def random_unitary(dim, rng):
    """Haar-random unitary via QR with the diagonal phase correction."""
    Z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))[None, :]


def random_state(dim, rng, label=''):
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector.normalized(z, label)
