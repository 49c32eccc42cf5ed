"""Model systems used by tests, fixtures and the demo scripts."""

from dataclasses import dataclass, field

import numpy as np

from .hilbert import (OrthonormalBasis, SpectralDecomposition, StateVector,
                      _degeneracy_groups, eigendecompose_hermitian, fix_phases,
                      random_hermitian, random_unitary)

__all__ = ['ModelSystem', 'qubit', 'ladder', 'random_system', 'momentum_ring']

SQ2 = np.sqrt(2)


@dataclass(frozen=True)
class ModelSystem:
    """Hamiltonian, its spectrum, named bases and named states."""

    hamiltonian: np.ndarray
    bases: dict
    states: dict = field(default_factory=dict)
    hbar: float = 1.0
    eigenbasis_name: str = 'E'
    eps_deg: float = None
    eigen_labels: tuple = None
    spectrum: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.spectrum is None:
            spec = eigendecompose_hermitian(self.hamiltonian, self.eps_deg, self.eigen_labels)
            object.__setattr__(self, 'spectrum', spec)
        bases = dict(self.bases)
        bases[self.eigenbasis_name] = self.spectrum.basis
        object.__setattr__(self, 'bases', bases)

    @property
    def dim(self):
        return self.spectrum.dim

    @property
    def eigenbasis(self):
        return self.spectrum.basis

    def state(self, key):
        """A named state or a basis vector given as ``'BASIS:label'``."""
        if key in self.states:
            return self.states[key]
        if ':' in key:
            basis, label = key.split(':', 1)
            return self.bases[basis][label]
        raise KeyError(f"unknown state {key!r}")


def qubit():
    """sigma_z Hamiltonian with the Z, X and Y bases and the |+> state.

    The eigenbasis is labelled like Z, so ``'0'`` has energy +1.
    """
    Z = OrthonormalBasis(np.eye(2), ('0', '1'))
    X = OrthonormalBasis(np.array([[1, 1], [1, -1]]) / SQ2, ('+', '-'))
    Y = OrthonormalBasis(np.array([[1, 1], [1j, -1j]]) / SQ2, ('+y', '-y'))
    H = np.diag([1.0, -1.0])
    return ModelSystem(H, {'Z': Z, 'X': X, 'Y': Y},
                       {'plus': X['+'], 'plus_y': Y['+y']},
                       eigen_labels=('1', '0'))


def _phase_basis(N, offset=0.0, labels=None):
    n = np.arange(N)
    theta = 2 * np.pi * (np.arange(N) + offset) / N
    M = np.exp(-1j * np.outer(n, theta)) / np.sqrt(N)
    return OrthonormalBasis(M, labels or tuple(f"th{k}" for k in range(N)))


def ladder(N=16, gap=1.0):
    """Harmonic ladder E_n = n * gap with two phase-state bases.

    ``A`` holds phase states theta_k = 2 pi k / N, ``B`` the same states
    shifted by half a step so that every <b|a> is nonzero.
    """
    H = np.diag(gap * np.arange(N, dtype=float))
    A = _phase_basis(N)
    B = _phase_basis(N, 0.5)
    return ModelSystem(H, {'A': A, 'B': B}, {'phase0': A[0]},
                       eigen_labels=tuple(str(i) for i in range(N)))


def random_system(dim, rng, scale=1.0):
    """Random Hermitian H with Haar-random bases A and B and a random state."""
    H = random_hermitian(dim, rng, scale)
    A = OrthonormalBasis(random_unitary(dim, rng))
    B = OrthonormalBasis(random_unitary(dim, rng))
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return ModelSystem(H, {'A': A, 'B': B}, {'psi': StateVector.normalized(z, 'psi')})


def momentum_ring(N=128, dx=0.25, m=1.0, hbar=1.0):
    """Free particle on a periodic grid, H diagonal in the discrete momenta.

    Energies are exactly p_k^2 / 2m with p_k = 2 pi hbar k / (N dx), so only
    band limitation and periodic images separate this model from the
    continuum. The spectrum is assembled from the known plane waves rather
    than diagonalized.
    """
    k = np.fft.fftfreq(N, d=1.0 / N)
    p = 2 * np.pi * hbar * k / (N * dx)
    x = dx * np.arange(N)
    F = np.exp(1j * np.outer(x, p) / hbar) / np.sqrt(N)      # columns are |p>
    E = p ** 2 / (2 * m)
    H = (F * E[None, :]) @ F.conj().T
    order = np.argsort(E, kind='stable')
    w = E[order]
    w.setflags(write=False)
    spec = SpectralDecomposition(
        eigenvalues=w,
        basis=OrthonormalBasis(fix_phases(F[:, order]), tuple(f"p{int(i)}" for i in k[order])),
        degeneracy_groups=_degeneracy_groups(w, 1e-9 * np.max(w)),
        eps_deg=1e-9 * float(np.max(w)),
        hamiltonian=H,
    )
    X = OrthonormalBasis(np.eye(N), tuple(f"x{i}" for i in range(N)))
    P = OrthonormalBasis(F, tuple(f"p{int(i)}" for i in k))
    sysm = ModelSystem(H, {'X': X, 'P': P}, hbar=hbar, spectrum=spec)
    object.__setattr__(sysm, 'grid', {'x': x, 'p': p, 'dx': dx, 'm': m})
    return sysm
