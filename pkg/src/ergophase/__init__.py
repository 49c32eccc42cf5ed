"""Complex action phase probabilities for finite quantum systems.

Submodules
----------
hilbert        states, bases, Jacobi eigensolver, propagators
app            joint/conditional/time-dependent action phase probabilities
ergodic        full and partial ergodic averages, energy-time uncertainty
semiclassical  arrival times, Legendre relation, coarse graining
freespace      closed-form free particle and tunneling results
models, io     fixture systems and JSON model files
checks, cli    invariant suite and the ``ergophase`` command
"""

__version__ = '0.1.0'

from .hilbert import (StateVector, OrthonormalBasis, SpectralDecomposition,
                      eigendecompose_hermitian, propagator, inner)
from .app import (ComplexProbTable, WeakValueSeries, ActionDecomposition,
                  kd_joint, conditional_app, action_phase, time_dependent_app,
                  weak_energy, decompose_action)
from .ergodic import (RandomizationKernel, dephase, ergodic_law_analytic,
                      decoherence_factor, uncertainty_product)
from .freespace import FreeParticleConfig

__all__ = ['StateVector', 'OrthonormalBasis', 'SpectralDecomposition',
           'eigendecompose_hermitian', 'propagator', 'inner', 'ComplexProbTable',
           'WeakValueSeries', 'ActionDecomposition', 'kd_joint', 'conditional_app',
           'action_phase', 'time_dependent_app', 'weak_energy', 'decompose_action',
           'RandomizationKernel', 'dephase', 'ergodic_law_analytic',
           'decoherence_factor', 'uncertainty_product', 'FreeParticleConfig']
