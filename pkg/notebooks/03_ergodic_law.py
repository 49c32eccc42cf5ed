# %% [markdown]
# # The ergodic law and its finite-time approach
#
# The long-time average of P(b(t)|a,n) equals |<b|n>|^2. The residual of
# the running average shrinks like 1/T.

# %%
import math

import numpy as np

from ergophase import ergodic
from ergophase.models import qubit

m = qubit()
X, Y, spec = m.bases['X'], m.bases['Y'], m.spectrum
n = spec.basis.index('0')
gen = ergodic.app_series_generator(X, Y, spec, '+', n)
period = 2 * math.pi / (spec.eigenvalues[-1] - spec.eigenvalues[0])
times, avg = ergodic.running_average(gen, 2000 + period, 0.01)
target = np.abs(Y.matrix.conj().T @ spec.vectors[:, n]) ** 2

# %%
for T in (125, 250, 500, 1000):
    r = ergodic.ergodic_residual_envelope(times, avg, target, T, period)
    print(f"T = {T:5d}: envelope residual {r:.3e}, T * residual {T * r:.4f}")

# %% [markdown]
# Dephasing: the long-time density matrix keeps only the energy-diagonal
# blocks.

# %%
from ergophase.models import random_system

r = random_system(4, np.random.default_rng(5))
rho = ergodic.dephase(r.states['psi'], r.spectrum).matrix
print(np.round(r.spectrum.vectors.conj().T @ rho @ r.spectrum.vectors, 6))
