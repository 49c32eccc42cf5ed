# %% [markdown]
# # Time evolution of an action phase probability
#
# P(b(t)|a,n) rotates at the rate set by E_n minus the weak energy. A
# central difference of the series against the weak energy series shows
# the second order residual.

# %%
import numpy as np

from ergophase import app
from ergophase.models import qubit

m = qubit()
X, Y, spec = m.bases['X'], m.bases['Y'], m.spectrum
n = spec.basis.index('0')

# %%
for k in (50, 100, 200):
    times = np.linspace(0, 1, k + 1)
    tab = app.time_dependent_app(X, Y, spec, '+', n, times)
    weak = app.weak_energy_series(Y, '+y', X['+'], spec, times)
    res = app.phase_evolution_check(tab, weak, spec.eigenvalues[n], b='+y')
    print(f"dt = {1 / k:.4f}: residual {res:.3e}")

# %% [markdown]
# The action splits into a time part, an eigenvalue part and an energy part.

# %%
d = app.decompose_action(X, Y, spec, '+', '+y', n, 0.7)
print(d, 'residual', d.residual())
