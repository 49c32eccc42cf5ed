# %% [markdown]
# # Partial randomization and the energy-time product
#
# A temporal kernel G(t) suppresses coherences by its Fourier transform.
# The product of its time spread with the resulting energy resolution is
# smallest for a gaussian.

# %%
import math

import numpy as np

from ergophase import ergodic
from ergophase.ergodic import RandomizationKernel

for G in (RandomizationKernel.gaussian(0.8), RandomizationKernel.uniform(1.0)):
    rep = ergodic.uncertainty_product(G, np.linspace(-20, 20, 4001))
    print(f"{G.kind:9s}: dt {rep.delta_t:.4f}, dE {rep.delta_E:.4f}, "
          f"product {rep.product_over_hbar:.6f} (bound {1 / math.sqrt(2):.6f})")

# %%
G = RandomizationKernel.gaussian(0.8)
for w in (0.0, 0.5, 1.0, 2.0, 4.0):
    print(f"Bohr frequency {w:3.1f}: |D| = {abs(ergodic.decoherence_factor(G, w, 0.0)):.3e}")
