# %% [markdown]
# # Free propagation and tunneling
#
# A window average of the free action phase probability centred on the
# classical arrival time, the stationary width, and the time integral
# below a barrier.

# %%
from ergophase import freespace, semiclassical
from ergophase.freespace import FreeParticleConfig

cfg = FreeParticleConfig(p=4.0, x=4000.0)
T = 600.0
print('t_c =', cfg.t_c, ' Delta t =', freespace.stationary_width(cfg))
r = freespace.partial_ergodic_free(cfg, T)
print(f"window average {r.integral:.6e}, closed form {r.claimed:.6e}, rel {r.rel_error:.4f}")

# %% [markdown]
# The relative error oscillates with the window edges; it is not monotone
# in Delta t / T.

# %%
import numpy as np

for rho in np.geomspace(0.005, 0.05, 5):
    S = max(1 / rho ** 2, 4e3)
    c = FreeParticleConfig(p=4.0, x=S / 4.0)
    TT = freespace.stationary_width(c) / rho
    print(f"Delta t/T = {rho:.4f}: rel error {freespace.partial_ergodic_free(c, TT).rel_error:.4f}")

# %%
for L in (1.0, 2.0, 4.0):
    t = freespace.tunnel_ergodic(FreeParticleConfig(x=L, V=1.5, E=1.0), 1.0)
    print(f"L = {L}: numeric {t.numeric:.6e}, closed form {t.claimed:.6e}")

# %% [markdown]
# The real part of the weak energy meets E_p at the classical arrival time.

# %%
cfg = FreeParticleConfig(p=2.0, x=10.0)
weak = freespace.free_weak_energy(cfg, np.linspace(1, 20, 191))
print(semiclassical.classical_arrival(weak, cfg.E_p)[0].t_classical, cfg.t_c)
