# %% [markdown]
# # Action phase probabilities on a qubit
#
# The Kirkwood-Dirac joint of a state over two bases, the conditional
# probability of an energy eigenvector given an initial and a final
# condition, and the action phase carried by each entry.

# %%
import numpy as np

from ergophase import app
from ergophase.models import qubit

m = qubit()
X, Y, E = m.bases['X'], m.bases['Y'], m.bases['E']
spec = m.spectrum

# %%
joint = app.kd_joint(X['+'], E, Y)
print(joint.values)
print('sum =', joint.values.sum())

# %% [markdown]
# Conditioning on a = '+' and b = '+y' gives complex probabilities whose
# arguments are actions in units of hbar.

# %%
p = app.conditional_app(X, Y, spec, '+', '+y')
for label, v in zip(spec.basis.labels, p):
    print(f"n = {label}: P = {v:.6f}, action = {app.action_phase(v):+.6f}")
print('sum =', p.sum())

# %% [markdown]
# Swapping the roles of a and b conjugates the table.

# %%
q = app.conditional_app(Y, X, spec, '+y', '+')
print(np.allclose(q, p.conj()))
