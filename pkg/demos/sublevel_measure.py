# # How often is a trigonometric polynomial small?
#
# We estimate J_f(u), the long-run fraction of the real line where |f(x)| < u,
# and compare it with the closed form for f(x) = 1 - e^{ix}.

# In[1]:

import math
import pathlib

import numpy as np

from sublevel import TrigPoly, height
from sublevel.meanmeasure import estimate_J, estimate_K, theorem1_bound

f = TrigPoly.from_json(pathlib.Path(__file__).with_name("two_term.json").read_text())
f


# |1 - e^{ix}| = 2|sin(x/2)|, so J_f(u) = (2/pi) arcsin(u/2) for u < 2.
# The modulus is 2 pi periodic; the sampler detects this and samples one period.

# In[2]:

u = np.array([0.05, 0.25, 0.5, 1.0, 1.9])
curve = estimate_J(f, u, samples=2_000_000, seed=1)
for ui, est, se in zip(u, curve.estimates, curve.std_errors):
    exact = 2 / math.pi * math.asin(ui / 2)
    print(f"u={ui:5.2f}  J~{est:.5f} +- {se:.5f}   exact {exact:.5f}")


# Against the power-law bound C_n H^(-1/n) u^(1/n), here with n = 1:

# In[3]:

print(theorem1_bound(1, height(f), u))


# An incommensurable spectrum has no period; the sampler falls back to a
# long symmetric window.

# In[4]:

g = TrigPoly.from_terms([(0, 1), (1, 0.5j), (math.sqrt(2), -0.8)])
cg = estimate_J(g, [0.1, 0.3], samples=1_000_000, seed=2)
print(cg.window, cg.exact_period, cg.estimates)


# The derivative-based estimate K_f(u) sits above J_f(u).

# In[5]:

k = estimate_K(g, 0.3, samples=1 << 18, seed=3, return_details=True)
print(k.value, (k.omega, k.k, k.v))
