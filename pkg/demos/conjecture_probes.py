# # Probing the M- chain and the best constant
#
# P_n = 1 + z + ... + z^n and Q_n = (1+z)^n / binom(n, n/2) both have height 1.
# We place random height-1 polynomials between their M- values and see how
# often they fall outside.

# In[1]:

import math

import numpy as np

from sublevel.experiments import (best_constant_probe, conj3_trial, log_mminus_qn_closed, pn,
                                  qn, root_angles)
from sublevel.mahler import mahler_jensen

for n in (2, 4, 8):
    print(n, mahler_jensen(pn(n)).log_m_minus, mahler_jensen(qn(n)).log_m_minus,
          log_mminus_qn_closed(n), -2 * n / math.pi)


# The roots of P_n are equidistributed; those of Q_n all sit at -1.

# In[2]:

print(root_angles(pn(5)), root_angles(qn(5)))


# Random trials: each flagged case is rechecked by both routes at a tighter
# tolerance before it is reported.

# In[3]:

rep = conj3_trial(4, 200, seed=7)
print(rep.lower, rep.upper, len(rep.violations), rep.unconfirmed, rep.summary)


# Empirical lower bound for the best constant at n = 2.

# In[4]:

print(best_constant_probe(2, 50, np.logspace(-3, 0.5, 15), seed=0))
