# # The cyclotomic product Phi_N
#
# Phi_N is the product of the first N cyclotomic polynomials.  Its roots sit
# at the Farey fractions of order N, and M(Phi_N) = 1.  The interesting
# quantity is log M+(Phi_N), which grows with N.

# In[1]:

from sublevel.experiments import star_discrepancy
from sublevel.mahler import CycloEvalPlan, farey_angles, phiN_growth

plan = CycloEvalPlan.build(12)
print(plan.degree(), len(farey_angles(12)))
print(plan.expand().coeffs[:8])


# Farey points spread evenly as N grows.

# In[2]:

for N in (5, 20, 80):
    print(N, star_discrepancy([float(x) for x in farey_angles(N)]))


# Growth table: quadrature graded toward the Farey angles next to a sampling
# estimate of the same mean.  The fitted exponent is descriptive only.

# In[3]:

table = phiN_growth([5, 10, 20, 40], samples=1 << 20)
print(table.to_csv())
print("fitted exponent", table.exponent)
