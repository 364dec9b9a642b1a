# # The constant sequence C_n
#
# C_1 = 1/2 and each step folds in one more power.  The recurrence is run in
# log space with compensated summation, so even n = 10^8 stays cheap.

# In[1]:

import math

from sublevel.cnseq import LEAD_CONSTANT, cn, cn_closed_form, cn_series

print(math.exp(cn(1)), math.exp(cn(2)))


# The recurrence telescopes: log C_n = (log 1/2 + (n-1) log A) / n + log n,
# with A the lead constant.  The iterate and the closed form agree to rounding.

# In[2]:

for n in (10, 1000, 10**6):
    print(n, cn(n), cn_closed_form(n))


# So C_n / n tends to A = 3 sqrt(2) / pi.

# In[3]:

s = cn_series(10**7, checkpoints=8)
print(s.to_csv())
print("limit", LEAD_CONSTANT)
