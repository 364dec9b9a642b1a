# # Mahler measures by two routes
#
# M(h) is exp of the circle mean of log|h|; M+ and M- split that mean into its
# positive and negative parts.  The Jensen route works from the roots, the
# quadrature route integrates log|h| directly.

# In[1]:

from sublevel import AlgebraicPoly
from sublevel.mahler import is_outer, mahler_jensen, mahler_quadrature_poly

lehmer = AlgebraicPoly((1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1))
print(mahler_jensen(lehmer))
print(mahler_quadrature_poly(lehmer))


# Products multiply Mahler measures.

# In[2]:

p = AlgebraicPoly((2, -1, 0.5j))
q = AlgebraicPoly((1, 3))
print(mahler_jensen(p).m * mahler_jensen(q).m, mahler_jensen(p * q).m)


# Outer polynomials have no zeros inside the disk, and for them the circle
# mean of log|h| equals log|h(0)|.

# In[3]:

for c in [(-2, 1), (-0.5, 1), (1, 1, 1)]:
    r = is_outer(AlgebraicPoly(c))
    print(c, r.outer, r.residual)
