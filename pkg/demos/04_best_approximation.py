"""Best l1 approximation by a sum of squares.

The closest SOS polynomial to f differs from f only in the constant term
and the top even powers x_i^{2d}, with nonnegative shifts lam; the distance
is sum(lam).  Every result carries the optimal moment vector, the Gram
matrix and an explicit square decomposition, all of which can be rechecked
independently.
"""

import numpy as np

from l1sos import Polynomial, best_l1_sos_approximation, uniform_sos_perturbation, verify

x = Polynomial.variable(1, 0)

# -x^2 is as far from SOS as it gets at this scale: the best degree-2
# approximant is the zero polynomial, at distance 1.
f = -(x**2)
res = best_l1_sos_approximation(f, 1)
print("f =", f)
print("distance rho =", res.rho)
print("lam =", res.lam)
print("approximant g =", res.g)

# Everything in the result can be verified without trusting the solver.
print("\nverification report:")
print(verify(res, f, 1))

# The uniform (tied) perturbation needs eps per perturbation monomial, so
# the free-multiplier optimum is never worse than (n + 1) * eps.
eps, _ = uniform_sos_perturbation(f, 1)
print("\nuniform eps* =", eps, " (n + 1) * eps =", 2 * eps, ">= rho =", res.rho)

# A 2-variable input with mixed signs; the structure of g - f is the same.
x1, x2 = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
f2 = x1**3 * x2 - 2.0 * x1 * x2 + 0.5
res2 = best_l1_sos_approximation(f2, 2)
print("\nf2 =", f2)
print("rho =", res2.rho, " lam =", np.round(res2.lam, 6))
print("g - f2 =", res2.g - f2)
