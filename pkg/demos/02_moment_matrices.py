"""Moment machinery: bases, basis products, moment matrices, Riesz functional.

A moment vector y assigns a value to every monomial up to some degree.  Its
moment matrix M_d(y) has entries y_{beta+gamma}; y comes from a nonnegative
measure exactly when these matrices are PSD, which is what links moments to
sums of squares.
"""

import numpy as np

from l1sos import (
    Polynomial,
    atomic_moments,
    basis_products,
    enumerate_basis,
    gaussian_moments,
    moment_matrix,
    riesz,
)

# The degree-2 basis in two variables: 6 monomials in graded-lex order.
basis = enumerate_basis(2, 2)
print("basis:", basis.monomials)

# Basis products: v(x) v(x)^T = sum_alpha x^alpha B_alpha.  Each B_alpha is
# a 0/1 matrix marking which basis pairs multiply to x^alpha.
bp = basis_products(2, 1)
print("B for x1*x2:")
print(bp.matrix((1, 1)))

# Moments of a two-atom measure; the moment matrix is PSD by construction.
points = [[0.5, -1.0], [1.5, 0.25]]
weights = [1.0, 0.5]
y = atomic_moments(2, 4, points, weights)
m = moment_matrix(y, 2)
print("atomic moment matrix eigenvalues:", np.linalg.eigvalsh(m).round(6))

# The Riesz functional of a Dirac measure is plain evaluation.
f = Polynomial(2, {(2, 1): 3.0, (0, 0): -1.0})
y_dirac = atomic_moments(2, 4, [[0.3, 0.7]], [1.0])
print("L_y(f) =", riesz(y_dirac, f), " f(0.3, 0.7) =", f.evaluate([0.3, 0.7]))

# Gaussian moments give a strictly feasible point for the moment-side
# programs: every |y_alpha| <= 1/2 and the moment matrix is positive
# definite.
yg = gaussian_moments(2, 6)
print("gaussian max |y_alpha|:", np.max(np.abs(yg.values)))
print("gaussian M_3(y) min eigenvalue:", np.linalg.eigvalsh(moment_matrix(yg, 3))[0])
