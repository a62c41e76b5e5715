"""Sparse polynomials: construction, arithmetic, the l1 coefficient norm.

Polynomials are immutable maps from exponent vectors to coefficients.  The
l1 norm of the coefficient vector is the distance measure used throughout
the package.
"""

from l1sos import Polynomial, parse_text, to_text

x1 = Polynomial.variable(2, 0)
x2 = Polynomial.variable(2, 1)

# The running example: nonnegative on R^2 but not a sum of squares.
f = x1**2 * x2**2 * (x1**2 + x2**2 - 1.0) + 1.0 / 27.0
print("f =", f)
print("degree:", f.degree())
print("l1 norm:", f.l1_norm())

# Evaluation: the global minimum 0 is attained at (+-(1/3)^0.5, +-(1/3)^0.5).
p = (1.0 / 3.0) ** 0.5
print("f at minimizer:", f.evaluate([p, p]))
print("f at (1, 1):", f.evaluate([1.0, 1.0]))

# Arithmetic is exact on the sparse representation: cancellations remove
# terms from the map entirely.
g = f - f + (x1 + x2) ** 2
print("(x1 + x2)^2 =", g)

# The text format round-trips bit-exactly.
text = to_text(f)
print("serialized:")
print(text)
assert parse_text(text) == f
print("round trip exact: ok")
