"""
Exact monotonicity certificates
===============================

A rational function is strictly increasing on [-1, 1] exactly when the
numerator of its derivative has no zeros there (with the right sign).
Sturm sequences over exact rationals count those zeros with no rounding.
"""
from monorat import RationalFn, certify_increasing
from monorat.ratcore import LinearPlusBumps, sup_norm

# %%
# x**3 is increasing but its slope vanishes at 0: weak passes, strict fails.
cube = RationalFn((0.0, 0.0, 0.0, 1.0), (1.0,))
print(certify_increasing(cube, "strict"))
print(certify_increasing(cube, "weak"))

# %%
# d x/(x**2 + d**2) peaks at x = d and then falls: the failure carries an
# interval where the derivative changes sign.
d = 0.01
bump = RationalFn((0.0, d), (d * d, 0.0, 1.0))
print(certify_increasing(bump))

# %%
# For a certified increasing function the sup-norm is read off the endpoints.
R = LinearPlusBumps(1.0, ((7.84, 0.002),))
cert = certify_increasing(R)
print(cert.method, cert.witness, sup_norm(R, cert), sup_norm(R))
