"""
Checking the upper bounds
=========================

The comparison function L = KernelSum(4 * 9**(k-1), z) - R changes sign
more often than its degree allows, which forces R'(0) <= 9**n/2 * R(1).
Here we watch the sign pattern and then run the two bound checks.
"""
import numpy as np

from monorat import certify_increasing, construct, f_delta
from monorat.comparison import (build_comparison_L, odd_extension, sign_pattern_check,
                                solve_interpolation_nodes, verify_corollary1, verify_theorem1)
from monorat.ratcore import declared_degree

n = 2
f = f_delta(2.0 / 9.0 ** n)
nodes = solve_interpolation_nodes(f, n)
L = build_comparison_L(odd_extension(f), nodes)
rep = sign_pattern_check(L, nodes)
print("L'(0) =", rep.dL0, " L'(z) =", rep.dL_nodes)
print("sign changes per gap:", rep.gap_changes, " zero count:", rep.zero_count,
      " need >=", 4 * n + 1)

# %%
# Both bounds on a constructed function.  The slope bound at the origin
# holds with a margin near 9/2 because the construction reaches 9**(n-1).
R = construct(4).function
cert = certify_increasing(R)
print(verify_theorem1(R, 4, cert))
print(verify_corollary1(R, declared_degree(R), cert))
