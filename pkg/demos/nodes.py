"""
Thresholds and interpolation nodes
==================================

For f(x) = (1 + d) x / (x + d) with d = 2/9**n the slope function
g = f/x falls through the levels 3 * 9**(i-1) and 9**(i-1).  The node
system lives on the box spanned by those thresholds, and the normalized
Brouwer iteration finds its zero.
"""
import numpy as np

from monorat import f_delta
from monorat.comparison import build_residual_system, find_thresholds, solve_interpolation_nodes
from monorat.miranda import check_face_signs

n = 3
f = f_delta(2.0 / 9.0 ** n)
table = find_thresholds(f, n)
print("u:", table.u)
print("v:", table.v)

# %%
# Closed forms obtained by inverting g(x) = (1 + d)/(x + d).
d = 2.0 / 9.0 ** n
k = np.arange(n)
print("u error:", np.max(np.abs(table.u - ((1 + d) / (3 * 9.0 ** k) - d))))
print("v error:", np.max(np.abs(table.v - ((1 + d) / 9.0 ** k - d))))

# %%
# Opposite signs on opposite faces guarantee a zero inside the box.
F, box = build_residual_system(f, table)
print(check_face_signs(F, box))

# %%
nodes = solve_interpolation_nodes(f, n)
print("z:", nodes.z)
print("residual_inf:", nodes.residual_inf, " interlaced:", nodes.interlaced())
