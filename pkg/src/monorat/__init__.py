"""Bernstein-type inequality machinery for monotone rational functions on [-1, 1].

Submodules:

* :mod:`monorat.ratcore` -- rational forms, closed-form calculus, norms, Sturm certificates
* :mod:`monorat.miranda` -- root finding on boxes under Poincare-Miranda face conditions
* :mod:`monorat.comparison` -- interpolation nodes and upper-bound verification
* :mod:`monorat.extremal` -- near-extremal functions by bump stacking
* :mod:`monorat.io` -- JSON function documents and CSV output
* :mod:`monorat.cli` -- the ``monorat`` command
"""
from .ratcore import (Difference, KernelSum, LinearPlusBumps, RationalFn, Transfer,
                      certify_increasing, derivative_at, evaluate, sup_norm, to_rational,
                      transfer_to_odd)
from .miranda import BoxN, SolverConfig, VectorField, solve
from .comparison import (f_delta, find_thresholds, solve_interpolation_nodes,
                         verify_corollary1, verify_theorem1)
from .extremal import construct

__version__ = "0.1.0"
