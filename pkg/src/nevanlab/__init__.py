"""nevanlab: numerical value-distribution laboratory for entire curves.

Computes Nevanlinna functionals (order, proximity, counting functions) of
exponential-polynomial curves in projective space, runs second-main-theorem
style inequality checks against a frozen slack model, decides Borel-type
degeneracy partitions symbolically, and certifies the explicit hypersurface
constructions (smoothness, general position, plane-curve genus,
Grassmannian codimension bookkeeping).
"""

from .kernels import backend_name

__version__ = "0.1.0"

__all__ = ["backend_name", "__version__"]
