"""Exact computations with homogeneous group-valued measures on the Cantor space.

Submodules:

* :mod:`homspec.cantor` clopen algebra of the Cantor space
* :mod:`homspec.coeff` exact coefficient systems
* :mod:`homspec.spectrum` spectrum handles and axiom checks
* :mod:`homspec.measure` finite measures, synthesis and back-and-forth steps
* :mod:`homspec.matrices` compatible matrices, polycycles and joint targets
* :mod:`homspec.universal` injective weights and measure representation
* :mod:`homspec.cli` command-line front end
"""

from . import cantor, coeff, matrices, measure, spectrum, universal
from .errors import HomspecError

__all__ = ["cantor", "coeff", "spectrum", "measure", "matrices", "universal", "HomspecError"]
__version__ = "0.1.0"
