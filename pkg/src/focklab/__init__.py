"""focklab: numerical laboratory for weighted spaces of entire functions.

Builds and audits the objects attached to the radial weight
phi(z) = alpha (log+ |z|)^2: reference lattices and their perturbations,
reproducing-kernel moments, canonical products, Riesz-basis decision
procedures, Beurling-type densities, completion/thinning constructions,
interpolation operators and line sampling measures.
"""

__version__ = "0.1.0"

from .numerics import LogComplex, RatioBand, adaptive_quadrature, hermitian_extremes, log_sum
from .weights import LogPoint, Weight, is_separated
from .sequences import PerturbationCoords, PointSeq, decompose, gallery, reference_gamma

__all__ = [
    "__version__",
    "LogComplex", "RatioBand", "adaptive_quadrature", "hermitian_extremes", "log_sum",
    "LogPoint", "Weight", "is_separated",
    "PerturbationCoords", "PointSeq", "decompose", "gallery", "reference_gamma",
]
