"""Positivity certificates for univariate Hermitian matrix polynomials on closed semialgebraic sets."""

__version__ = "0.1.0"

from .polymat import LaurentMatrixPoly, MatrixPoly, Mode  # noqa: E402
from .semialg import Description, Interval, Point, SemialgSet, natural_description  # noqa: E402

__all__ = [
    "__version__",
    "MatrixPoly",
    "LaurentMatrixPoly",
    "Mode",
    "SemialgSet",
    "Interval",
    "Point",
    "Description",
    "natural_description",
]
