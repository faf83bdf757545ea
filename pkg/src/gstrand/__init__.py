from .algebra import CATALOG, AlgebraElement, AlgebraError, AlgebraTable, build_algebra, validate_algebra

__version__ = "0.1.0"
