"""SU(2)-symmetry-classified Trotter decomposition toolkit."""

__version__ = "0.1.0"
