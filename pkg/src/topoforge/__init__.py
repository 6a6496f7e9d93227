"""Link diagrams with surgery coefficients, the 3-SAT link construction, surgery certificates and triangulations."""

__version__ = "0.1.0"
