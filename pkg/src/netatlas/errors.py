"""Exception types raised by the atlas pipeline."""


class PipelineError(Exception):
    """Base class for all netatlas errors."""


class DataFormatError(PipelineError):
    """Malformed input file (non-square matrix, bad token, missing column)."""


class DegenerateGraphError(PipelineError):
    """Graph has no positive edge; spectral quantities are undefined."""


class ConvergenceError(PipelineError):
    """Iterative solver did not reach its tolerance within the iteration cap."""


class DegenerateNodeError(PipelineError):
    """A node's fused topology score is (numerically) zero and cannot be inverted."""

    def __init__(self, node, message=None):
        self.node = node
        super().__init__(message or f"degenerate topology at node {node}")


class TooFewSubjectsError(PipelineError):
    """Not enough subjects for the requested clustering or fold split."""


class InvalidBandwidthError(PipelineError):
    """RBF bandwidth must be strictly positive."""


class DegenerateLabelsError(PipelineError):
    """A label group is empty; the two-group optimization is undefined."""


class VanishingWeightError(PipelineError):
    """Subject weight is numerically zero; its kernel inverse would blow up."""


class SingularKernelError(PipelineError):
    """Normalization kernel has a non-positive diagonal entry."""


class PopulationTooSmallError(PipelineError):
    """Cross-diffusion needs at least two subjects."""
