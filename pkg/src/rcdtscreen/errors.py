"""Exception hierarchy shared by all pipeline stages.

Every error carries an ``exit_code`` so the CLI can map failures onto its
exit-code contract: 1 usage, 2 data, 3 numerical.
"""


class PipelineError(Exception):
    exit_code = 2


# --- data / input errors ------------------------------------------------

class UnreadableFile(PipelineError):
    pass


class UnsupportedFormat(PipelineError):
    pass


class IoFailure(PipelineError):
    pass


class DegenerateSize(PipelineError):
    pass


class NoForeground(PipelineError):
    pass


class GridMismatch(PipelineError):
    pass


class NegativeInput(PipelineError):
    pass


class TooFewAngles(PipelineError):
    pass


class MissingExternalImage(PipelineError):
    pass


class InvalidParams(PipelineError):
    pass


class WindowTooLarge(PipelineError):
    pass


class SingleClass(PipelineError):
    pass


class DimensionMismatch(PipelineError):
    pass


class LengthMismatch(PipelineError):
    pass


class EmptyInput(PipelineError):
    pass


# --- numerical errors ---------------------------------------------------

class NonMonotoneWarp(PipelineError):
    exit_code = 3


class ZeroVariance(PipelineError):
    exit_code = 3
