"""Exception hierarchy shared across the pipeline."""


class MVOV3DError(Exception):
    """Base class for all library errors."""


class ConfigurationError(MVOV3DError):
    """Mismatched shapes, bad parameters, or inconsistent inputs."""


class DegenerateInputError(MVOV3DError):
    """Input is mathematically unusable (e.g. zero-norm vector)."""


class DataError(MVOV3DError):
    """Values out of range for their declared domain (e.g. bad label ids)."""


class LoadError(MVOV3DError):
    """A scene file failed parsing or validation; message names the file."""
