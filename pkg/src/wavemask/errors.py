"""Exception hierarchy shared by all wavemask modules."""


class WavemaskError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(WavemaskError):
    """Invalid setup: unknown wavelet, bad goal definitions, missing attributes."""


class ShapeError(WavemaskError):
    """Signal length incompatible with the requested transform or operator."""


class DataError(WavemaskError):
    """Malformed input data: ragged CSV rows, unparseable signal files, stale plans."""


class MaskingError(WavemaskError):
    """Masking pipeline failure: unsatisfiable goals, insufficient offset, broken totals."""
