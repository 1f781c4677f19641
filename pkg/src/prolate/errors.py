"""Exception types shared across the package."""


class ProlateError(Exception):
    """Base class for all package errors."""


class ParameterError(ProlateError, ValueError):
    """A parameter is outside its documented domain."""


class EigensolverError(ProlateError, RuntimeError):
    """The eigensolver failed to converge."""


class EmptyCutoffError(ProlateError, RuntimeError):
    """A spectral cutoff retained no modes."""


class DataCoverageError(ProlateError, RuntimeError):
    """Too much of the data domain is flagged missing for a reconstruction."""


class EmptyQuadratureError(ProlateError, RuntimeError):
    """A quadrature construction produced no nodes."""


class CacheError(ProlateError, RuntimeError):
    """A basis cache file is malformed or fails its checksum."""
