"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class QadsError(Exception):
    exit_code = 1

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


class ParameterError(QadsError, ValueError):
    exit_code = 2


class DegenerateParameterError(ParameterError):
    """Two braid eigenvalues coincide for the requested root of unity."""


class DomainError(QadsError, ValueError):
    pass


class ResourceError(QadsError):
    exit_code = 3

    def __init__(self, message: str, bound: int | None = None, needed: int | None = None):
        super().__init__(message)
        self.bound = bound
        self.needed = needed

    def to_dict(self) -> dict:
        d = super().to_dict()
        d.update(bound=self.bound, needed=self.needed)
        return d


class CertificationError(QadsError):
    """Interval evaluation could not separate a nonzero value from zero."""


class ConstructionError(QadsError):
    """An exact identity that must hold by construction failed (convention bug)."""


class StructuralError(QadsError):
    pass


class ClaimViolation(QadsError):
    """A computed result contradicts a unitarity statement that is expected to hold."""

    exit_code = 4

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["witness"] = self.witness
        return d


class SinkError(QadsError):
    """The report could not be written to its destination."""

    exit_code = 5
