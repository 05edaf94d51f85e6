"""Domain errors raised by the services; the CLI renders them as one-line diagnostics."""

from typing import Optional

from pydantic import ValidationError


def _restore(cls, message, state):
    error = cls.__new__(cls)
    Exception.__init__(error, message)
    error.__dict__.update(state)
    return error


class NicmapError(Exception):
    """Base class for every error the toolkit raises on purpose."""

    def __reduce__(self):
        # subclass __init__ signatures differ from args; rebuild from message and attributes
        return _restore, (type(self), str(self), dict(self.__dict__))


class CoreAlreadyUsed(NicmapError):
    def __init__(self, core):
        self.core = core
        super().__init__(f"Core {tuple(core)} is already claimed")


class ClusterFull(NicmapError):
    def __init__(self, requested: int, available: int):
        self.requested = requested
        self.available = available
        super().__init__(
            f"Cluster cannot hold {requested} process(es): only {available} free core(s)"
        )


class PatternUndefined(NicmapError):
    def __init__(self, job_id: int):
        self.job_id = job_id
        super().__init__(f"Job {job_id} has an explicit matrix; there is no pattern to expand")


class SchemaError(NicmapError):
    def __init__(self, path: str, message: str, source: Optional[str] = None):
        self.path = path
        self.source = source
        where = f"{source}: " if source else ""
        location = path or "<document>"
        super().__init__(f"{where}{location}: {message}")

    @classmethod
    def from_validation(cls, exc: ValidationError, source: Optional[str] = None) -> "SchemaError":
        """Report the first pydantic error with its location joined by dots."""
        first = exc.errors()[0]
        path = ".".join(str(part) for part in first.get("loc", ()))
        return cls(path, first.get("msg", "invalid value"), source)


class UnplacedProcess(NicmapError):
    def __init__(self, job_id: int, process: int):
        self.job_id = job_id
        self.process = process
        super().__init__(f"Process {process} of job {job_id} has no core in the placement")


class ReportError(NicmapError):
    def __init__(self, target: str, reason: str):
        self.target = target
        super().__init__(f"Cannot write report to {target}: {reason}")
