from enum import Enum
from typing import List, Optional
from pydantic import BaseModel, ConfigDict, Field, model_validator


class Pattern(str, Enum):
    ALL_TO_ALL = "all_to_all"
    BCAST_SCATTER = "bcast_scatter"
    GATHER_REDUCE = "gather_reduce"
    LINEAR = "linear"
    EXPLICIT = "explicit"

    def fan_out(self, processes: int) -> int:
        """Destinations of the busiest sender in a job of `processes` processes."""
        if self in (Pattern.ALL_TO_ALL, Pattern.BCAST_SCATTER):
            return processes - 1
        if self is Pattern.EXPLICIT:
            raise ValueError("an explicit job has no fixed fan-out")
        return 1


# One directed edge of a user-supplied communication matrix
class CommEdgeRecord(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    src: int = Field(ge=0)
    dst: int = Field(ge=0)
    length_bytes: int = Field(gt=0)
    rate_per_sec: float = Field(gt=0)
    count: int = Field(ge=1)


# One parallel job as written in a workload document
class JobSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    job_id: int = Field(alias="id", ge=0)
    num_processes: int = Field(alias="processes", ge=2)
    pattern: Pattern
    msg_length: int = Field(alias="length_bytes", gt=0)
    msg_rate: float = Field(alias="rate_per_sec", gt=0)
    msg_count: int = Field(alias="message_count", ge=1)
    explicit_matrix: Optional[List[CommEdgeRecord]] = Field(default=None, alias="matrix")

    @model_validator(mode="after")
    def check_matrix(self) -> "JobSpec":
        if self.pattern is Pattern.EXPLICIT:
            if not self.explicit_matrix:
                raise ValueError("an explicit job needs a non-empty 'matrix'")
            seen = set()
            for record in self.explicit_matrix:
                if record.src >= self.num_processes or record.dst >= self.num_processes:
                    raise ValueError(
                        f"matrix edge {record.src}->{record.dst} is outside 0..{self.num_processes - 1}"
                    )
                if record.src == record.dst:
                    raise ValueError(f"matrix edge {record.src}->{record.dst} is a self-loop")
                if (record.src, record.dst) in seen:
                    raise ValueError(f"matrix edge {record.src}->{record.dst} appears twice")
                seen.add((record.src, record.dst))
        elif self.explicit_matrix is not None:
            raise ValueError(f"'matrix' is only allowed with pattern '{Pattern.EXPLICIT.value}'")
        else:
            fan_out = self.pattern.fan_out(self.num_processes)
            # every destination of the rotation gets at least one message
            if self.msg_count < fan_out:
                raise ValueError(
                    f"message_count {self.msg_count} is below the {self.pattern.value} fan-out of {fan_out}: "
                    f"message_count must be >= {fan_out} for {self.num_processes} processes"
                )
        return self


class WorkloadDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    jobs: List[JobSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_unique_ids(self) -> "WorkloadDocument":
        ids = [job.job_id for job in self.jobs]
        if len(ids) != len(set(ids)):
            raise ValueError("job ids must be unique")
        return self
