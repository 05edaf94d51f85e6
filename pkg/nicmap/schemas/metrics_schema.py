from enum import Enum
from typing import Dict, List, Optional
from pydantic import BaseModel, ConfigDict, Field, model_validator


class MetricName(str, Enum):
    TOTAL_WAITING = "total_waiting"
    WORKLOAD_FINISH = "workload_finish"
    TOTAL_JOB_FINISH = "total_job_finish"


# Aggregated results of one (workload, strategy) simulation; times in nanoseconds
class MetricsReport(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    workload: str
    strategy: str
    total_waiting: int = Field(ge=0)
    per_job_finish: Dict[int, int] = Field(default_factory=dict)
    workload_finish: int = Field(0, ge=0)
    total_job_finish: int = Field(0, ge=0)
    per_server_utilization: Dict[str, float] = Field(default_factory=dict)
    peak_queue: Dict[str, int] = Field(default_factory=dict)
    messages: int = Field(0, ge=0)

    @model_validator(mode="after")
    def check_identities(self) -> "MetricsReport":
        finishes = list(self.per_job_finish.values())
        if self.workload_finish != max(finishes, default=0):
            raise ValueError("workload_finish must equal the largest per-job finish")
        if self.total_job_finish != sum(finishes):
            raise ValueError("total_job_finish must equal the sum of per-job finishes")
        for server, value in self.per_server_utilization.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"utilization of {server} is outside [0, 1]: {value}")
        return self

    def metric(self, name: MetricName) -> int:
        return getattr(self, name.value)


class Improvement(BaseModel):
    model_config = ConfigDict(frozen=True)

    metric: MetricName
    candidate: str
    baseline: str
    percent: Optional[float] = None  # None when the baseline value is zero


class ComparisonDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    reports: List[MetricsReport]
    improvements: List[Improvement] = Field(default_factory=list)
