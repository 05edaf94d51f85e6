from enum import Enum
from pathlib import Path
from typing import List, Optional
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Strategy(str, Enum):
    BLOCKED = "blocked"
    CYCLIC = "cyclic"
    DRB = "drb"
    NEW = "new"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class ArrivalMode(str, Enum):
    PERIODIC = "periodic"
    POISSON = "poisson"


class NicDuplex(str, Enum):
    FULL = "full"
    HALF = "half"


class WaitingScope(str, Enum):
    ALL = "all"
    NIC_MEM = "nic,mem"


class ThresholdNodes(str, Enum):
    ALL = "all"
    FREE = "free"


def parse_strategies(value: str) -> List[Strategy]:
    """Parse a comma-separated strategy list, keeping first occurrences in order."""
    names = [part.strip().lower() for part in value.split(",") if part.strip()]
    result: List[Strategy] = []
    for name in names:
        strategy = Strategy(name)
        if strategy not in result:
            result.append(strategy)
    return result


# Everything one CLI invocation needs to run mapping, simulation and reporting
class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    cluster_path: Optional[Path] = None
    workload_path: Optional[Path] = None
    strategies: List[Strategy] = Field(min_length=1)
    seed: Optional[int] = None
    out: Optional[Path] = None
    output_format: OutputFormat = OutputFormat.CSV
    nic_duplex: NicDuplex = NicDuplex.FULL
    waiting_servers: WaitingScope = WaitingScope.ALL
    arrivals: ArrivalMode = ArrivalMode.PERIODIC
    threshold_nodes: ThresholdNodes = ThresholdNodes.ALL
    trace: Optional[Path] = None

    @field_validator("strategies", mode="before")
    @classmethod
    def split_strategies(cls, value):
        if isinstance(value, str):
            return parse_strategies(value)
        return value

    @model_validator(mode="after")
    def check_seed(self) -> "RunConfig":
        if self.arrivals is ArrivalMode.POISSON and self.seed is None:
            raise ValueError("--seed is required with --arrivals poisson")
        if self.arrivals is ArrivalMode.PERIODIC and self.seed is not None:
            raise ValueError("--seed only applies to --arrivals poisson")
        return self
