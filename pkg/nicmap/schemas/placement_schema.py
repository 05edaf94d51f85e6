from typing import List
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter


# One row of a placement document: where process `process` of job `job` runs
class PlacementRecord(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    job: int = Field(ge=0)
    process: int = Field(ge=0)
    node: int = Field(ge=0)
    socket: int = Field(ge=0)
    core: int = Field(ge=0)


PlacementDocument = TypeAdapter(List[PlacementRecord])
