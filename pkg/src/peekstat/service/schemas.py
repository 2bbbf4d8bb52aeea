"""Request/response bodies for the experiment service.

The config payload mirrors the CLI config file one-to-one; structural
validation of process/potential/mu specs happens in the harness so both
entry points reject bad configs with identical messages.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class CommandRequest(BaseModel):
    config: dict | None = Field(
        default=None, description="experiment config; omitted fields use defaults"
    )
    seed: int | None = Field(default=None, description="master seed override")
    paths: int | None = Field(default=None, description="path-count override")
    horizon: int | None = Field(default=None, description="horizon override")


class CommandResponse(BaseModel):
    summary: dict
    summary_json: str = Field(description="exact bytes of summary.json")
    paths_csv: str = Field(description="exact bytes of paths.csv")
    records_csv: str = Field(description="exact bytes of records.csv")
    exit_code: int


class HealthResponse(BaseModel):
    status: str
    build: str
