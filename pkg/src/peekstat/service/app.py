"""FastAPI app exposing the four harness commands.

Responses carry the exact rendered report bytes alongside the parsed
summary, so a client writing them to disk reproduces an in-process run
byte for byte.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, HTTPException

from ..harness import (
    ConfigError,
    ExperimentConfig,
    build_identifier,
    default_config_dict,
    execute_command,
)
from ..simulate import TraceSizeError
from .schemas import CommandRequest, CommandResponse, HealthResponse

COMMANDS = ("simulate", "peek", "verify", "roundtrip")


def _run(command: str, req: CommandRequest) -> CommandResponse:
    try:
        cfg_dict = req.config if req.config is not None else default_config_dict(command)
        cfg = ExperimentConfig.from_json_dict(cfg_dict).with_overrides(
            seed=req.seed, paths=req.paths, horizon=req.horizon
        )
        out = execute_command(command, cfg)
    except (ConfigError, TraceSizeError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return CommandResponse(
        summary=json.loads(out.summary_json),
        summary_json=out.summary_json,
        paths_csv=out.paths_csv,
        records_csv=out.records_csv,
        exit_code=out.exit_code,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="peekstat", version=build_identifier())

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", build=build_identifier())

    def _register(command: str) -> None:
        @app.post(f"/{command}", response_model=CommandResponse, name=command)
        def endpoint(req: CommandRequest) -> CommandResponse:
            return _run(command, req)

    for command in COMMANDS:
        _register(command)
    return app
