"""Command line front end.

Runs the harness in-process by default; with --server it posts the same
config to a running service and writes the reports the service rendered,
so both modes produce identical files.

Exit codes: 0 all checks pass, 1 an invariant failed, 2 unusable config
or I/O problem.
"""

from __future__ import annotations

import argparse
import json
import sys

from .harness import (
    CommandOutput,
    ConfigError,
    ExperimentConfig,
    default_config_dict,
    emit_report,
    execute_command,
)
from .simulate import TraceSizeError

RUN_COMMANDS = ("simulate", "peek", "verify", "roundtrip")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peekstat",
        description="Sequential-statistics experiment harness: simulate test "
        "martingales, replay peeking strategies, verify pathwise invariants, "
        "and roundtrip max decompositions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "simulate": "simulate paths and dump full traces",
        "peek": "run peeking strategies and tabulate type-I rates",
        "verify": "run the pathwise invariant suite",
        "roundtrip": "rebuild (M, S) from the max process and measure error",
    }
    for name in RUN_COMMANDS:
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("--config", metavar="FILE", help="JSON config file")
        sp.add_argument("--seed", type=int, help="master seed override")
        sp.add_argument("--paths", type=int, help="path-count override")
        sp.add_argument("--horizon", type=int, help="horizon override")
        sp.add_argument("--out", metavar="DIR", help="report directory (default: reports)")
        sp.add_argument(
            "--server",
            metavar="URL",
            help="post the run to a peekstat service instead of running locally",
        )
    serve = sub.add_parser("serve", help="serve the harness over HTTP")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _load_config_dict(args: argparse.Namespace) -> dict:
    if not args.config:
        return default_config_dict(args.command)
    try:
        with open(args.config) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {args.config!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {args.config!r} is not valid JSON: {exc}") from exc


def _run_remote(args: argparse.Namespace, cfg_dict: dict) -> CommandOutput:
    import httpx

    url = args.server.rstrip("/") + "/" + args.command
    body = {
        "config": cfg_dict,
        "seed": args.seed,
        "paths": args.paths,
        "horizon": args.horizon,
    }
    resp = httpx.post(url, json=body, timeout=600.0)
    if resp.status_code == 422:
        detail = resp.json().get("detail", resp.text)
        raise ConfigError(f"server rejected config: {detail}")
    resp.raise_for_status()
    payload = resp.json()
    return CommandOutput(
        summary_json=payload["summary_json"],
        paths_csv=payload["paths_csv"],
        records_csv=payload["records_csv"],
        exit_code=int(payload["exit_code"]),
    )


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service.app import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0
    try:
        cfg_dict = _load_config_dict(args)
        if args.server:
            output = _run_remote(args, cfg_dict)
        else:
            # --out only picks where files land; it is not part of the config
            # echo, so runs into different directories stay byte-identical
            cfg = ExperimentConfig.from_json_dict(cfg_dict).with_overrides(
                seed=args.seed,
                paths=args.paths,
                horizon=args.horizon,
            )
            output = execute_command(args.command, cfg)
        out_dir = args.out or cfg_dict.get("out_dir") or "reports"
        targets = emit_report(out_dir, output)
    except (ConfigError, TraceSizeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for key in ("summary", "paths", "records"):
        print(f"wrote {targets[key]}")
    if args.command in ("verify", "roundtrip"):
        print("all checks pass" if output.exit_code == 0 else "CHECK FAILURE")
    return output.exit_code


if __name__ == "__main__":
    sys.exit(main())
