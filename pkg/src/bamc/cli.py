"""Command-line client for the experiment service.

The CLI talks HTTP: by default it mounts the service in-process (no socket,
no server to start), and with --server it targets a running instance
instead.  `serve` starts that instance.  Exit codes: 0 success, 1 runtime
or server errors, 2 usage/config errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

__all__ = ["main", "parse_config_file"]

CONFIG_KEYS = ("model", "algorithm", "iterations", "runs", "seed",
               "schedule", "rate", "out", "jobs")


class CliError(Exception):
    def __init__(self, message: str, code: int = 1):
        super().__init__(message)
        self.code = code


def parse_config_file(path) -> dict:
    """Plain-text config: one `key value` pair per line, # comments allowed.
    Keys mirror the run flags (model, algorithm, iterations, runs, seed,
    schedule, rate, out, jobs)."""
    entries = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise CliError(f"{path}:{lineno}: expected `key value`, got {raw!r}", code=2)
        key, value = parts
        if key not in CONFIG_KEYS:
            raise CliError(
                f"{path}:{lineno}: unknown key {key!r} (known: {', '.join(CONFIG_KEYS)})",
                code=2,
            )
        entries[key] = value.strip()
    return entries


class Client:
    """Minimal JSON-over-HTTP caller; in-process unless a server URL is given."""

    def __init__(self, server: Optional[str] = None):
        if server is None:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")  # test-client import chatter
                from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app)
            self._base = ""
        else:
            import httpx

            self._client = httpx.Client(timeout=None)
            self._base = server.rstrip("/")

    def call(self, method: str, path: str, payload: Optional[dict] = None) -> dict:
        try:
            response = self._client.request(method, self._base + path, json=payload)
        except Exception as exc:  # connection refused, DNS, ...
            raise CliError(f"cannot reach server: {exc}")
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            code = 2 if response.status_code in (400, 422) else 1
            raise CliError(f"{path} failed ({response.status_code}): {detail}", code=code)
        return response.json()


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--server", default=None,
                   help="base URL of a running service (default: in-process)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bamc",
        description="Anytime MAP search over probabilistic programs: "
                    "run seeded experiments, summarize, and plot.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one (model, algorithm) experiment grid")
    _add_common(run)
    run.add_argument("--config", default=None, help="key-value config file; flags win")
    run.add_argument("--model", default=None)
    run.add_argument("--algorithm", default=None)
    run.add_argument("--iterations", type=int, default=None)
    run.add_argument("--runs", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--schedule", default=None,
                     help="sa cooling: exponential | lundy-mees")
    run.add_argument("--rate", type=float, default=None, help="sa cooling rate")
    run.add_argument("--out", default=None, help="records CSV path")
    run.add_argument("--jobs", type=int, default=None, help="parallel runs (processes)")

    summ = sub.add_parser("summarize", help="per-iteration quantiles of best-so-far")
    _add_common(summ)
    summ.add_argument("--records", required=True, help="records CSV from `run`")
    summ.add_argument("--quantiles", default="0.25,0.5,0.75",
                      help="comma-separated quantiles in [0,1]")
    summ.add_argument("--out", default=None, help="summary CSV path")

    plot = sub.add_parser("plot", help="emit plot-ready figure data (and SVG)")
    _add_common(plot)
    plot.add_argument("--records", required=True, help="records CSV from `run`")
    plot.add_argument("--figure", choices=("quantiles", "run"), default="quantiles")
    plot.add_argument("--quantiles", default="0.25,0.5,0.75")
    plot.add_argument("--run-id", type=int, default=0, help="run for --figure run")
    plot.add_argument("--window", type=int, default=101,
                      help="rolling-median window (odd) for --figure run")
    plot.add_argument("--out", required=True, help="figure data CSV path")
    plot.add_argument("--svg", default=None, help="also render an SVG here")
    plot.add_argument("--title", default="")

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    return parser


def _merge_run_args(args) -> dict:
    merged: dict = {}
    if args.config is not None:
        merged.update(parse_config_file(args.config))
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    missing = [k for k in ("model", "algorithm", "iterations") if k not in merged]
    if missing:
        raise CliError(f"missing required settings: {', '.join(missing)}", code=2)
    try:
        payload = {
            "model": str(merged["model"]),
            "algorithm": str(merged["algorithm"]),
            "iterations": int(merged["iterations"]),
            "runs": int(merged.get("runs", 1)),
            "seed": int(merged.get("seed", 0)),
            "jobs": int(merged.get("jobs", 1)),
        }
        if "schedule" in merged:
            payload["schedule"] = str(merged["schedule"])
        if "rate" in merged:
            payload["rate"] = float(merged["rate"])
        if "out" in merged:
            payload["out"] = str(merged["out"])
    except ValueError as exc:
        raise CliError(f"bad setting value: {exc}", code=2)
    return payload


def _parse_quantiles(text: str) -> list:
    try:
        qs = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise CliError(f"bad quantile list {text!r}", code=2)
    if not qs:
        raise CliError("empty quantile list", code=2)
    return qs


def _cmd_run(args) -> int:
    payload = _merge_run_args(args)
    result = Client(args.server).call("POST", "/experiments", payload)
    best = result["best_log_weight"]
    best_text = "none (no finite-weight trace)" if best is None else f"{best:.6f}"
    print(f"{result['algorithm']} on {result['model']}: "
          f"{result['runs']} runs x {result['iterations']} iterations, "
          f"{result['records']} records, best log-weight {best_text}")
    if result.get("out"):
        print(f"records: {result['out']}")
        print(f"normalized: {result['normalized_out']}")
    return 0


def _cmd_summarize(args) -> int:
    payload = {"records": args.records, "quantiles": _parse_quantiles(args.quantiles)}
    if args.out is not None:
        payload["out"] = args.out
    result = Client(args.server).call("POST", "/summaries", payload)
    finals = ", ".join(
        f"{name}={'-inf' if v is None else format(v, '.6f')}"
        for name, v in sorted(result["final"].items())
    )
    print(f"{result['iterations']} iterations; final {finals}")
    if result.get("out"):
        print(f"summary: {result['out']}")
    return 0


def _cmd_plot(args) -> int:
    payload = {
        "records": args.records,
        "figure": args.figure,
        "quantiles": _parse_quantiles(args.quantiles),
        "run_id": args.run_id,
        "window": args.window,
        "out": args.out,
        "title": args.title,
    }
    if args.svg is not None:
        payload["svg"] = args.svg
    result = Client(args.server).call("POST", "/figures", payload)
    print(f"{result['figure']} figure: {result['rows']} rows -> {result['out']}")
    if result.get("svg"):
        print(f"svg: {result['svg']}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "summarize": _cmd_summarize,
        "plot": _cmd_plot,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
