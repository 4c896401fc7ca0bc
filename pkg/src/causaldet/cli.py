"""Command line client for the service.

Runs against an in-process service instance by default, or against a remote
server with --server.  The client only shapes requests and writes responses;
all computation lives behind the HTTP surface.

Exit codes: 0 success, 2 usage or parse error, 3 unphysical input, 4 missing
dependency artifact (for example a bounds table when a p-range is requested).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from . import __version__
from .serialize import csv_text

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNPHYSICAL = 3
EXIT_MISSING_ARTIFACT = 4

_STATUS_TO_EXIT = {400: EXIT_UNPHYSICAL, 422: EXIT_USAGE, 424: EXIT_MISSING_ARTIFACT}


class _CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Client:
    """POSTs to the in-process app or to a remote server, same interface."""

    def __init__(self, server: Optional[str]):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=3600.0)
        else:
            import warnings

            with warnings.catch_warnings():
                # starlette warns about its own test client dependency pin
                warnings.simplefilter("ignore", DeprecationWarning)
                from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app)

    def post(self, path: str, payload: dict) -> dict:
        import httpx

        try:
            resp = self._client.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise _CliError(f"cannot reach service: {exc}", 1) from None
        if resp.status_code != 200:
            try:
                detail = resp.json().get("detail")
            except ValueError:
                detail = resp.text
            code = _STATUS_TO_EXIT.get(resp.status_code, 1)
            raise _CliError(f"service error {resp.status_code}: {detail}", code)
        return resp.json()


def _load_json_arg(value: str, what: str) -> dict:
    """Parse inline JSON or read it from a file, with a line/field diagnostic."""
    if value.lstrip().startswith("{"):
        text, origin = value, "<inline>"
    else:
        path = Path(value)
        if not path.exists():
            raise _CliError(f"{what} file not found: {value}", EXIT_USAGE)
        text, origin = path.read_text(encoding="utf-8"), value
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _CliError(
            f"malformed JSON in {origin} at line {exc.lineno} column {exc.colno}: {exc.msg}",
            EXIT_USAGE,
        ) from None
    if not isinstance(doc, dict):
        raise _CliError(f"{what} must be a JSON object, got {type(doc).__name__}", EXIT_USAGE)
    return doc


def _write_text(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit(doc: dict, args: argparse.Namespace, csv_table) -> None:
    """Write the response as JSON, or as CSV plus a .meta.json sidecar."""
    if args.format == "json":
        _write_text(json.dumps(doc, indent=2) + "\n", args.out)
        return
    header, rows = csv_table(doc)
    _write_text(csv_text(header, rows), args.out)
    if args.out:
        meta = {"version": doc.get("version", __version__), "config": doc.get("config")}
        Path(args.out + ".meta.json").write_text(
            json.dumps(meta, indent=2) + "\n", encoding="utf-8"
        )


def _csv_exact(doc: dict):
    c = doc["correlation"]
    header = [f"c{j}{k}" for j in (1, 2, 3) for k in (1, 2, 3)] + ["delta"]
    row = [c[j][k] for j in range(3) for k in range(3)] + [doc["delta"]]
    return header, [row]


def _csv_simulate(doc: dict):
    header = ["j", "k", "npp", "npm", "nmp", "nmm", "c_hat", "se"]
    rows = []
    for r in doc["records"]:
        j, k = r["j"], r["k"]
        rows.append(
            [
                j,
                k,
                r["npp"],
                r["npm"],
                r["nmp"],
                r["nmm"],
                doc["c_hat"][j - 1][k - 1],
                doc["se"][j - 1][k - 1],
            ]
        )
    return header, rows


def _csv_werner(doc: dict):
    header = ["omega", "delta_exact", "delta_hat", "ci_lo", "ci_hi"]
    rows = [
        [r["omega"], r["delta_exact"], r["delta_hat"], r["ci_lo"], r["ci_hi"]]
        for r in doc["rows"]
    ]
    return header, rows


def _csv_haar(doc: dict):
    header = ["index", "delta_exact", "delta_hat", "ci_lo", "ci_hi"]
    rows = [
        [r["index"], r["delta_exact"], r["delta_hat"], r["ci_lo"], r["ci_hi"]]
        for r in doc["rows"]
    ]
    return header, rows


def _csv_bounds(doc: dict):
    header = ["p", "lower", "upper", "ndc_class"]
    rows = [
        [p, lo, hi, doc["ndc_class"]]
        for p, lo, hi in zip(doc["p_grid"], doc["lower"], doc["upper"])
    ]
    return header, rows


def _csv_fill(doc: dict):
    with_ci = any(r.get("ci_lo") is not None for r in doc["rows"])
    if with_ci:
        header = ["p", "delta", "ci_lo", "ci_hi"]
        rows = [[r["p"], r["delta"], r["ci_lo"], r["ci_hi"]] for r in doc["rows"]]
    else:
        header = ["p", "delta"]
        rows = [[r["p"], r["delta"]] for r in doc["rows"]]
    return header, rows


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causaldet",
        description="Causal-structure discrimination for qubit pairs via the "
        "determinant of the Pauli correlation matrix.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service; default runs the service in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p_exact = sub.add_parser("exact", help="exact correlation matrix and determinant")
    p_exact.add_argument("--scenario", required=True, help="scenario JSON (inline or file)")
    common(p_exact)

    p_sim = sub.add_parser("simulate", help="shot-based run of all nine settings")
    p_sim.add_argument("--scenario", required=True)
    p_sim.add_argument("--shots", type=int, default=100_000, help="shots per setting")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--bootstrap", type=int, default=1000, help="bootstrap resamples")
    common(p_sim)

    p_w = sub.add_parser("sweep-werner", help="determinant along the werner family")
    p_w.add_argument("--omega-min", type=float, default=-1.0 / 3.0)
    p_w.add_argument("--omega-max", type=float, default=1.0)
    p_w.add_argument("--steps", "--omega-steps", dest="steps", type=int, default=50)
    p_w.add_argument("--shots", type=int, default=None)
    p_w.add_argument("--seed", type=int, default=0)
    p_w.add_argument("--depolarize", type=float, default=0.0)
    p_w.add_argument("--bootstrap", type=int, default=1000)
    common(p_w)

    p_h = sub.add_parser("sweep-haar", help="determinant over random unitaries")
    p_h.add_argument("--count", type=int, required=True)
    p_h.add_argument("--shots", type=int, default=None)
    p_h.add_argument("--seed", type=int, default=0)
    p_h.add_argument("--bootstrap", type=int, default=1000)
    common(p_h)

    p_b = sub.add_parser("bounds", help="optimize the boundary curves for one class")
    p_b.add_argument("--ndc", type=int, choices=(1, 2, 3), required=True)
    p_b.add_argument("--p-steps", type=int, default=101)
    p_b.add_argument("--restarts", type=int, default=64)
    p_b.add_argument("--seed", type=int, default=0)
    common(p_b)

    p_i = sub.add_parser("infer", help="structure claims from a determinant or data")
    p_i.add_argument("--delta", type=float, default=None)
    p_i.add_argument("--from", dest="from_file", default=None, help="experiment data JSON")
    p_i.add_argument("--ndc", type=int, choices=(1, 2, 3), default=None)
    p_i.add_argument("--bounds", default=None, help="bounds table JSON (file or inline)")
    p_i.add_argument("--bootstrap", type=int, default=1000)
    common(p_i)

    p_f = sub.add_parser("fill-regions", help="random mixtures across the p grid")
    p_f.add_argument("--ndc", type=int, choices=(1, 2, 3), required=True)
    p_f.add_argument("--samples", type=int, default=100)
    p_f.add_argument("--p-steps", type=int, default=11)
    p_f.add_argument("--shots", type=int, default=None)
    p_f.add_argument("--seed", type=int, default=0)
    p_f.add_argument("--bootstrap", type=int, default=1000)
    common(p_f)
    return parser


def _run(args: argparse.Namespace) -> int:
    client = _Client(args.server)
    if args.command == "exact":
        payload = {"scenario": _load_json_arg(args.scenario, "scenario")}
        doc = client.post("/exact", payload)
        _emit(doc, args, _csv_exact)
    elif args.command == "simulate":
        if args.shots < 9:
            raise _CliError(f"--shots must be at least 9, got {args.shots}", EXIT_USAGE)
        payload = {
            "scenario": _load_json_arg(args.scenario, "scenario"),
            "shots": args.shots,
            "seed": args.seed,
            "bootstrap": args.bootstrap,
        }
        doc = client.post("/simulate", payload)
        _emit(doc, args, _csv_simulate)
    elif args.command == "sweep-werner":
        payload = {
            "omega_min": args.omega_min,
            "omega_max": args.omega_max,
            "steps": args.steps,
            "shots": args.shots,
            "seed": args.seed,
            "depolarize": args.depolarize,
            "bootstrap": args.bootstrap,
        }
        doc = client.post("/sweep/werner", payload)
        for rej in doc.get("rejected", ()):
            print(
                f"warning: omega={rej['omega']} rejected: {rej['reason']}",
                file=sys.stderr,
            )
        _emit(doc, args, _csv_werner)
    elif args.command == "sweep-haar":
        payload = {
            "count": args.count,
            "shots": args.shots,
            "seed": args.seed,
            "bootstrap": args.bootstrap,
        }
        doc = client.post("/sweep/haar", payload)
        _emit(doc, args, _csv_haar)
    elif args.command == "bounds":
        payload = {
            "ndc": args.ndc,
            "p_steps": args.p_steps,
            "restarts": args.restarts,
            "seed": args.seed,
        }
        doc = client.post("/bounds", payload)
        _emit(doc, args, _csv_bounds)
    elif args.command == "infer":
        if (args.delta is None) == (args.from_file is None):
            raise _CliError("provide exactly one of --delta or --from", EXIT_USAGE)
        payload: dict[str, Any] = {"ndc": args.ndc, "bootstrap": args.bootstrap}
        if args.delta is not None:
            payload["delta"] = args.delta
        else:
            payload["data"] = _load_json_arg(args.from_file, "experiment data")
        if args.bounds is not None:
            payload["bounds"] = _load_json_arg(args.bounds, "bounds table")
        if args.format == "csv":
            raise _CliError("infer reports have no CSV form; use --format json", EXIT_USAGE)
        doc = client.post("/infer", payload)
        _emit(doc, args, None)
    elif args.command == "fill-regions":
        payload = {
            "ndc": args.ndc,
            "samples": args.samples,
            "p_steps": args.p_steps,
            "shots": args.shots,
            "seed": args.seed,
            "bootstrap": args.bootstrap,
        }
        doc = client.post("/fill-regions", payload)
        _emit(doc, args, _csv_fill)
    else:  # pragma: no cover - argparse enforces the choices
        raise _CliError(f"unknown command {args.command!r}", EXIT_USAGE)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
