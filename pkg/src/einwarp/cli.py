"""Command-line front end: a thin client over the scenario service layer.

By default scenarios run in-process through the same functions the HTTP
endpoints call; with --server the run is delegated to a remote einwarp
service and the returned report is written locally.  Exit codes: 0 all checks
passed, 1 a check failed, 2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import scenarios
from .errors import (
    EinwarpError,
    InvalidParameter,
    ParameterConstraintViolated,
    UnknownScenario,
)
from .geometry import FDConfig


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="einwarp",
        description="Construct warped-product Einstein geometries and verify them numerically.",
    )
    parser.add_argument("--scenario", metavar="ID", help="scenario to run")
    parser.add_argument("--set", dest="assignments", action="append", default=[],
                        metavar="KEY=VALUE", help="override a scenario parameter (repeatable)")
    parser.add_argument("--samples", type=int, default=64,
                        help="sample points per check (default 64)")
    parser.add_argument("--fd-step", type=float, default=1e-3,
                        help="relative finite-difference step (default 1e-3)")
    parser.add_argument("--fd-order", type=int, default=4, choices=(2, 4),
                        help="finite-difference stencil order (default 4)")
    parser.add_argument("--tol", type=float, default=None,
                        help="override every check tolerance")
    parser.add_argument("--seed", type=int, default=0, help="sampler seed (default 0)")
    parser.add_argument("--report", metavar="PATH", help="write the verification report here")
    parser.add_argument("--dump", metavar="PATH",
                        help="write per-sample residual rows here")
    parser.add_argument("--list", action="store_true", help="list registered scenarios")
    parser.add_argument("--relax", action="store_true",
                        help="allow dimensions below the theorem-level thresholds")
    parser.add_argument("--server", metavar="URL",
                        help="run on a remote einwarp service instead of in-process")
    parser.add_argument("--serve", action="store_true", help="start the HTTP service")
    parser.add_argument("--host", default="127.0.0.1", help="bind address for --serve")
    parser.add_argument("--port", type=int, default=8000, help="port for --serve")
    return parser


def _parse_assignments(pairs: list[str]) -> dict:
    overrides = {}
    for raw in pairs:
        if "=" not in raw:
            raise InvalidParameter(raw, "expected KEY=VALUE")
        key, value = raw.split("=", 1)
        key = key.strip()
        try:
            overrides[key] = float(value)
        except ValueError:
            raise InvalidParameter(key, f"cannot parse {value!r} as a number")
    return overrides


def _print_listing() -> None:
    for entry in scenarios.list_scenarios():
        params = ", ".join(f"{k}={v:g}" for k, v in entry["parameters"].items())
        print(f"{entry['id']:22s} {entry['description']}")
        print(f"{'':22s} parameters: {params}")


def _print_report(report_dict: dict) -> None:
    for c in report_dict["checks"]:
        status = "PASS" if c["passed"] else "FAIL"
        extra = ""
        if c["estimated_constant"] is not None:
            extra = f"  estimate={c['estimated_constant']:+.6g}"
        print(f"  [{status}] {c['check_id']:32s} max={c['max_residual']:.3e} "
              f"tol={c['tolerance']:.1e}{extra}")
    verdict = "PASSED" if report_dict["overall_passed"] else "FAILED"
    print(f"scenario {report_dict['scenario_id']}: {verdict}")


def _run_remote(server: str, args, overrides: dict) -> dict:
    import httpx

    payload = {
        "overrides": overrides,
        "samples": args.samples,
        "fd_step": args.fd_step,
        "fd_order": args.fd_order,
        "tol": args.tol,
        "seed": args.seed,
        "relax": args.relax,
    }
    base = server.rstrip("/")
    with httpx.Client(base_url=base, timeout=600.0) as client:
        resp = client.post(f"/scenarios/{args.scenario}/run", json=payload)
        if resp.status_code == 404:
            raise UnknownScenario(resp.json().get("detail", "unknown scenario"))
        if resp.status_code == 422:
            raise InvalidParameter(args.scenario, resp.json().get("detail", "bad request"))
        resp.raise_for_status()
        report = resp.json()
        if args.dump:
            dresp = client.post(f"/scenarios/{args.scenario}/samples", json=payload)
            dresp.raise_for_status()
            scenarios._atomic_write(args.dump, dresp.text)
    return report


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.list:
        _print_listing()
        return 0

    if args.serve:
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    if not args.scenario:
        parser.print_usage(sys.stderr)
        print("error: --scenario, --list or --serve is required", file=sys.stderr)
        return 2

    try:
        overrides = _parse_assignments(args.assignments)
        if args.server:
            report_dict = _run_remote(args.server, args, overrides)
            if args.report:
                scenarios._atomic_write(args.report, json.dumps(report_dict, indent=2) + "\n")
        else:
            engine = scenarios.EngineConfig(
                fd=FDConfig(step=args.fd_step, order=args.fd_order),
                seed=args.seed,
                samples=args.samples,
                tol=args.tol,
            )
            report = scenarios.run_scenario(
                args.scenario, overrides, out_path=args.report,
                engine=engine, relax=args.relax,
            )
            if args.dump:
                scenarios.dump_samples(args.scenario, overrides, out_path=args.dump,
                                       engine=engine, relax=args.relax)
            report_dict = report.to_dict()
    except (UnknownScenario, InvalidParameter, ParameterConstraintViolated, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EinwarpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    _print_report(report_dict)
    return 0 if report_dict["overall_passed"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
