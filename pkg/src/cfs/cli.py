"""Command-line front door.

Subcommands: validate, compute, benchmark, encode, decode, serve.
Inputs may be local paths, http(s) URIs, or share URLs carrying
``?data=``/``?id=`` parameters.

Exit codes: 0 success, 1 domain error (invalid document, broken unit
chain, cycle, ...), 2 I/O or network failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from decimal import Decimal
from pathlib import Path

from cfs import engine, share
from cfs.errors import CfsError
from cfs.resolver import FetchFailedError, ResolvedScenario, Resolver, ResolverConfig
from cfs.schema import (
    JsonSyntaxError,
    Scenario,
    ScenarioUri,
    SchemaViolationError,
    canonical_json,
    parse_scenario,
    validate,
)
from cfs.server import ServerConfig, serve
from cfs.units import DEFAULT_REGISTRY, UnitRegistry

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2
EXIT_USAGE = 64

log = logging.getLogger("cfs")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit 64, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json"), default=None,
                        help="output format (default: table on a terminal, json otherwise)")
    common.add_argument("--strict", action="store_true",
                        help="treat warnings (unknown fields/emission keys) as errors")
    common.add_argument("--units", metavar="PATH",
                        help="JSON file with additional unit definitions")
    common.add_argument("--max-depth", type=int, default=16, metavar="N",
                        help="maximum link depth (default 16)")
    common.add_argument("--timeout", type=float, default=10.0, metavar="SECONDS",
                        help="per-fetch timeout (default 10)")
    common.add_argument("--no-cache", action="store_true",
                        help="disable the document cache")
    common.add_argument("--allow-local", action="store_true",
                        help="allow file:// links even when the root document is remote")
    common.add_argument("--base", metavar="URL",
                        help="base for mapping ?id= identifiers to URIs "
                             "(plain prefix or template with {id})")
    common.add_argument("--verbose", action="store_true",
                        help="log fetch details to standard error")

    parser = _Parser(prog="cfs", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="check a scenario document")
    p.add_argument("input", help="path or URI of the document")

    p = sub.add_parser("compute", parents=[common], help="resolve links and compute emissions")
    p.add_argument("input", help="path, URI, or share URL")

    p = sub.add_parser("benchmark", parents=[common], help="compare two or more scenarios")
    p.add_argument("inputs", nargs="+", help="paths, URIs, or share URLs")

    p = sub.add_parser("encode", parents=[common], help="turn a scenario into a share URL")
    p.add_argument("input", help="path or URI of the document")
    p.add_argument("--viewer", default="http://localhost:8080/", metavar="URL",
                   help="viewer base URL for the share link")

    p = sub.add_parser("decode", parents=[common], help="print the scenario behind a share URL")
    p.add_argument("url", help="share URL, query string, or bare payload")

    p = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--scenario-dir", metavar="DIR", help="directory of hosted {id}.json documents")
    p.add_argument("--ui-dir", metavar="DIR", help="directory with the built web UI")

    return parser


# ---------------------------------------------------------------------------
# Shared input handling


def _registry(args) -> UnitRegistry:
    if args.units:
        return UnitRegistry.with_extensions(args.units)
    return DEFAULT_REGISTRY


def _config(args, *, allow_local: bool = False) -> ResolverConfig:
    return ResolverConfig(
        max_depth=args.max_depth,
        timeout_per_fetch=args.timeout,
        allow_local_files=allow_local or args.allow_local,
        cache_ttl=0.0 if args.no_cache else 300.0,
    )


def _is_share_input(value: str) -> bool:
    query = value.split("?", 1)[1] if "?" in value else value
    return ("?" in value or value.startswith(("data=", "id="))) and (
        "data=" in query or "id=" in query
    )


def _local_uri(value: str) -> ScenarioUri:
    path = Path(value)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {value}")
    return ScenarioUri(path.resolve().as_uri())


def _load_tree(value: str, args, resolver_cache: dict) -> ResolvedScenario:
    """Resolve one CLI input (path, URI, or share URL) to a full tree."""
    registry = _registry(args)

    def resolver_for(config: ResolverConfig) -> Resolver:
        key = (config, registry)
        if key not in resolver_cache:
            resolver_cache[key] = Resolver(config, registry=registry)
        return resolver_cache[key]

    if _is_share_input(value):
        decoded = share.decode_scenario(value)
        if isinstance(decoded, share.ScenarioRef):
            if not args.base:
                raise CfsError(
                    f"cannot map id {decoded.identifier!r} to a URI; pass --base"
                )
            uri = decoded.to_uri(args.base)
            return resolver_for(_config(args)).resolve(uri)
        return resolver_for(_config(args)).resolve_inline(decoded, base=decoded.uri)
    if value.startswith(("http://", "https://")):
        return resolver_for(_config(args)).resolve(ScenarioUri(value))
    if value.startswith("file://"):
        return resolver_for(_config(args, allow_local=True)).resolve(ScenarioUri(value))
    # A plain path: local link resolution is implicitly enabled.
    uri = _local_uri(value)
    return resolver_for(_config(args, allow_local=True)).resolve(uri)


def _read_document(value: str, args) -> tuple[str, ScenarioUri]:
    """Fetch one document's text without following links."""
    if value.startswith(("http://", "https://")):
        import requests

        response = requests.get(
            value, timeout=args.timeout, headers={"Accept": "application/json"}
        )
        if not 200 <= response.status_code < 300:
            raise FetchFailedError(ScenarioUri(value), f"HTTP status {response.status_code}")
        return response.text, ScenarioUri(value)
    if value.startswith("file://"):
        from urllib.parse import urlsplit
        from urllib.request import url2pathname

        path = Path(url2pathname(urlsplit(value).path))
        return path.read_text(encoding="utf-8"), ScenarioUri(value)
    uri = _local_uri(value)
    return Path(value).read_text(encoding="utf-8"), uri


def _out_format(args) -> str:
    if args.format:
        return args.format
    return "table" if sys.stdout.isatty() else "json"


# ---------------------------------------------------------------------------
# Rendering


def _format_mass(kg: Decimal) -> str:
    if kg >= 1000:
        scaled, unit = kg / 1000, "t"
    elif kg >= 1:
        scaled, unit = kg, "kg"
    else:
        scaled, unit = kg * 1000, "g"
    return f"{_format_number(scaled)} {unit}"


def _format_number(value: Decimal) -> str:
    text = str(value.quantize(Decimal("0.001")))
    return text.rstrip("0").rstrip(".") if "." in text else text


def _print_report_table(report: engine.EmissionReport) -> None:
    print(f"Scenario: {report.title}")
    print(f"URI: {report.scenario_uri}")
    for level, totals in report.per_scope.items():
        print(f"{level.value}:")
        for key in sorted(totals):
            print(f"  {key:<6} {_format_mass(totals[key].mass)}")
    print("Grand total:")
    for key in sorted(report.grand_total):
        marker = "" if key in report.common_keys else "  (partial)"
        print(f"  {key:<6} {_format_mass(report.grand_total[key].mass)}{marker}")
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)


def _print_benchmark_table(result: engine.BenchmarkResult) -> None:
    print(f"Common keys: {', '.join(sorted(result.common_keys))}")
    for key in sorted(result.table):
        print(f"{key}:")
        for i, report in enumerate(result.reports):
            mass = result.table[key][i]
            ratio = result.ratios[key][i]
            print(
                f"  [{i + 1}] {report.title:<32} {_format_mass(mass):>14}"
                f"   ratio {_format_number(ratio)}"
            )
    for failure in result.failures:
        print(f"warning: scenario {failure.uri} excluded: {failure.error}", file=sys.stderr)


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_validate(args) -> int:
    try:
        text, origin = _read_document(args.input, args)
    except (OSError, FetchFailedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    registry = _registry(args)
    try:
        scenario = parse_scenario(text, origin, registry=registry)
    except (JsonSyntaxError, SchemaViolationError) as exc:
        violations = getattr(exc, "violations", None)
        if violations:
            for violation in violations:
                print(violation)
        else:
            print(f"error: {exc}")
        return EXIT_DOMAIN
    warnings = validate(scenario, registry=registry)
    for warning in warnings:
        print(warning)
    if warnings and args.strict:
        return EXIT_DOMAIN
    print(f"{args.input}: valid" + (f" ({len(warnings)} warnings)" if warnings else ""))
    return EXIT_OK


def _cmd_compute(args) -> int:
    tree = _load_tree(args.input, args, {})
    report = engine.compute(tree, _registry(args))
    if _out_format(args) == "json":
        print(json.dumps(report.to_json_obj(), indent=2))
    else:
        _print_report_table(report)
    return EXIT_OK


def _cmd_benchmark(args) -> int:
    if len(args.inputs) < 2:
        print("cfs benchmark: error: at least 2 scenarios are required", file=sys.stderr)
        return EXIT_USAGE
    cache: dict = {}
    trees = [_load_tree(value, args, cache) for value in args.inputs]
    result = engine.benchmark(trees, _registry(args))
    if _out_format(args) == "json":
        print(json.dumps(result.to_json_obj(), indent=2))
    else:
        _print_benchmark_table(result)
    return EXIT_OK


def _cmd_encode(args) -> int:
    text, origin = _read_document(args.input, args)
    scenario = parse_scenario(text, origin, registry=_registry(args))
    url = share.encode_scenario(scenario, args.viewer)
    print(url)
    return EXIT_OK


def _cmd_decode(args) -> int:
    decoded = share.decode_scenario(args.url)
    if isinstance(decoded, share.ScenarioRef):
        if not args.base:
            raise CfsError(f"cannot map id {decoded.identifier!r} to a URI; pass --base")
        uri = decoded.to_uri(args.base)
        text, origin = _read_document(uri.value, args)
        decoded = parse_scenario(text, origin, registry=_registry(args))
    print(canonical_json(decoded))
    return EXIT_OK


def _cmd_serve(args) -> int:
    config = ServerConfig(
        host=args.host,
        port=args.port,
        scenario_dir=Path(args.scenario_dir) if args.scenario_dir else None,
        ui_dir=Path(args.ui_dir) if args.ui_dir else None,
        resolver=_config(args),
    )
    try:
        serve(config, registry=_registry(args))
    except OSError as exc:
        print(f"error: cannot serve on {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "compute": _cmd_compute,
    "benchmark": _cmd_benchmark,
    "encode": _cmd_encode,
    "decode": _cmd_decode,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _COMMANDS[args.command](args)
    except (FetchFailedError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CfsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
