# PolyForge/main.py

"""
main.py

- Builds the argparse tree, one subcommand per handler in cli_flow
- Turns handler results into text, JSON or CSV output
- Maps PolyForgeError exit codes onto sys.exit
"""

import argparse
import sys

from .config import logger, DEBUG, OUTPUT_FORMAT, STRATEGY, WORKERS
from .ui import (
    console, printer, Console,
    render_action, render_grid, render_report, render_subgroup_presentation, render_table_summary,
)
from .cli_flow import (
    RunConfig,
    handle_action,
    handle_cache,
    handle_certify,
    handle_enumerate,
    handle_family,
    handle_prove,
    handle_rewrite,
    run_selftest,
)
from .polytope import grid_csv
from .utils import PolyForgeError, dump_json, write_output


def _emit(rc: RunConfig, data, render=None, csv_text=None):
    """Print or write the result in the requested format."""
    if rc.format == "csv" and csv_text is not None:
        text = csv_text
    elif rc.format == "text" and render is not None and not rc.out:
        render(data)
        return
    else:
        text = dump_json(data)
    if rc.out:
        path = write_output(text, rc.out)
        if rc.format == "text":
            printer.print_success(f"Wrote {path}", title=None)
    else:
        sys.stdout.write(text)


def _render_prove(result):
    for label, cert in sorted(result["certificates"].items()):
        style = "green" if cert["verdict"] == "proven" else "yellow"
        console.print(f"[bold {style}]{cert['verdict']:>9}[/bold {style}]  {label}  "
                      f"[dim]({cert['defined']} cosets, limit {cert['limit']})[/dim]")
    for label, hits in sorted(result.get("search", {}).items()):
        console.print(f"[cyan]{label}[/cyan] = {hits}")


def _render_family(result):
    console.print(f"[bold cyan]Case {result['case']}, m = {result['m']}[/bold cyan]: order {result['order']}")
    for name, order in sorted({**result["generator_orders"], **result["witness_orders"]}.items()):
        console.print(f"  order({name}) = {order}")


def _render_cache(result):
    for key, value in sorted(result.items()):
        console.print(f"[bold]{key}[/bold]: {value}")


def cmd_enumerate(rc: RunConfig) -> int:
    summary = handle_enumerate(rc)
    _emit(rc, summary, render_table_summary)
    if rc.format == "text" and "table" in summary:
        console.print(summary["table"])
    if "error" in summary:
        printer.print_error(f"Enumeration {summary['error']}")
        return 2
    return 0


def cmd_rewrite(rc: RunConfig) -> int:
    result = handle_rewrite(rc)
    _emit(rc, result, render_subgroup_presentation)
    return 0


def cmd_action(rc: RunConfig) -> int:
    result = handle_action(rc)
    _emit(rc, result, render_action)
    if not result["relations_hold"] or not result["table_matches"]:
        for problem in result["mismatches"]:
            printer.print_warning(problem, title=None)
        return 1
    return 0


def cmd_family(rc: RunConfig) -> int:
    _emit(rc, handle_family(rc), _render_family)
    return 0


def cmd_certify(rc: RunConfig) -> int:
    records = handle_certify(rc)
    failures = [r for r in records if "error" in r]
    if rc.all:
        good = [r for r in records if "error" not in r]
        _emit(rc, records, lambda _: render_grid(good), grid_csv(good))
    else:
        _emit(rc, records[0], render_report, grid_csv(records))
    for r in failures:
        printer.print_error(f"Case {r['case']}, m={r['m']}: {r['error']}", title=None)
    # json records carry the claims themselves
    for r in (records if rc.format == "text" else []):
        for claim in r.get("claims", []):
            if not claim["reproduced"]:
                printer.print_warning(
                    f"Case {r['case']}, m={r['m']}: {claim['claim']} is {claim['observed']}, "
                    f"stated {claim['expected']}",
                    title="Claim not reproduced",
                )
    return max((r["exit_code"] for r in failures), default=0)


def cmd_prove(rc: RunConfig) -> int:
    result = handle_prove(rc)
    _emit(rc, result, _render_prove)
    return 0 if result["all_proven"] else 2


def cmd_selftest(rc: RunConfig) -> int:
    code = run_selftest(quick=rc.quick)
    if code:
        printer.print_error(f"Self-test failed (pytest exit code {code})")
        return 1
    printer.print_success("Self-test passed", title=None)
    return 0


def cmd_cache(rc: RunConfig) -> int:
    _emit(rc, handle_cache(rc), _render_cache)
    return 0


COMMANDS = {
    "enumerate": cmd_enumerate,
    "rewrite": cmd_rewrite,
    "action": cmd_action,
    "family": cmd_family,
    "certify": cmd_certify,
    "prove": cmd_prove,
    "selftest": cmd_selftest,
    "cache": cmd_cache,
}


def _add_common(parser: argparse.ArgumentParser, case: bool = True, file: bool = False):
    if case:
        parser.add_argument("--case", type=int, choices=(1, 2, 3, 4), help="Preset family (1-4)")
    if file:
        parser.add_argument("--file", help="Presentation file with generators, relators and subgroup keys")
    parser.add_argument("--limit", type=int, help="Coset limit (default: POLYFORGE_LIMIT or config)")
    parser.add_argument("--strategy", choices=("hlt", "felsch"), default=STRATEGY, help="Enumeration strategy")
    parser.add_argument("--format", choices=("json", "csv", "text"), default=OUTPUT_FORMAT, help="Output format")
    parser.add_argument("--out", help="Write the output to this path")
    parser.add_argument("--no-cache", action="store_true", help="Bypass the artifact cache")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyforge",
        description="Coset enumeration, subgroup presentations and chiral {4,8} polytope certification.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    p = subparsers.add_parser("enumerate", help="Enumerate the cosets of a subgroup")
    _add_common(p, file=True)
    p.add_argument("--print-table", action="store_true", help="Include the standardized table")

    p = subparsers.add_parser("rewrite", help="Rewrite and simplify a subgroup presentation")
    _add_common(p, file=True)

    p = subparsers.add_parser("action", help="Action matrices of a, b on the kernel basis")
    _add_common(p)
    p.add_argument("--mutate-table", action="store_true", help=argparse.SUPPRESS)

    p = subparsers.add_parser("family", help="Build the pair group of a case at modulus m")
    _add_common(p)
    p.add_argument("--m", type=int, default=1, help="Modulus (default 1)")

    p = subparsers.add_parser("certify", help="Run the full pipeline for a case, or the grid with --all")
    _add_common(p)
    p.add_argument("--m", type=int, default=1, help="Modulus (default 1)")
    p.add_argument("--m-max", type=int, help="Largest modulus for --all")
    p.add_argument("--all", action="store_true", help="Every case and m = 1..m-max")
    p.add_argument("--workers", type=int, default=WORKERS, help="Worker processes for --all")
    p.add_argument("--mutate-table", action="store_true", help=argparse.SUPPRESS)

    p = subparsers.add_parser("prove", help="Certify words trivial by partial enumeration")
    _add_common(p)
    p.add_argument("--word", help="Word in a, b to certify")
    p.add_argument("--search", action="store_true", help="Search conjugation identities in the partial table")

    p = subparsers.add_parser("selftest", help="Run the bundled test suite")
    p.add_argument("--quick", action="store_true", help="Skip slow tests")

    p = subparsers.add_parser("cache", help="Show or clear the artifact cache")
    p.add_argument("--clear", action="store_true", help="Delete every stored artifact")
    p.add_argument("--format", choices=("json", "text"), default=OUTPUT_FORMAT, help="Output format")
    return parser


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    values = vars(args)
    fields = {
        name: values[name]
        for name in RunConfig.__dataclass_fields__
        if name in values and values[name] is not None and name != "extra"
    }
    return RunConfig(**fields)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 0
    try:
        rc = run_config_from_args(args)
        if DEBUG:
            logger.debug(f"Running {rc}")
        return COMMANDS[args.command](rc)
    except PolyForgeError as e:
        stage = getattr(e, "stage", None)
        printer.print_error(str(e), title=f"Failed at {stage}" if stage else "Error")
        return e.exit_code


def entry_point():
    """
    Minimal wrapper for console_scripts entry point.
    Parses command line arguments and runs the chosen command.
    """
    try:
        code = main()
    except KeyboardInterrupt:
        console = Console()
        console.print("\n[bold red]PolyForge terminated by user[/bold red]")
        sys.exit(0)
    except Exception as e:
        logger.error(f"Unhandled error: {e}", exc_info=DEBUG)
        console = Console()
        console.print(f"\n[bold red]Fatal error: {e}[/bold red]")
        sys.exit(1)
    sys.exit(code)


if __name__ == "__main__":
    entry_point()
