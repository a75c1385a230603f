# PolyForge/ui.py

from rich.console import Console
from rich.text import Text
from rich.table import Table
from rich.panel import Panel

"""
ui.py

- Houses the Rich console + styling
- Provides a StyledCLIPrinter class for uniform message printing
- Renders coset tables, subgroup presentations, action matrices and polytope reports as text
"""

# Color theme
THEME = {
    "primary":   "#FFFFFF",
    "secondary": "#6AD0FF",
    "accent":    "#6AD0FF",
    "success":   "#96DF71",
    "error":     "#D62828",
    "warning":   "#F2BB05",
    "background": "#1E1F26",
    "text":      "#E6E6E6"
}

PANEL_STYLE = f"bold {THEME['text']} on {THEME['background']}"
BORDER_STYLE = THEME["accent"]
HEADER_STYLE = f"bold {THEME['primary']}"

# The global Rich console
console = Console()


class StyledCLIPrinter:
    """
    A helper class to print styled messages (info, error, warnings) using Rich.
    """
    def __init__(self, console: Console):
        self.console = console

    def print_message(self, message: str, style: str, title=None):
        content = Text(message, style=style)
        panel = Panel(
            content,
            title=title,
            border_style=BORDER_STYLE,
            style=PANEL_STYLE,
            padding=(1, 2)
        ) if title else content
        self.console.print(panel)

    def print_error(self, message: str, title: str = "Error"):
        self.print_message(message, f"bold {THEME['error']}", title)

    def print_warning(self, message: str, title: str = "Warning"):
        self.print_message(message, f"bold {THEME['warning']}", title)

    def print_success(self, message: str, title: str = "Success"):
        self.print_message(message, f"bold {THEME['success']}", title)

    def print_divider(self, title: str = ""):
        self.console.print()
        self.console.rule(title, style=f"{THEME['primary']}")
        self.console.print()


printer = StyledCLIPrinter(console)


def create_styled_table(title=None, clean=False, header=False) -> Table:
    """
    Create a Rich table with optional styling.
    """
    padding = (0, 1) if clean else (0, 2)
    return Table(
        show_header=header,
        header_style=HEADER_STYLE if header else None,
        border_style=None,
        show_lines=False,
        box=None,
        padding=padding,
        title=title,
        expand=False
    )


def _key_value_table(title: str, rows) -> Table:
    table = create_styled_table(title)
    table.add_column(style=f"bold {THEME['secondary']}")
    table.add_column()
    for key, value in rows:
        table.add_row(key, str(value))
    return table


def render_table_summary(summary: dict):
    console.print(_key_value_table("Coset enumeration", [
        ("status", summary["status"]),
        ("index", summary.get("index", "unknown")),
        ("normal", summary.get("normal", "unknown")),
        ("defined", summary["defined"]),
        ("strategy", summary["strategy"]),
    ]))


def render_subgroup_presentation(summary: dict):
    console.print(_key_value_table("Subgroup presentation", [
        ("index", summary["index"]),
        ("Schreier generators", summary["schreier_generators"]),
        ("rewritten relators", summary["rewritten_relators"]),
        ("generators", summary["generators"]),
        ("relators", summary["relators"]),
        ("abelian invariants", summary["abelian_invariants"]),
    ]))
    if summary.get("presentation"):
        console.print(Text(summary["presentation"], style=THEME["text"]))


def render_matrix(name: str, rows):
    table = create_styled_table(f"A_{name}", clean=True)
    for _ in rows[0]:
        table.add_column(justify="right")
    for r in rows:
        table.add_row(*(str(x) for x in r))
    console.print(table)


def render_action(summary: dict):
    for name, rows in summary["matrices"].items():
        render_matrix(name, rows)
    console.print(_key_value_table("Checks", [
        ("determinants", summary["determinants"]),
        ("relators act trivially", summary["relations_hold"]),
        ("matches expected table", summary.get("table_matches", "n/a")),
    ]))


def render_report(record: dict):
    rows = [
        ("case", record.get("case")),
        ("m", record.get("m")),
        ("order", record["order"]),
        ("type", "{%d,%d}" % tuple(record["type"])),
        ("order(ab)", record["product_order"]),
        ("|<a> ∩ <b>|", record["intersection"]),
        ("verdict", record["verdict"]),
        ("chi", record["chi"]),
        ("genus", record["genus"]),
    ]
    witness = record.get("witness")
    if witness:
        rows.append(("witness", witness["relator"]))
        rows.append(("substituted root order", witness["substituted_root_order"]))
    if record.get("solvability"):
        rows.append(("solvable", record["solvability"].get("verdict")))
    console.print(_key_value_table("Polytope", rows))


def render_grid(records):
    table = create_styled_table("Family grid", header=True)
    for column in ("case", "m", "order", "type", "verdict", "chi", "genus"):
        table.add_column(column, justify="right")
    for r in records:
        table.add_row(
            str(r["case"]), str(r["m"]), str(r["order"]), "{%d,%d}" % tuple(r["type"]),
            r["verdict"], str(r["chi"]), str(r["genus"]),
        )
    console.print(table)
