"""Plot CLI: render one figure from CSVs, or all six kinds from the
committed samples."""

from __future__ import annotations

import sys

import click

from .figures import FIGURE_KINDS, FigureSpec, render, render_all
from .samples import default_specs


@click.group()
def main():
    """Figure rendering for simulator CSV outputs."""


@main.command("render")
@click.option("--kind", type=click.Choice(FIGURE_KINDS), required=True)
@click.option("--input", "inputs", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Input CSV (repeatable for multi-series figures).")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def cmd_render(kind, inputs, out):
    """Render one figure from the given CSV(s)."""
    try:
        path = render(FigureSpec(tuple(inputs), kind, out))
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(f"wrote {path}")


@main.command("render-all")
@click.option("--out", default="figures", type=click.Path(file_okay=False),
              help="Output directory for the six sample figures.")
def cmd_render_all(out):
    """Render all six figure kinds from the committed sample CSVs."""
    try:
        paths = render_all(default_specs(out))
    except (ValueError, FileNotFoundError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    for p in paths:
        click.echo(f"wrote {p}")


if __name__ == "__main__":
    main()
