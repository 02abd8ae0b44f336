"""Command line entry points: compile, analyze, serve the map backend."""

from __future__ import annotations

import json
import runpy
import sys

import click

from .analysis import ControlPlaneModel, computeRibs, tracePath, whatIfAnnounce
from .compilers import compileContainers, compileGraph
from .core import Emulator
from .fixtures import FIXTURES


def _loadEmulator(source: str) -> Emulator:
    """Accept a builtin fixture name or a Python file with build()/emu."""
    if source in FIXTURES:
        return FIXTURES[source]()
    namespace = runpy.run_path(source)
    if callable(namespace.get("build")):
        emu = namespace["build"]()
    else:
        emu = namespace.get("emu")
    if not isinstance(emu, Emulator):
        raise click.ClickException(
            f"{source} must define build() returning an Emulator, or an 'emu' variable"
        )
    return emu


def _rendered(source: str, seed: int | None):
    emu = _loadEmulator(source)
    if seed is not None:
        emu.setSeed(seed)
    return emu.render()


@click.group()
def main() -> None:
    """Build, inspect and serve emulated internets."""


@main.command()
def fixtures() -> None:
    """List the bundled example topologies."""
    for name in sorted(FIXTURES):
        click.echo(name)


@main.command()
@click.argument("source")
@click.option("--out", "outDir", required=True, type=click.Path(), help="output directory")
@click.option("--seed", type=int, default=None, help="override the emulator seed")
@click.option(
    "--format",
    "formats",
    type=click.Choice(["containers", "graph"]),
    multiple=True,
    default=("containers", "graph"),
    help="artifact kinds to write (repeatable)",
)
def compile(source: str, outDir: str, seed: int | None, formats: tuple[str, ...]) -> None:
    """Render SOURCE and write container + graph artifacts to --out."""
    import pathlib

    rendered = _rendered(source, seed)
    out = pathlib.Path(outDir)
    out.mkdir(parents=True, exist_ok=True)
    if "containers" in formats:
        compileContainers(rendered, str(out))
        click.echo(f"wrote {out / 'docker-compose.yml'}")
    if "graph" in formats:
        dot = compileGraph(rendered)
        (out / "topology.dot").write_text(dot)
        click.echo(f"wrote {out / 'topology.dot'}")


@main.group()
def analyze() -> None:
    """Static control plane analysis of a composed topology."""


@analyze.command()
@click.argument("source")
@click.option("--asn", type=int, default=None, help="limit output to one AS")
@click.option("--seed", type=int, default=None)
@click.option("--json", "asJson", is_flag=True, help="emit machine readable output")
def ribs(source: str, asn: int | None, seed: int | None, asJson: bool) -> None:
    """Print the converged per-AS routing tables."""
    model = ControlPlaneModel.fromRendered(_rendered(source, seed))
    result = computeRibs(model)
    table = {}
    for owner in sorted(result.selected):
        if asn is not None and owner != asn:
            continue
        table[owner] = [entry.describe() for entry in result.entriesFor(owner)]
    if asJson:
        click.echo(json.dumps(table, indent=2, sort_keys=True))
        return
    for owner, entries in table.items():
        click.echo(f"AS {owner}:")
        for line in entries:
            click.echo(f"  {line}")


@analyze.command()
@click.argument("source")
@click.option("--src", "srcSpec", required=True, help="source node, e.g. 150/host0")
@click.option("--dst", "dstAddr", required=True, help="destination IPv4 address")
@click.option("--seed", type=int, default=None)
@click.option("--json", "asJson", is_flag=True)
def trace(source: str, srcSpec: str, dstAddr: str, seed: int | None, asJson: bool) -> None:
    """Print the node-level forwarding path from --src to --dst."""
    model = ControlPlaneModel.fromRendered(_rendered(source, seed))
    path = tracePath(model, srcSpec, dstAddr, computeRibs(model))
    if asJson:
        click.echo(json.dumps({"src": srcSpec, "dst": dstAddr, "path": path}))
        return
    if path is None:
        click.echo("unreachable")
        sys.exit(1)
    click.echo(" -> ".join(path))


@analyze.command()
@click.argument("source")
@click.option("--asn", "announcer", type=int, required=True, help="announcing AS")
@click.option("--prefix", required=True, help="prefix to announce, e.g. 10.160.0.0/25")
@click.option("--seed", type=int, default=None)
@click.option("--json", "asJson", is_flag=True)
def hijack(source: str, announcer: int, prefix: str, seed: int | None, asJson: bool) -> None:
    """Diff forwarding decisions before and after an extra announcement."""
    model = ControlPlaneModel.fromRendered(_rendered(source, seed))
    diff = whatIfAnnounce(model, announcer, prefix)
    if asJson:
        payload = {
            "announcer": announcer,
            "prefix": prefix,
            "probe": diff.probe,
            "changes": {
                str(asn): {"before": old, "after": new}
                for asn, (old, new) in sorted(diff.changes.items())
            },
        }
        click.echo(json.dumps(payload, indent=2))
        return
    click.echo(diff.describe())


@main.command()
@click.option("--mode", type=click.Choice(["offline", "live"]), default=None)
@click.option("--manifest", "manifestDir", type=click.Path(), default=None)
@click.option("--port", type=int, default=None)
@click.option("--static", "staticDir", type=click.Path(), default=None)
@click.option("--runtime-socket", "runtimeSocket", default=None)
def mapd(
    mode: str | None,
    manifestDir: str | None,
    port: int | None,
    staticDir: str | None,
    runtimeSocket: str | None,
) -> None:
    """Serve the network map API and UI over HTTP and websockets."""
    import os

    from .mapd.server import main as serveMain

    if mode:
        os.environ["MAPD_MODE"] = mode
    if manifestDir:
        os.environ["MAPD_MANIFEST"] = manifestDir
    if port is not None:
        os.environ["MAPD_PORT"] = str(port)
    if staticDir:
        os.environ["MAPD_STATIC_DIR"] = staticDir
    if runtimeSocket:
        os.environ["MAPD_RUNTIME_SOCKET"] = runtimeSocket
    serveMain()


if __name__ == "__main__":
    main()
