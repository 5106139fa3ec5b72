"""Command line front end for the staged pipeline.

Every config field is reachable as a flag; a JSON config file can
carry the baseline and flags override it. The default output directory
comes from the SPREADNET_OUT environment variable when set.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import click

from spreadnet.pipeline import (
    OUT_DIR_ENV,
    STAGES,
    PipelineConfig,
    StageError,
    run_all,
    run_stage,
)

_STAGE_BLURBS = {
    "ingest": "parse and normalize the raw event logs",
    "graph": "build the collector-to-spreader diffusion graph",
    "hits": "score users with HITS and classify roles",
    "spreader-net": "link spreaders by audience overlap",
    "communities": "Louvain communities and connected components",
    "centrality": "betweenness centrality on the spreader network",
    "profile": "per-user categories, languages and mention periods",
    "report": "paper-style summary tables and time series",
    "export": "GraphML export of the annotated spreader network",
}


@click.group()
@click.version_option(package_name="spreadnet")
def main() -> None:
    """Diffusion-network analysis of paper mentions on social media."""


@main.command("stages")
def stages_command() -> None:
    """List pipeline stages in execution order."""
    for stage in STAGES:
        click.echo(f"{stage:<13} {_STAGE_BLURBS[stage]}")


@main.command("run")
@click.argument("stage", type=click.Choice(STAGES + ("all",)))
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="JSON file with config fields; explicit flags override it.",
)
@click.option("--mentions", "mentions_path", type=click.Path(), default=None, help="Mention tweets JSONL.")
@click.option("--interactions", "interactions_path", type=click.Path(), default=None, help="Like/retweet events JSONL.")
@click.option("--metadata", "metadata_path", type=click.Path(), default=None, help="Paper metadata JSONL.")
@click.option("--users", "users_path", type=click.Path(), default=None, help="User records JSONL.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help=f"Output directory (default ${OUT_DIR_ENV} or ./spreadnet-out).")
@click.option("--threshold", type=float, default=None, help="Audience-overlap threshold in (0, 1].")
@click.option("--hits-tolerance", type=float, default=None, help="HITS convergence tolerance.")
@click.option("--hits-max-iterations", type=int, default=None, help="HITS iteration cap.")
@click.option("--hits-norm", type=click.Choice(["l2", "l1"]), default=None, help="Normalization used between HITS half-steps.")
@click.option("--zero-epsilon", type=float, default=None, help="Threshold below which a score counts as zero.")
@click.option("--resolution", "louvain_resolution", type=float, default=None, help="Louvain resolution parameter.")
@click.option("--seed", "louvain_seed", type=int, default=None, help="Louvain seed; 0 keeps the canonical visit order.")
@click.option("--weighted/--unweighted", "louvain_weighted", default=None, help="Use overlap coefficients as Louvain edge weights.")
@click.option("--normalized/--raw", "betweenness_normalized", default=None, help="Normalize betweenness per component.")
@click.option("--top-k", type=int, default=None, help="Rows in the key-user tables.")
@click.option("--strict/--lenient", "strict_ingest", default=None, help="Abort on the first malformed input line.")
def run_command(stage: str, config_path: str | None, **flags) -> None:
    """Run one pipeline STAGE (or `all`) against the output directory."""
    data: dict = {}
    if config_path is not None:
        try:
            data.update(json.loads(Path(config_path).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise click.ClickException(f"cannot read config {config_path}: {exc}")
    for key, value in flags.items():
        if value is not None:
            data[key] = value
    if not data.get("out_dir"):
        data["out_dir"] = os.environ.get(OUT_DIR_ENV) or "spreadnet-out"

    try:
        config = PipelineConfig.from_dict(data)
        manifests = run_all(config) if stage == "all" else [run_stage(stage, config)]
    except (StageError, ValueError, OSError) as exc:
        raise click.ClickException(str(exc))

    for manifest in manifests:
        directory = Path(config.out_dir) / manifest["stage"]
        click.echo(f"{manifest['stage']}: {len(manifest['outputs'])} artifacts in {directory}")


if __name__ == "__main__":
    main()
