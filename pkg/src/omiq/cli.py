"""Command-line entry point.

One subcommand per pipeline stage. Exit codes: 0 on success, 1 on a
validation failure, 2 on an I/O failure.
"""

from __future__ import annotations

import functools
import sys

import click

from omiq.errors import OmiqValidationError
from omiq.pipeline import MODEL_CHOICES, PipelineConfig, run_stage


def _load_config(config, seed, out, model):
    cfg = PipelineConfig.from_file(config) if config else PipelineConfig()
    return cfg.override(seed=seed, out_dir=out, model=model)


def stage_command(name):
    def decorator(func):
        @main.command(name=name, help=func.__doc__)
        @click.option("--config", type=click.Path(), default=None,
                      help="JSON config file; defaults apply when omitted.")
        @click.option("--seed", type=int, default=None, help="Global seed override.")
        @click.option("--out", type=click.Path(), default=None,
                      help="Output directory override.")
        @click.option("--model", type=click.Choice(MODEL_CHOICES), default=None,
                      help="Classifier choice override.")
        @functools.wraps(func)
        def wrapper(config, seed, out, model):
            try:
                cfg = _load_config(config, seed, out, model)
                manifest = run_stage(name, cfg)
            except OmiqValidationError as exc:
                click.echo(f"error: {exc}", err=True)
                sys.exit(1)
            except OSError as exc:
                click.echo(f"i/o error: {exc}", err=True)
                sys.exit(2)
            click.echo(f"{name}: wrote {manifest}")

        return wrapper

    return decorator


@click.group()
def main():
    """Multi-omic lung-subtype classification pipeline."""


@stage_command("synth")
def synth():
    """Generate a synthetic multi-omic cohort with clinical labels."""


@stage_command("ingest")
def ingest():
    """Parse omic matrices, drop non-positive features, join clinical labels."""


@stage_command("engineer")
def engineer():
    """Compute per-feature t statistics and split features by p-value."""


@stage_command("select")
def select():
    """Score, filter by single-feature AUC, and cluster-reduce each subset."""


@stage_command("integrate")
def integrate():
    """Join the selected features of all omics over common samples."""


@stage_command("train")
def train():
    """Fit the configured classifier on the training split."""


@stage_command("evaluate")
def evaluate():
    """Write train/test metrics and ROC points for the trained model."""


@stage_command("report")
def report():
    """Write feature-importance and class-deviation reports."""


if __name__ == "__main__":
    main()
