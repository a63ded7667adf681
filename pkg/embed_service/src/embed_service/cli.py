"""Serve the embedding endpoint: ``embed-service serve --port N``."""

from __future__ import annotations

import sys

import click

from .app import create_app
from .encoder import ModelLoadFailure, load_encoder


@click.group()
def main():
    """Local embedding endpoint for assembly functions."""


@main.command("serve")
@click.option("--port", default=8901, type=int)
@click.option("--host", default="127.0.0.1")
@click.option("--model", "model_spec", default="builtin:hash-proj",
              help="'builtin:hash-proj' or a local/hub model path")
@click.option("--dim", default=1024, type=int)
def serve(port, host, model_spec, dim):
    import uvicorn

    try:
        encoder = load_encoder(model_spec, dimension=dim)
    except ModelLoadFailure as exc:
        click.echo(f"model load failure: {exc}", err=True)
        sys.exit(2)
    uvicorn.run(create_app(encoder), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
