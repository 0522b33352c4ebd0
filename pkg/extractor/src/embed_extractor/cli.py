"""CLI: extract --video PATH --query TEXT --max-frames N --out DIR.

Exit codes: 0 success, 2 usage, 3 undecodable video, 4 encoder failure.
"""

from __future__ import annotations

import sys

import click

from .errors import DecodeError, EncoderLoadError, ExtractorError
from .extract import ExtractionJob, run_extraction

EXIT_DECODE = 3
EXIT_ENCODER = 4


@click.command()
@click.option("--video", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Input video file.")
@click.option("--query", required=True, help="Query text to embed alongside the frames.")
@click.option("--max-frames", default=128, show_default=True, type=click.IntRange(min=1),
              help="Upper bound on extracted frames.")
@click.option("--fps", default=1.0, show_default=True, type=float,
              help="Frame sampling rate before the cap applies.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Output directory for frames.npy, query.npy, manifest.json.")
@click.option("--encoder", default="siglip", show_default=True,
              type=click.Choice(["siglip", "hash"]),
              help="Dual encoder backend; 'hash' is a deterministic offline stand-in.")
@click.option("--model", "model_name", default=None,
              help="Override the pretrained model name for the siglip backend.")
def main(video, query, max_frames, fps, out_dir, encoder, model_name):
    """Decode a video, embed frames and query, write embedding files."""
    if not query.strip():
        raise click.UsageError("--query must be nonempty")
    try:
        job = ExtractionJob(
            video=video, query=query, out_dir=out_dir,
            max_frames=max_frames, sample_fps=fps,
            encoder=encoder, model_name=model_name,
        )
        manifest = run_extraction(job)
    except DecodeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_DECODE)
    except EncoderLoadError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_ENCODER)
    except ExtractorError as exc:
        raise click.UsageError(str(exc))
    click.echo(
        f"wrote {manifest['n_frames']} x {manifest['dim']} frame embeddings "
        f"({manifest['encoder']}) to {out_dir}"
    )


if __name__ == "__main__":
    main()
