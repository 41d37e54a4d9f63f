"""Command-line interface: carve dumps, synthesize dumps, run the accuracy suite."""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import click
import numpy as np

from . import __version__, imgio
from .evaluation import NoImagesError, Scenario, run_accuracy_suite
from .model import CarveConfig, MemoryDump, PixelFormat
from .pipeline import VERDICT_RECOVERED, carve_dump
from .standin import write_standin_set
from .synthesis import (
    CarveError,
    PadFill,
    PlacementSpec,
    TransformSpec,
    apply_transforms,
    synth_dump,
)

_CONFIG_OPTIONS = (
    click.option("--block-size", type=int, default=4096, show_default=True,
                 help="Block granularity of the blank filter (bytes, multiple of 4)."),
    click.option("--th", "alpha_threshold", type=float, default=0.20, show_default=True,
                 help="0x00/0xff byte fraction above which a word position is alpha."),
    click.option("--theta0", type=float, default=1.5, show_default=True,
                 help="Minimum normalized spectral peak for a trusted width."),
    click.option("--theta1", type=float, default=2.0, show_default=True,
                 help="Wrap-column guard of the leading-offset test."),
    click.option("--theta2", type=float, default=1.2, show_default=True,
                 help="Required lead of the boundary column over the runner-up."),
    click.option("--theta3", type=float, default=5.0, show_default=True,
                 help="Per-pixel difference threshold of the column distance."),
    click.option("--min-tile-pixels", type=int, default=256, show_default=True,
                 help="Smallest tile (in pixel words) kept after trimming."),
)


def config_options(fn):
    for option in reversed(_CONFIG_OPTIONS):
        fn = option(fn)
    return fn


def build_config(block_size, alpha_threshold, theta0, theta1, theta2, theta3,
                 min_tile_pixels) -> CarveConfig:
    try:
        return CarveConfig(block_size=block_size, alpha_threshold=alpha_threshold,
                           theta0=theta0, theta1=theta1, theta2=theta2,
                           theta3=theta3, min_tile_pixels=min_tile_pixels)
    except ValueError as exc:
        raise click.UsageError(str(exc))


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__)
def main():
    """Recover raw bitmap images from memory-dump files."""


@main.command()
@click.argument("dump_path", type=click.Path(dir_okay=False))
@click.option("-o", "--out-dir", required=True, type=click.Path(file_okay=False),
              help="Directory for recovered images and the manifest.")
@click.option("--keep-flagged", is_flag=True,
              help="Emit potential-false-positive images instead of rejecting them.")
@click.option("--image-format", type=click.Choice(["ppm", "raw"]), default="ppm",
              show_default=True,
              help="Output encoding: PPM (alpha dropped) or headerless raw words "
                   "in the tile's original channel order.")
@config_options
def carve(dump_path, out_dir, keep_flagged, image_format, **config_kwargs):
    """Carve DUMP_PATH and write one image per accepted tile.

    Images are named tile_<offset>.<ext> by their byte offset in the dump.
    manifest.json records every tile, rejected ones included, with its
    offset, word count N, format, inferred geometry (m, n, s, e), flags and
    verdict.
    """
    cfg = build_config(**config_kwargs)
    try:
        data = Path(dump_path).read_bytes()
    except OSError as exc:
        raise click.ClickException(f"cannot read dump: {exc}")
    result = carve_dump(MemoryDump(data, origin=str(dump_path)), cfg,
                        keep_flagged=keep_flagged)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    images_by_offset = {image.dump_offset: image for image in result.images}
    tiles = []
    for report in result.reports:
        entry = {
            "offset": report.dump_offset,
            "N": report.word_count,
            "format": report.format.value if report.format else None,
            "m": report.layout.width if report.layout else None,
            "n": report.layout.height if report.layout else None,
            "s": report.layout.leading if report.layout else None,
            "e": report.layout.trailing if report.layout else None,
            "flags": list(report.flags),
            "verdict": report.verdict,
            "image": None,
        }
        if report.verdict == VERDICT_RECOVERED:
            image = images_by_offset[report.dump_offset]
            if image_format == "ppm":
                name = f"tile_{report.dump_offset}.ppm"
                imgio.encode(image.pixels, out / name, kind="ppm")
            else:
                name = f"tile_{report.dump_offset}.{image.format.value}"
                imgio.encode(image.pixels, out / name,
                             kind=f"raw-{image.format.value}")
            entry["image"] = name
        tiles.append(entry)
    manifest = {
        "dump": str(dump_path),
        "dump_bytes": len(data),
        "config": dataclasses.asdict(cfg),
        "keep_flagged": keep_flagged,
        "tiles": tiles,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
    recovered = sum(1 for t in tiles if t["verdict"] == VERDICT_RECOVERED)
    click.echo(f"{recovered} image(s) recovered from {len(tiles)} tile(s); "
               f"manifest written to {out / 'manifest.json'}")


def _parse_junk(specs) -> list[tuple[int, int, int]]:
    ranges = []
    for text in specs:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise click.UsageError(
                f"--junk {text!r} must look like OFFSET:LENGTH[:SEED]")
        try:
            offset, length = int(parts[0]), int(parts[1])
            seed = int(parts[2]) if len(parts) == 3 else 0
        except ValueError:
            raise click.UsageError(f"--junk {text!r} has non-integer fields")
        ranges.append((offset, length, seed))
    return ranges


@main.command()
@click.argument("images", nargs=-1, required=True, type=click.Path(dir_okay=False))
@click.option("-o", "--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="Output dump file; ground truth goes to <out>.truth.json.")
@click.option("--size", type=int, default=None,
              help="Total dump size in bytes (multiple of block size). "
                   "Default: smallest size that fits all placements plus slack.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for offsets, pads and junk bytes.")
@click.option("--pad-fill", type=click.Choice([f.value for f in PadFill]),
              default="zero", show_default=True,
              help="Fill pattern of the pad words around each image.")
@click.option("--format", "pixel_format", type=click.Choice([f.value for f in PixelFormat]),
              default="rgba", show_default=True, help="Memory channel order.")
@click.option("--noise", type=float, default=0.0, show_default=True,
              help="Gaussian noise sigma added per channel.")
@click.option("--brightness", type=float, default=0.0, show_default=True,
              help="Brightness factor in [-1, 1].")
@click.option("--contrast", type=float, default=0.0, show_default=True,
              help="Contrast factor in [-1, 1].")
@click.option("--scale", type=float, default=1.0, show_default=True,
              help="Bilinear scale ratio in (0, 1].")
@click.option("--junk", multiple=True, metavar="OFFSET:LENGTH[:SEED]",
              help="Fill a byte range with random non-blank junk (repeatable).")
@config_options
def synth(images, out_path, size, seed, pad_fill, pixel_format, noise, brightness,
          contrast, scale, junk, **config_kwargs):
    """Embed IMAGES into a synthetic memory dump with ground truth.

    Transforms apply per image in the order scale, noise, brightness,
    contrast. Each image is placed at a seeded random block-aligned offset
    with random leading/trailing pads shorter than the image width.
    """
    cfg = build_config(**config_kwargs)
    rng = np.random.default_rng(seed)
    fill = PadFill(pad_fill)
    fmt = PixelFormat(pixel_format)
    transforms = []
    if scale != 1.0:
        transforms.append(TransformSpec("scale", scale))
    if noise:
        transforms.append(TransformSpec("noise", noise))
    if brightness:
        transforms.append(TransformSpec("brightness", brightness))
    if contrast:
        transforms.append(TransformSpec("contrast", contrast))
    try:
        placements = []
        cursor = 0
        for path in images:
            pixels = apply_transforms(imgio.decode(path), transforms, rng)
            width = pixels.shape[1]
            lead = int(rng.integers(0, width))
            trail = int(rng.integers(0, width))
            gap_blocks = int(rng.integers(1, 5))
            offset = ((cursor + cfg.block_size - 1) // cfg.block_size
                      + gap_blocks) * cfg.block_size
            placement = PlacementSpec(image=pixels, format=fmt, leading_pad=lead,
                                      trailing_pad=trail, pad_fill=fill,
                                      dump_offset=offset)
            placements.append(placement)
            cursor = offset + placement.byte_length
        if size is None:
            size = ((cursor + cfg.block_size - 1) // cfg.block_size + 2) * cfg.block_size
        dump, truth = synth_dump(placements, size, junk=_parse_junk(junk),
                                 cfg=cfg, seed=seed)
    except (CarveError, imgio.CorruptFile, imgio.UnsupportedFormat, ValueError,
            OSError) as exc:
        raise click.ClickException(str(exc))
    target = Path(out_path)
    if target.parent.name:
        target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(dump.data)
    truth.save(target.with_name(target.name + ".truth.json"))
    click.echo(f"dump of {len(dump.data)} bytes with {len(placements)} "
               f"placement(s) written to {target}")


@main.command("eval")
@click.argument("image_dir", type=click.Path(file_okay=False))
@click.option("--scenario", "scenarios", multiple=True, metavar="KIND:VALUE[,...]",
              help="Transform scenario, e.g. scale:0.5 or noise:40 or "
                   "brightness:0.8,noise:10 (repeatable). Default: the five "
                   "scale ratios 1, 0.5, 0.25, 0.125, 0.0625.")
@click.option("--json", "as_json", is_flag=True, help="Emit the report as JSON.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for offsets, pads and noise.")
@click.option("--standin", type=int, default=0, metavar="COUNT",
              help="Generate COUNT stand-in images into IMAGE_DIR first if it "
                   "holds no images.")
@config_options
def eval_cmd(image_dir, scenarios, as_json, seed, standin, **config_kwargs):
    """Run the accuracy experiments over the images in IMAGE_DIR.

    Each image is transformed, embedded into a fresh synthetic dump at a
    random block-aligned offset with random pads, carved, and compared
    against what was embedded. One table row (or JSON record) per scenario.
    """
    cfg = build_config(**config_kwargs)
    directory = Path(image_dir)
    if standin:
        has_images = directory.is_dir() and any(p.is_file() for p in directory.iterdir())
        if not has_images:
            write_standin_set(directory, count=standin)
    if not scenarios:
        scenarios = ("scale:1", "scale:0.5", "scale:0.25", "scale:0.125",
                     "scale:0.0625")
    try:
        parsed = [Scenario.parse(text) for text in scenarios]
    except ValueError as exc:
        raise click.UsageError(str(exc))
    try:
        report = run_accuracy_suite(directory, parsed, cfg, seed=seed)
    except NoImagesError as exc:
        raise click.ClickException(str(exc))
    click.echo(report.to_json_text() if as_json else report.format_table())


if __name__ == "__main__":
    main()
