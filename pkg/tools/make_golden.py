#!/usr/bin/env python3
"""Regenerate the golden dumps under golden/.

Each dump is deterministic and self-checked: the script re-carves what it
wrote and fails loudly if any placement does not round-trip byte-exactly, so
a stale or broken golden set can never land in the repo.
"""

from __future__ import annotations

import sys
from pathlib import Path

from memcarve import (
    PadFill,
    PixelFormat,
    PlacementSpec,
    carve_dump,
    default_config,
    match_images,
    synth_dump,
)
from memcarve.standin import standin_image

GOLDEN_DIR = Path(__file__).resolve().parent.parent / "golden"

BLOCK = 4096


def specs():
    yield "rgba_aligned", 16 * BLOCK, [
        PlacementSpec(image=standin_image(1, width=96, height=64, seed=101),
                      format=PixelFormat.RGBA, dump_offset=2 * BLOCK),
    ], []
    yield "argb_padded_junk", 48 * BLOCK, [
        PlacementSpec(image=standin_image(2, width=128, height=80, seed=101),
                      format=PixelFormat.ARGB, leading_pad=37, trailing_pad=101,
                      pad_fill=PadFill.RANDOM, dump_offset=3 * BLOCK),
    ], [(40 * BLOCK, 2 * BLOCK, 9)]
    yield "two_images", 64 * BLOCK, [
        PlacementSpec(image=standin_image(3, width=96, height=64, seed=101),
                      format=PixelFormat.RGBA, leading_pad=25, trailing_pad=13,
                      pad_fill=PadFill.RANDOM, dump_offset=2 * BLOCK),
        PlacementSpec(image=standin_image(4, width=80, height=56, seed=101),
                      format=PixelFormat.ARGB, leading_pad=40, trailing_pad=7,
                      pad_fill=PadFill.ZERO, dump_offset=32 * BLOCK),
    ], []


def main() -> int:
    cfg = default_config()
    GOLDEN_DIR.mkdir(exist_ok=True)
    for name, total, placements, junk in specs():
        dump, truth = synth_dump(placements, total, junk=junk, cfg=cfg, seed=2024)
        result = carve_dump(dump, cfg)
        for placement in truth.placements:
            hits = [match_images(placement.pixels, image, tolerance=1.0,
                                 channel_tolerance=0)
                    for image in result.images]
            if not any(hit.matched for hit in hits):
                print(f"FATAL: {name}: placement at {placement.dump_offset} "
                      f"does not round-trip", file=sys.stderr)
                return 1
        (GOLDEN_DIR / f"{name}.dump").write_bytes(dump.data)
        truth.save(GOLDEN_DIR / f"{name}.truth.json")
        print(f"{name}: {total} bytes, {len(truth.placements)} placement(s), "
              f"{len(result.images)} recovered")
    return 0


if __name__ == "__main__":
    sys.exit(main())
