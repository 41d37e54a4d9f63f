"""End-to-end carving: extraction plus per-tile layout inference.

carve_dump keeps a report for every candidate tile, including ones rejected
as non-graphical or too small, because the negative space matters in
forensic use.
"""

from __future__ import annotations

from dataclasses import dataclass

from .extraction import classify_format, scan_raw_tiles, trim_tile
from .layout import TileRejected, recover_image
from .model import (
    CarveConfig,
    LayoutHypothesis,
    PixelFormat,
    RecoveredImage,
    as_memory_dump,
    default_config,
)

VERDICT_RECOVERED = "recovered"
VERDICT_NON_GRAPHICAL = "non_graphical"
VERDICT_TOO_SMALL = "too_small"


@dataclass(frozen=True)
class TileReport:
    """Outcome of one candidate tile: recovered with a layout, or why not.

    ``word_count`` covers the raw block run for extraction-stage rejections
    and the trimmed tile for everything downstream. ``format`` is None when
    classification rejected the run as non-graphical.
    """

    dump_offset: int
    word_count: int
    format: PixelFormat | None
    verdict: str
    layout: LayoutHypothesis | None = None
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class CarveResult:
    images: tuple[RecoveredImage, ...]
    reports: tuple[TileReport, ...]


def carve_dump(dump, cfg: CarveConfig | None = None,
               keep_flagged: bool = False) -> CarveResult:
    """Carve one dump: returns recovered images plus a per-tile report.

    ``dump`` may be a MemoryDump or any bytes-like object. With
    ``keep_flagged`` weak-peak tiles are emitted flagged instead of rejected.
    """
    cfg = cfg or default_config()
    dump = as_memory_dump(dump)
    images: list[RecoveredImage] = []
    reports: list[TileReport] = []
    for raw in scan_raw_tiles(dump, cfg):
        run_words = len(raw.data) // 4
        fmt = classify_format(raw, cfg)
        if fmt is None:
            reports.append(TileReport(raw.dump_offset, run_words, None,
                                      VERDICT_NON_GRAPHICAL))
            continue
        tile = trim_tile(raw, fmt, cfg)
        if tile is None:
            reports.append(TileReport(raw.dump_offset, run_words, fmt,
                                      VERDICT_TOO_SMALL))
            continue
        try:
            image = recover_image(tile, cfg, keep_flagged=keep_flagged)
        except TileRejected as exc:
            reports.append(TileReport(tile.dump_offset, tile.word_count,
                                      tile.format, exc.reason))
            continue
        images.append(image)
        reports.append(TileReport(tile.dump_offset, tile.word_count, tile.format,
                                  VERDICT_RECOVERED, image.layout,
                                  tuple(flag.value for flag in image.flags)))
    return CarveResult(tuple(images), tuple(reports))
