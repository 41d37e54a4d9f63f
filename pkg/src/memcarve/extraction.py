"""Tile extraction: block splitting, blank filtering, coalescing, pixel-format
classification and border trimming."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .model import CarveConfig, MemoryDump, PixelFormat, Tile


@dataclass(frozen=True)
class Block:
    """Fixed-size slice of a dump; ``index`` is its ordinal within the dump."""

    data: bytes
    index: int


@dataclass(frozen=True)
class RawTile:
    """Maximal run of consecutive surviving blocks, before classification."""

    data: bytes
    dump_offset: int


def split_blocks(dump: MemoryDump, cfg: CarveConfig) -> list[Block]:
    """Split a dump into block_size pieces, dropping the trailing remainder."""
    data = dump.data
    size = cfg.block_size
    count = len(data) // size
    return [Block(data[i * size:(i + 1) * size], i) for i in range(count)]


def is_blank_block(block: Block) -> bool:
    """True iff every byte is 0xff (initialized) or every byte is 0x00 (zeroed)."""
    data = block.data
    return data.count(0xFF) == len(data) or data.count(0x00) == len(data)


def coalesce(blocks: Sequence[Block]) -> list[RawTile]:
    """Merge maximal runs of non-blank blocks with consecutive indices.

    Blank blocks act as separators and never appear in the output; index gaps
    also split runs, so pre-filtered block lists coalesce identically.
    """
    tiles: list[RawTile] = []
    run: list[Block] = []

    def flush() -> None:
        if run:
            tiles.append(RawTile(b"".join(b.data for b in run),
                                 run[0].index * len(run[0].data)))

    for block in blocks:
        if is_blank_block(block):
            flush()
            run = []
        elif run and block.index != run[-1].index + 1:
            flush()
            run = [block]
        else:
            run.append(block)
    flush()
    return tiles


def _words_of(data: bytes) -> np.ndarray:
    return np.frombuffer(data, dtype=np.uint8).reshape(-1, 4)


def classify_format(tile: RawTile, cfg: CarveConfig) -> PixelFormat | None:
    """Detect the channel order from alpha-byte statistics, or reject.

    The fraction of words whose first / last byte is 0x00 or 0xff estimates
    where the alpha channel sits. Ties above the threshold resolve to RGBA
    because the last byte is checked first. Returns None for non-graphical
    data.
    """
    words = _words_of(tile.data)
    first = words[:, 0]
    last = words[:, 3]
    p_first = float(np.count_nonzero((first == 0x00) | (first == 0xFF))) / len(words)
    p_last = float(np.count_nonzero((last == 0x00) | (last == 0xFF))) / len(words)
    if p_last > cfg.alpha_threshold and p_last >= p_first:
        return PixelFormat.RGBA
    if p_first > cfg.alpha_threshold:
        return PixelFormat.ARGB
    return None


def trim_tile(tile: RawTile, fmt: PixelFormat, cfg: CarveConfig) -> Tile | None:
    """Strip leading/trailing runs of all-0x00 or all-0xff words.

    Trimming works on whole 4-byte words so the pixel alignment survives.
    Returns None when fewer than min_tile_pixels words remain.
    """
    words = _words_of(tile.data)
    blank = np.all(words == 0x00, axis=1) | np.all(words == 0xFF, axis=1)
    keep = np.flatnonzero(~blank)
    if keep.size == 0:
        return None
    start = int(keep[0])
    stop = int(keep[-1]) + 1
    if stop - start < cfg.min_tile_pixels:
        return None
    return Tile(words=words[start:stop], format=fmt,
                dump_offset=tile.dump_offset + 4 * start)


def _nonblank_runs(dump: MemoryDump, cfg: CarveConfig) -> Iterable[tuple[int, int]]:
    # vectorized equivalent of split_blocks + is_blank_block + run finding;
    # a block is blank iff min == max and that value is 0x00 or 0xff
    size = cfg.block_size
    count = len(dump.data) // size
    if count == 0:
        return []
    arr = np.frombuffer(dump.data, dtype=np.uint8, count=count * size)
    arr = arr.reshape(count, size)
    lo = arr.min(axis=1)
    hi = arr.max(axis=1)
    keep = ~((lo == hi) & ((lo == 0x00) | (lo == 0xFF)))
    edges = np.diff(keep.astype(np.int8), prepend=0, append=0)
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1)
    return zip(starts.tolist(), stops.tolist())


def scan_raw_tiles(dump: MemoryDump, cfg: CarveConfig) -> list[RawTile]:
    """Blank-filtered, coalesced block runs, before classification.

    Vectorized equivalent of split_blocks + blank filter + coalesce; works on
    whole-block ranges at once but is behaviourally identical to chaining the
    stage functions.
    """
    size = cfg.block_size
    return [RawTile(dump.data[start * size:stop * size], start * size)
            for start, stop in _nonblank_runs(dump, cfg)]


def extract_tiles(dump: MemoryDump, cfg: CarveConfig) -> list[Tile]:
    """Run the full extraction pipeline over one dump.

    Composition of block splitting, blank filtering, coalescing, format
    classification and border trimming; only accepted tiles are returned, in
    dump order.
    """
    tiles: list[Tile] = []
    for raw in scan_raw_tiles(dump, cfg):
        fmt = classify_format(raw, cfg)
        if fmt is None:
            continue
        tile = trim_tile(raw, fmt, cfg)
        if tile is not None:
            tiles.append(tile)
    return tiles
