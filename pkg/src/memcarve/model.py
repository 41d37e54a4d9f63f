"""Shared domain types and tunable thresholds for the carving pipeline.

Everything here is an immutable value object; instances can be shared freely
between threads or processes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class CarveError(Exception):
    """Base class for every error raised by this package."""


class PixelFormat(enum.Enum):
    """Channel order of a 4-byte pixel word: alpha last (RGBA) or first (ARGB)."""

    RGBA = "rgba"
    ARGB = "argb"

    @property
    def alpha_index(self) -> int:
        return 3 if self is PixelFormat.RGBA else 0

    @property
    def rgb_indices(self) -> tuple[int, int, int]:
        return (0, 1, 2) if self is PixelFormat.RGBA else (1, 2, 3)

    def to_rgba(self, words: np.ndarray) -> np.ndarray:
        """Reorder raw words (..., 4) into canonical R,G,B,A byte order."""
        words = np.asarray(words, dtype=np.uint8)
        if words.shape[-1] != 4:
            raise ValueError("pixel words must have 4 bytes")
        if self is PixelFormat.RGBA:
            return words.copy()
        return np.ascontiguousarray(words[..., (1, 2, 3, 0)])

    def from_rgba(self, pixels: np.ndarray) -> np.ndarray:
        """Reorder canonical R,G,B,A pixels (..., 4) into this memory layout."""
        pixels = np.asarray(pixels, dtype=np.uint8)
        if pixels.shape[-1] != 4:
            raise ValueError("pixels must have 4 channels")
        if self is PixelFormat.RGBA:
            return pixels.copy()
        return np.ascontiguousarray(pixels[..., (3, 0, 1, 2)])


class RecoveryFlag(enum.Enum):
    """Warnings attached to a recovered image."""

    POTENTIAL_FALSE_POSITIVE = "potential_false_positive"


@dataclass(frozen=True)
class MemoryDump:
    """Raw byte buffer standing in for a GPU memory snapshot."""

    data: bytes
    origin: str = ""

    def __post_init__(self) -> None:
        if not isinstance(self.data, bytes):
            object.__setattr__(self, "data", bytes(self.data))

    def __len__(self) -> int:
        return len(self.data)


def as_memory_dump(source, origin: str = "") -> MemoryDump:
    """Coerce bytes-like input (or a uint8 array) into a MemoryDump."""
    if isinstance(source, MemoryDump):
        return source
    if isinstance(source, np.ndarray):
        if source.dtype != np.uint8 or source.ndim != 1:
            raise TypeError("dump arrays must be one-dimensional uint8")
        return MemoryDump(source.tobytes(), origin)
    if isinstance(source, (bytes, bytearray, memoryview)):
        return MemoryDump(bytes(source), origin)
    raise TypeError(f"cannot interpret {type(source).__name__} as a memory dump")


@dataclass(frozen=True)
class CarveConfig:
    """All tunable thresholds of the pipeline.

    Defaults follow the reference evaluation setup: 4 KiB blocks, a 20%
    alpha-byte fraction for format detection, spectral-peak threshold 1.5
    and column-distance thresholds (2, 1.2, 5).
    """

    block_size: int = 4096
    alpha_threshold: float = 0.20
    theta0: float = 1.5
    theta1: float = 2.0
    theta2: float = 1.2
    theta3: float = 5.0
    min_tile_pixels: int = 256

    def __post_init__(self) -> None:
        if self.block_size <= 0 or self.block_size % 4 != 0:
            raise ValueError("block_size must be a positive multiple of 4")
        if not 0.0 < self.alpha_threshold < 1.0:
            raise ValueError("alpha_threshold must lie strictly between 0 and 1")
        for name in ("theta0", "theta1", "theta2", "theta3"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.min_tile_pixels < 1:
            raise ValueError("min_tile_pixels must be at least 1")


def default_config() -> CarveConfig:
    """Return the configuration with all reference defaults."""
    return CarveConfig()


@dataclass(frozen=True)
class Tile:
    """Contiguous run of 4-byte pixel words suspected to hold one image.

    ``words`` has shape (N, 4) in raw memory byte order; ``format`` tells how
    those bytes map to channels. ``dump_offset`` is the byte position of the
    first word in the source dump.
    """

    words: np.ndarray
    format: PixelFormat
    dump_offset: int

    def __post_init__(self) -> None:
        words = np.asarray(self.words, dtype=np.uint8)
        if words.ndim != 2 or words.shape[1] != 4 or words.shape[0] < 1:
            raise ValueError("tile words must have shape (N, 4) with N >= 1")
        if self.dump_offset < 0 or self.dump_offset % 4 != 0:
            raise ValueError("dump_offset must be a non-negative multiple of 4")
        if words.flags.writeable:
            words = words.copy()
            words.setflags(write=False)
        object.__setattr__(self, "words", words)

    @property
    def word_count(self) -> int:
        return int(self.words.shape[0])


@dataclass(frozen=True)
class LayoutHypothesis:
    """Inferred geometry of the image inside a tile.

    ``leading`` and ``trailing`` count the pixel words ahead of and behind the
    reshaped image, so ``leading + height*width + trailing`` equals the tile's
    word count.
    """

    width: int
    height: int
    leading: int
    trailing: int

    def __post_init__(self) -> None:
        if self.width < 2 or self.height < 2:
            raise ValueError("recovered images are at least 2x2")
        if self.leading < 0 or self.trailing < 0:
            raise ValueError("pad counts cannot be negative")

    @property
    def word_count(self) -> int:
        return self.leading + self.height * self.width + self.trailing


@dataclass(frozen=True)
class RecoveredImage:
    """A reshaped tile: pixel matrix plus format and provenance metadata."""

    pixels: np.ndarray  # (height, width, 4) uint8, canonical RGBA order
    format: PixelFormat
    layout: LayoutHypothesis
    dump_offset: int
    flags: frozenset[RecoveryFlag] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        pixels = np.asarray(self.pixels, dtype=np.uint8)
        if pixels.ndim != 3 or pixels.shape[2] != 4:
            raise ValueError("pixels must have shape (height, width, 4)")
        if pixels.shape[:2] != (self.layout.height, self.layout.width):
            raise ValueError("pixel matrix does not match the layout")
        if pixels.flags.writeable:
            pixels = pixels.copy()
            pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)
        object.__setattr__(self, "flags", frozenset(self.flags))

    @property
    def width(self) -> int:
        return self.layout.width

    @property
    def height(self) -> int:
        return self.layout.height
