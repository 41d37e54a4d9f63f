"""Synthetic memory-dump generation with controlled image placements.

Dumps start life filled with 0xff (freshly initialized memory). Each
placement writes an optional leading pad, the image in its memory channel
order, and an optional trailing pad. Junk ranges are filled with seeded
random bytes drawn from 0x01..0xfe so they survive the blank filter and
genuinely exercise format rejection.

Image transforms used by the accuracy experiments (noise, brightness,
contrast, scale) live here as well; all of them are pure given their inputs
and seed.
"""

from __future__ import annotations

import base64
import enum
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import CarveConfig, CarveError, MemoryDump, PixelFormat, default_config


class OverlapError(CarveError):
    """Two placements or junk ranges claim the same bytes."""


class OutOfBoundsError(CarveError):
    """A placement or junk range does not fit into the dump."""


class TooSmallError(CarveError):
    """Scaling would shrink an image below 2x2 pixels."""


def _require_rgba(image) -> np.ndarray:
    arr = np.asarray(image, dtype=np.uint8)
    if arr.ndim != 3 or arr.shape[2] != 4:
        raise ValueError("expected an RGBA image of shape (height, width, 4)")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image must not be empty")
    return arr


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def add_gaussian_noise(image, sigma: float, seed=None) -> np.ndarray:
    """Add independent N(0, sigma) noise to each R,G,B value; alpha untouched.

    Results are rounded and clamped to [0, 255] and fully determined by the
    seed (an int or a numpy Generator).
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    img = _require_rgba(image)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    out = img.copy()
    rgb = img[..., :3].astype(np.float64)
    rgb += rng.normal(0.0, sigma, size=rgb.shape)
    out[..., :3] = np.clip(np.rint(rgb), 0, 255).astype(np.uint8)
    return out


def adjust_brightness(image, factor: float) -> np.ndarray:
    """Multiply R,G,B by (1 + factor), clamped; factor -1 blacks out."""
    if not -1.0 <= factor <= 1.0:
        raise ValueError("brightness factor must lie in [-1, 1]")
    img = _require_rgba(image)
    out = img.copy()
    rgb = img[..., :3].astype(np.float64) * (1.0 + factor)
    out[..., :3] = np.clip(np.rint(rgb), 0, 255).astype(np.uint8)
    return out


def adjust_contrast(image, factor: float) -> np.ndarray:
    """Scale R,G,B around the 128 pivot by (1 + factor), clamped."""
    if not -1.0 <= factor <= 1.0:
        raise ValueError("contrast factor must lie in [-1, 1]")
    img = _require_rgba(image)
    out = img.copy()
    rgb = (img[..., :3].astype(np.float64) - 128.0) * (1.0 + factor) + 128.0
    out[..., :3] = np.clip(np.rint(rgb), 0, 255).astype(np.uint8)
    return out


def _filter_weights(n_in: int, n_out: int) -> np.ndarray:
    # triangle filter with support widened by the scale factor, so
    # downscaling integrates neighbourhoods instead of point-sampling
    ratio = n_in / n_out
    support = max(1.0, ratio)
    rows = np.zeros((n_out, n_in))
    for i in range(n_out):
        center = (i + 0.5) * ratio - 0.5
        lo = int(np.floor(center - support))
        hi = int(np.ceil(center + support))
        js = np.arange(lo, hi + 1)
        weights = np.clip(1.0 - np.abs(js - center) / support, 0.0, None)
        np.add.at(rows[i], np.clip(js, 0, n_in - 1), weights)
        rows[i] /= rows[i].sum()
    return rows


def scale_image(image, ratio: float) -> np.ndarray:
    """Bilinear resample to (round(w*ratio), round(h*ratio)).

    Raises TooSmallError when an output dimension would drop below 2.
    """
    if not 0.0 < ratio <= 1.0:
        raise ValueError("scale ratio must lie in (0, 1]")
    img = _require_rgba(image)
    height, width = img.shape[:2]
    out_w = int(round(width * ratio))
    out_h = int(round(height * ratio))
    if out_w < 2 or out_h < 2:
        raise TooSmallError(f"{width}x{height} at ratio {ratio} shrinks below 2x2")
    if (out_h, out_w) == (height, width):
        return img.copy()
    wy = _filter_weights(height, out_h)
    wx = _filter_weights(width, out_w)
    arr = img.astype(np.float64)
    tmp = np.tensordot(wy, arr, axes=(1, 0))       # (out_h, width, 4)
    out = np.tensordot(tmp, wx, axes=(1, 1))       # (out_h, 4, out_w)
    out = np.moveaxis(out, 1, 2)
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


@dataclass(frozen=True)
class TransformSpec:
    """One image transform: kind in {noise, brightness, contrast, scale}."""

    kind: str
    value: float

    _KINDS = ("noise", "brightness", "contrast", "scale")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown transform {self.kind!r}")

    def __str__(self) -> str:
        return f"{self.kind}:{self.value:g}"


def parse_transform(text: str) -> TransformSpec:
    """Parse 'kind:value' (e.g. 'noise:40' or 'scale:0.5')."""
    kind, sep, value = text.partition(":")
    if not sep:
        raise ValueError(f"transform {text!r} must look like 'kind:value'")
    return TransformSpec(kind.strip(), float(value))


def apply_transforms(image, specs, rng=None) -> np.ndarray:
    """Apply transforms in listed order; noise draws its seed from ``rng``."""
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    out = _require_rgba(image)
    for spec in specs:
        if spec.kind == "noise":
            out = add_gaussian_noise(out, spec.value, rng)
        elif spec.kind == "brightness":
            out = adjust_brightness(out, spec.value)
        elif spec.kind == "contrast":
            out = adjust_contrast(out, spec.value)
        else:
            out = scale_image(out, spec.value)
    return out


# ---------------------------------------------------------------------------
# dump synthesis
# ---------------------------------------------------------------------------

class PadFill(enum.Enum):
    """Fill pattern of the pad words surrounding a placed image."""

    ZERO = "zero"
    FF = "ff"
    RANDOM = "random"


@dataclass(frozen=True)
class PlacementSpec:
    """One image embedded at ``dump_offset`` with pads on both sides."""

    image: np.ndarray  # (height, width, 4) uint8, canonical RGBA
    format: PixelFormat
    leading_pad: int = 0
    trailing_pad: int = 0
    pad_fill: PadFill = PadFill.ZERO
    dump_offset: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "image", _require_rgba(self.image))
        if self.leading_pad < 0 or self.trailing_pad < 0:
            raise ValueError("pad word counts cannot be negative")
        if self.dump_offset < 0 or self.dump_offset % 4 != 0:
            raise ValueError("dump_offset must be a non-negative multiple of 4")

    @property
    def word_count(self) -> int:
        height, width = self.image.shape[:2]
        return self.leading_pad + height * width + self.trailing_pad

    @property
    def byte_length(self) -> int:
        return 4 * self.word_count


@dataclass(frozen=True)
class PlacementTruth:
    """Ground-truth record of one placement, kept for later scoring."""

    dump_offset: int
    format: PixelFormat
    pixels: np.ndarray
    leading_pad: int
    trailing_pad: int
    pad_fill: PadFill

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])


@dataclass(frozen=True)
class GroundTruth:
    """Everything needed to score a carve of the matching synthetic dump."""

    total_size: int
    placements: tuple[PlacementTruth, ...]
    junk: tuple[tuple[int, int, int], ...] = ()
    seed: int | None = None

    def to_json(self) -> dict:
        return {
            "version": 1,
            "total_size": self.total_size,
            "seed": self.seed,
            "placements": [
                {
                    "dump_offset": p.dump_offset,
                    "format": p.format.value,
                    "width": p.width,
                    "height": p.height,
                    "leading_pad": p.leading_pad,
                    "trailing_pad": p.trailing_pad,
                    "pad_fill": p.pad_fill.value,
                    "pixels_b64": base64.b64encode(
                        np.ascontiguousarray(p.pixels).tobytes()).decode("ascii"),
                }
                for p in self.placements
            ],
            "junk": [{"offset": o, "length": n, "seed": s} for o, n, s in self.junk],
        }

    @staticmethod
    def from_json(doc: dict) -> "GroundTruth":
        placements = []
        for entry in doc["placements"]:
            raw = base64.b64decode(entry["pixels_b64"])
            pixels = np.frombuffer(raw, dtype=np.uint8).reshape(
                entry["height"], entry["width"], 4)
            placements.append(PlacementTruth(
                dump_offset=entry["dump_offset"],
                format=PixelFormat(entry["format"]),
                pixels=pixels,
                leading_pad=entry["leading_pad"],
                trailing_pad=entry["trailing_pad"],
                pad_fill=PadFill(entry["pad_fill"]),
            ))
        junk = tuple((j["offset"], j["length"], j["seed"]) for j in doc.get("junk", []))
        return GroundTruth(total_size=doc["total_size"],
                           placements=tuple(placements), junk=junk,
                           seed=doc.get("seed"))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))

    @staticmethod
    def load(path) -> "GroundTruth":
        return GroundTruth.from_json(json.loads(Path(path).read_text()))


def _pad_words(count: int, fill: PadFill, rng: np.random.Generator) -> np.ndarray:
    if fill is PadFill.ZERO:
        return np.zeros((count, 4), dtype=np.uint8)
    if fill is PadFill.FF:
        return np.full((count, 4), 0xFF, dtype=np.uint8)
    # 0x00/0xff excluded so random pads are never trimmed as blank words
    return rng.integers(0x01, 0xFF, size=(count, 4), dtype=np.uint8)


def _claim(claimed: list[tuple[int, int]], start: int, stop: int, what: str) -> None:
    for lo, hi in claimed:
        if start < hi and lo < stop:
            raise OverlapError(f"{what} [{start}, {stop}) overlaps [{lo}, {hi})")
    claimed.append((start, stop))


def synth_dump(placements, total_size: int, junk=(), cfg: CarveConfig | None = None,
               seed: int | None = None) -> tuple[MemoryDump, GroundTruth]:
    """Build a synthetic dump plus its ground truth.

    The buffer is initialized to 0xff. Placements are written in order (pads,
    image words in memory channel order, pads); ``junk`` is a sequence of
    (offset, length, seed) byte ranges filled with uniform random bytes from
    0x01..0xfe. Raises OutOfBoundsError / OverlapError on bad geometry.
    """
    cfg = cfg or default_config()
    if total_size <= 0 or total_size % cfg.block_size != 0:
        raise ValueError("total_size must be a positive multiple of block_size")
    rng = np.random.default_rng(seed)
    buffer = np.full(total_size, 0xFF, dtype=np.uint8)
    claimed: list[tuple[int, int]] = []
    truths = []
    for placement in placements:
        stop = placement.dump_offset + placement.byte_length
        if stop > total_size:
            raise OutOfBoundsError(
                f"placement needs {placement.byte_length} bytes at offset "
                f"{placement.dump_offset}, dump holds {total_size}")
        _claim(claimed, placement.dump_offset, stop, "placement")
        words = np.concatenate([
            _pad_words(placement.leading_pad, placement.pad_fill, rng),
            placement.format.from_rgba(placement.image.reshape(-1, 4)),
            _pad_words(placement.trailing_pad, placement.pad_fill, rng),
        ])
        buffer[placement.dump_offset:stop] = words.reshape(-1)
        truths.append(PlacementTruth(
            dump_offset=placement.dump_offset, format=placement.format,
            pixels=placement.image.copy(), leading_pad=placement.leading_pad,
            trailing_pad=placement.trailing_pad, pad_fill=placement.pad_fill))
    junk = tuple((int(o), int(n), int(s)) for o, n, s in junk)
    for offset, length, junk_seed in junk:
        if offset < 0 or offset + length > total_size:
            raise OutOfBoundsError(f"junk range [{offset}, {offset + length}) out of dump")
        _claim(claimed, offset, offset + length, "junk range")
        junk_rng = np.random.default_rng(junk_seed)
        buffer[offset:offset + length] = junk_rng.integers(
            0x01, 0xFF, size=length, dtype=np.uint8)
    truth = GroundTruth(total_size=total_size, placements=tuple(truths),
                        junk=junk, seed=seed)
    return MemoryDump(buffer.tobytes(), origin="synthetic"), truth
