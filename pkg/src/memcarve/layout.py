"""Image layout inference.

The width of the image hidden in a tile is recovered from the tile's double
amplitude spectrum: rows of an image are similar, so the grayscale pixel
stream is nearly periodic in the row length and its spectrum is a comb whose
tooth spacing encodes the geometry. A second transform turns the comb spacing
into a single dominant peak located exactly at the width. Low-frequency bulk
(neighbouring pixels are always similar) is suppressed with a high-pass
filter before the peak is read off.

The leading pad is found afterwards by scoring the dissimilarity of adjacent
columns of the reshaped tile: the true image boundary is the one column pair
that is not similar, and its position equals the pad length modulo the width.
Both guard thresholds come from CarveConfig.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    CarveConfig,
    CarveError,
    LayoutHypothesis,
    RecoveredImage,
    RecoveryFlag,
    Tile,
)


class TileRejected(CarveError):
    """The tile cannot be reshaped into a plausible image."""

    reason = "rejected"


class NotEnoughLength(TileRejected):
    """The dominant spectral peak is too weak to trust the inferred width."""

    reason = "not_enough_length"

    def __init__(self, message: str, candidate_width: int | None = None,
                 peak: float = 0.0):
        super().__init__(message)
        self.candidate_width = candidate_width
        self.peak = peak


class DegenerateSpectrum(NotEnoughLength):
    """No spectral component rises above the mean (constant-like tile)."""

    reason = "degenerate"

    def __init__(self, message: str):
        super().__init__(message, candidate_width=None, peak=0.0)


class WidthOutOfRange(TileRejected):
    """The located peak does not correspond to a usable width."""

    reason = "width_out_of_range"


def grayscale(tile: Tile) -> np.ndarray:
    """Per-word gray value: arithmetic mean of R, G and B; alpha is ignored."""
    idx = tile.format.rgb_indices
    words = tile.words.astype(np.float64)
    return (words[:, idx[0]] + words[:, idx[1]] + words[:, idx[2]]) / 3.0


def _half_spectrum(signal: np.ndarray) -> np.ndarray:
    return np.abs(np.fft.rfft(signal))


def _mirror(half: np.ndarray, length: int) -> np.ndarray:
    # magnitudes of a real signal's transform are symmetric, so the upper
    # half is an exact reflection of the lower half
    if length % 2 == 0:
        return np.concatenate([half, half[-2:0:-1]])
    return np.concatenate([half, half[-1:0:-1]])


def amplitude_spectrum(signal) -> np.ndarray:
    """Magnitudes of the DFT of a real signal, at the signal's exact length.

    No zero-padding is applied: the transform length always equals the input
    length (mixed-radix plus Bluestein handles any size), because the comb
    spacing the width inference relies on would change otherwise.
    """
    sig = np.asarray(signal, dtype=np.float64)
    if sig.ndim != 1 or sig.size == 0:
        raise ValueError("expected a non-empty one-dimensional signal")
    return _mirror(_half_spectrum(sig), sig.size)


def infer_width(gray, cfg: CarveConfig) -> int:
    """Locate the image width as the dominant peak of the double spectrum.

    Computes F2 = |DFT(|DFT(gray)|)|, normalizes it by its mean, zeroes
    everything below the first index whose value drops under 1 (high-pass),
    and takes the argmax over the remaining lower half.

    Raises DegenerateSpectrum when no component falls below the mean (flat
    tiles), NotEnoughLength when the winning peak is weaker than theta0, and
    WidthOutOfRange when the peak sits at an unusable index.
    """
    sig = np.asarray(gray, dtype=np.float64)
    if sig.ndim != 1 or sig.size < 4:
        raise ValueError("signal too short for layout inference")
    n = sig.size
    first = _mirror(_half_spectrum(sig), n)
    # only the half up to n//2 is searched; the mean is still taken over the
    # full mirrored spectrum, matching amplitude_spectrum(first) exactly
    second_half = _half_spectrum(first)
    if n % 2 == 0:
        total = second_half[0] + 2.0 * second_half[1:-1].sum() + second_half[-1]
    else:
        total = second_half[0] + 2.0 * second_half[1:].sum()
    mean = total / n
    if mean <= 0.0:
        raise DegenerateSpectrum("all-zero signal has no spectral structure")
    second = second_half / mean
    half = n // 2
    below = np.flatnonzero(second[1:half + 1] < 1.0)
    if below.size == 0:
        raise DegenerateSpectrum("no component below the spectral mean")
    cut = int(below[0]) + 1
    width = cut + int(np.argmax(second[cut:half + 1]))
    peak = float(second[width])
    if width < 2:
        raise WidthOutOfRange(f"peak at index {width} cannot be an image width")
    if peak < cfg.theta0:
        raise NotEnoughLength(
            f"dominant peak {peak:.2f} below theta0={cfg.theta0}",
            candidate_width=width, peak=peak)
    return width


def column_distance(matrix, index: int, cfg: CarveConfig) -> int:
    """Distance between column ``index`` and its left neighbour (wrapping).

    Counts the rows where the absolute difference exceeds theta3 (strictly).
    """
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    rows, cols = a.shape
    if not 0 <= index < cols:
        raise ValueError("column index out of range")
    left = (index + cols - 1) % cols
    return int(np.count_nonzero(np.abs(a[:, index] - a[:, left]) > cfg.theta3))


@dataclass(frozen=True)
class DistanceProfile:
    """Normalized adjacent-column distances with its two largest positions."""

    values: np.ndarray
    argmax: int
    second: int
    degenerate: bool


def distance_profile(matrix, cfg: CarveConfig) -> DistanceProfile:
    """Column-distance array over all wrap positions, normalized by its mean.

    ``degenerate`` marks an all-zero profile (every adjacent column pair
    agrees within theta3), in which case no normalization is possible.
    """
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 2 or a.shape[1] < 2:
        raise ValueError("matrix must be at least 2x2")
    diffs = np.abs(a - np.roll(a, 1, axis=1))
    raw = (diffs > cfg.theta3).sum(axis=0).astype(np.float64)
    total = raw.sum()
    if total == 0.0:
        return DistanceProfile(raw, 0, 1 if raw.size > 1 else 0, True)
    values = raw * (raw.size / total)
    top = int(np.argmax(values))
    rest = values.copy()
    rest[top] = -np.inf
    second = int(np.argmax(rest))
    return DistanceProfile(values, top, second, False)


def infer_offset(matrix, cfg: CarveConfig) -> int:
    """Leading-pad length modulo the width, or 0 when no boundary stands out.

    The strongest column boundary is trusted only when the wrap-around pair
    looks like image interior (dist[0] < theta1) and the boundary clearly
    beats the runner-up (dist[max] > theta2 * second). A degenerate profile
    (uniform image) yields 0.
    """
    profile = distance_profile(matrix, cfg)
    if profile.degenerate:
        return 0
    d = profile.values
    if d[0] < cfg.theta1 and d[profile.argmax] > cfg.theta2 * d[profile.second]:
        return profile.argmax
    return 0


def recover_image(tile: Tile, cfg: CarveConfig,
                  keep_flagged: bool = False) -> RecoveredImage:
    """Reshape a tile into an image using the inferred width and offset.

    The original 4-byte words (not the grayscale) are reshaped row-major.
    When the spectral peak fails the theta0 check but still yields a usable
    width, ``keep_flagged=True`` emits the image marked
    POTENTIAL_FALSE_POSITIVE instead of rejecting the tile.

    Raises TileRejected subclasses for tiles without a plausible layout.
    """
    gray = grayscale(tile)
    n = gray.size
    if n < 4:
        raise WidthOutOfRange(f"{n} words cannot hold a 2x2 image")
    flags: frozenset[RecoveryFlag] = frozenset()
    try:
        width = infer_width(gray, cfg)
    except DegenerateSpectrum:
        raise
    except NotEnoughLength as exc:
        if not keep_flagged or exc.candidate_width is None:
            raise
        width = exc.candidate_width
        flags = frozenset({RecoveryFlag.POTENTIAL_FALSE_POSITIVE})
    height = n // width
    if height < 2:
        raise WidthOutOfRange(f"width {width} leaves fewer than two rows")
    shift = infer_offset(gray[:height * width].reshape(height, width), cfg)
    if shift:
        height = (n - shift) // width
        if height < 2:
            raise WidthOutOfRange(
                f"offset {shift} leaves fewer than two rows at width {width}")
    words = tile.words[shift:shift + height * width].reshape(height, width, 4)
    layout = LayoutHypothesis(width=width, height=height, leading=shift,
                              trailing=n - shift - height * width)
    return RecoveredImage(pixels=tile.format.to_rgba(words), format=tile.format,
                          layout=layout, dump_offset=tile.dump_offset,
                          flags=flags)
