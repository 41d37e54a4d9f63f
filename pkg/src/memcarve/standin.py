"""Deterministic photo-like stand-in images for the accuracy experiments.

The generator mimics the statistics the layout inference relies on in real
photographs: large smooth structures (blobs, oriented waves, a horizontal
ramp that keeps the left and right edges distinct), plus two octaves of fine
grain so adjacent-column differences look like camera texture rather than a
synthetic gradient. Geometry is expressed in pixels, not relative
coordinates, so wide-short and tall-narrow images stay isotropic.

The first and last rows are eased through a soft value compressor into the
58..141 band. Those rows hold the tile's first and last words; keeping them
away from the extremes guarantees that heavy noise or +/-80% brightness and
contrast shifts can never blank them into all-0xff words, which would move
the trim boundary and shear the recovered image.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import imgio


def _smooth_noise(rng: np.random.Generator, height: int, width: int,
                  cell: float, amplitude: float) -> np.ndarray:
    """Band-limited noise: a coarse grid bilinearly upsampled to full size."""
    grid_h = max(2, int(np.ceil(height / cell)) + 1)
    grid_w = max(2, int(np.ceil(width / cell)) + 1)
    grid = rng.uniform(-amplitude, amplitude, (grid_h, grid_w))
    ys = np.linspace(0, grid_h - 1, height)
    xs = np.linspace(0, grid_w - 1, width)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, grid_h - 1)
    x1 = np.minimum(x0 + 1, grid_w - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    top = grid[y0][:, x0] * (1 - fx) + grid[y0][:, x1] * fx
    bottom = grid[y1][:, x0] * (1 - fx) + grid[y1][:, x1] * fx
    return top * (1 - fy) + bottom * fy


def _soft_band(values: np.ndarray) -> np.ndarray:
    """C1 compressor: identity on [100, 120], squeezes [1, 254] into [58, 141]."""
    out = np.asarray(values, dtype=np.float64).copy()
    high = out > 120.0
    d = out[high] - 120.0
    out[high] = 120.0 + d / (1.0 + d / 24.9)
    low = out < 100.0
    d = 100.0 - out[low]
    out[low] = 100.0 - d / (1.0 + d / 73.0)
    return out


def standin_image(index: int, width: int = 1024, height: int = 768,
                  seed: int = 0, grain: float = 26.0) -> np.ndarray:
    """One deterministic RGBA stand-in image for (seed, index)."""
    if width < 2 or height < 2:
        raise ValueError("stand-in images are at least 2x2")
    rng = np.random.default_rng([seed, index])
    scale = float(np.sqrt(width * height))
    ys, xs = np.meshgrid(np.arange(height, dtype=np.float64),
                         np.arange(width, dtype=np.float64), indexing="ij")

    ramp_share = rng.uniform(0.40, 0.60)
    ramp = xs / max(width - 1, 1)
    if rng.random() < 0.5:
        ramp = 1.0 - ramp

    blobs = []
    for _ in range(int(rng.integers(4, 9))):
        cx = rng.uniform(0, width)
        cy = rng.uniform(0, height)
        sx = rng.uniform(0.10, 0.25) * scale
        sy = rng.uniform(0.10, 0.25) * scale
        blobs.append(np.exp(-(((xs - cx) / sx) ** 2 + ((ys - cy) / sy) ** 2) / 2.0))

    waves = []
    for _ in range(int(rng.integers(2, 5))):
        wavelength = rng.uniform(0.12, 1.5) * scale
        theta = rng.uniform(0, np.pi)
        phase = rng.uniform(0, 2 * np.pi)
        ux, uy = np.cos(theta) / wavelength, np.sin(theta) / wavelength
        waves.append(np.cos(2 * np.pi * (ux * xs + uy * ys) + phase))

    fine = _smooth_noise(rng, height, width, 3.0, grain) if grain > 0 else 0.0
    mid = _smooth_noise(rng, height, width, max(8.0, 0.012 * scale), 10.0)

    channels = []
    for _ in range(3):
        texture = np.zeros_like(xs)
        for blob in blobs:
            texture += rng.uniform(-1, 1) * blob
        for wave in waves:
            texture += rng.uniform(-0.5, 0.5) * wave
        lo, hi = texture.min(), texture.max()
        texture = (texture - lo) / max(hi - lo, 1e-9)
        field = ramp_share * ramp + (1.0 - ramp_share) * texture
        channels.append(8.0 + 239.0 * field
                        + rng.uniform(0.85, 1.15) * fine
                        + rng.uniform(0.8, 1.2) * mid)
    rgb = np.stack(channels, axis=-1)

    band_rows = max(2, min(8, height // 8))
    row_weight = np.ones(height)
    ease = 0.5 - 0.5 * np.cos(np.linspace(0, np.pi, band_rows))
    row_weight[:band_rows] = ease
    row_weight[-band_rows:] = ease[::-1]
    weight = row_weight[:, None, None]
    rgb = weight * rgb + (1 - weight) * _soft_band(rgb)

    image = np.empty((height, width, 4), dtype=np.uint8)
    image[..., :3] = np.clip(np.rint(rgb), 1, 254)
    image[..., 3] = 255
    return image


def standin_set(count: int = 29, width: int = 1024, height: int = 768,
                seed: int = 0) -> list[np.ndarray]:
    """The deterministic stand-in image set (default: 29 base images)."""
    return [standin_image(i, width, height, seed) for i in range(count)]


def write_standin_set(directory, count: int = 29, width: int = 1024,
                      height: int = 768, seed: int = 0) -> list[Path]:
    """Write the stand-in set as PPM files into ``directory``."""
    out_dir = Path(directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(count):
        path = out_dir / f"standin_{i:02d}.ppm"
        imgio.encode(standin_image(i, width, height, seed), path, kind="ppm")
        paths.append(path)
    return paths
