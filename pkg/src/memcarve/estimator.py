"""Scikit-learn compatible front end for the carving pipeline.

The carver is a stateless transformer: raw memory dumps go in, lists of
recovered images come out. All thresholds are constructor parameters, so the
estimator clones, grid-searches and composes like any other sklearn step.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .model import CarveConfig, as_memory_dump
from .pipeline import CarveResult, carve_dump


class MemoryImageCarver(TransformerMixin, BaseEstimator):
    """Recover bitmap images from raw memory dumps.

    Parameters mirror CarveConfig:

    block_size : int, block granularity of the blank filter (bytes)
    alpha_threshold : float, 0x00/0xff byte fraction for format detection
    theta0 : float, minimum normalized spectral peak for a trusted width
    theta1, theta2 : float, guards of the leading-offset test
    theta3 : float, per-pixel difference threshold of the column distance
    min_tile_pixels : int, smallest tile kept after trimming
    keep_flagged : bool, emit weak-peak images flagged instead of dropping

    Examples
    --------
    >>> carver = MemoryImageCarver().fit()
    >>> images_per_dump = carver.transform([dump_bytes])
    """

    def __init__(self, block_size=4096, alpha_threshold=0.20, theta0=1.5,
                 theta1=2.0, theta2=1.2, theta3=5.0, min_tile_pixels=256,
                 keep_flagged=False):
        self.block_size = block_size
        self.alpha_threshold = alpha_threshold
        self.theta0 = theta0
        self.theta1 = theta1
        self.theta2 = theta2
        self.theta3 = theta3
        self.min_tile_pixels = min_tile_pixels
        self.keep_flagged = keep_flagged

    def _build_config(self) -> CarveConfig:
        # CarveConfig validates; ValueError propagates with the bad parameter
        return CarveConfig(
            block_size=self.block_size,
            alpha_threshold=self.alpha_threshold,
            theta0=self.theta0,
            theta1=self.theta1,
            theta2=self.theta2,
            theta3=self.theta3,
            min_tile_pixels=self.min_tile_pixels,
        )

    def fit(self, X=None, y=None):
        """Validate parameters; the carver learns nothing from data."""
        self.config_ = self._build_config()
        return self

    def transform(self, X):
        """Carve every dump in X; returns one list of RecoveredImage per dump.

        X is an iterable of bytes-like objects (or MemoryDump instances).
        """
        if not hasattr(self, "config_"):
            raise NotFittedError("this MemoryImageCarver is not fitted yet; call fit()")
        return [list(carve_dump(as_memory_dump(item), self.config_,
                                keep_flagged=self.keep_flagged).images)
                for item in X]

    def carve(self, dump) -> CarveResult:
        """Carve a single dump, returning images plus per-tile reports."""
        config = getattr(self, "config_", None) or self._build_config()
        return carve_dump(as_memory_dump(dump), config,
                          keep_flagged=self.keep_flagged)
