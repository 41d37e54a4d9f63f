"""memcarve: recover raw bitmap images from unstructured memory dumps.

The pipeline splits a dump into blocks, drops blank (all-0xff / all-0x00)
blocks, coalesces the survivors into tiles, detects the RGBA/ARGB channel
order from alpha-byte statistics, infers each tile's image width from its
double amplitude spectrum and the leading offset from a column-distance
test, and reshapes the words into images.
"""

from .estimator import MemoryImageCarver
from .evaluation import (
    AccuracyReport,
    MatchResult,
    NoImagesError,
    Scenario,
    match_images,
    run_accuracy_suite,
)
from .extraction import extract_tiles
from .layout import (
    DegenerateSpectrum,
    NotEnoughLength,
    TileRejected,
    WidthOutOfRange,
    amplitude_spectrum,
    grayscale,
    infer_offset,
    infer_width,
    recover_image,
)
from .model import (
    CarveConfig,
    CarveError,
    LayoutHypothesis,
    MemoryDump,
    PixelFormat,
    RecoveredImage,
    RecoveryFlag,
    Tile,
    as_memory_dump,
    default_config,
)
from .pipeline import CarveResult, TileReport, carve_dump
from .synthesis import (
    GroundTruth,
    OutOfBoundsError,
    OverlapError,
    PadFill,
    PlacementSpec,
    TooSmallError,
    TransformSpec,
    add_gaussian_noise,
    adjust_brightness,
    adjust_contrast,
    apply_transforms,
    scale_image,
    synth_dump,
)
from .standin import standin_image, standin_set, write_standin_set

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport",
    "CarveConfig",
    "CarveError",
    "CarveResult",
    "DegenerateSpectrum",
    "GroundTruth",
    "LayoutHypothesis",
    "MatchResult",
    "MemoryDump",
    "MemoryImageCarver",
    "NoImagesError",
    "NotEnoughLength",
    "OutOfBoundsError",
    "OverlapError",
    "PadFill",
    "PixelFormat",
    "PlacementSpec",
    "RecoveredImage",
    "RecoveryFlag",
    "Scenario",
    "Tile",
    "TileRejected",
    "TileReport",
    "TooSmallError",
    "TransformSpec",
    "WidthOutOfRange",
    "add_gaussian_noise",
    "adjust_brightness",
    "adjust_contrast",
    "amplitude_spectrum",
    "apply_transforms",
    "as_memory_dump",
    "carve_dump",
    "default_config",
    "extract_tiles",
    "grayscale",
    "infer_offset",
    "infer_width",
    "match_images",
    "recover_image",
    "run_accuracy_suite",
    "scale_image",
    "standin_image",
    "standin_set",
    "synth_dump",
    "write_standin_set",
]
