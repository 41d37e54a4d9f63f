"""Minimal image file IO.

Binary PPM (P6, maxval 255) is the mandatory baseline for both directions so
the package needs no external codec. PNG decoding (8-bit gray/RGB/RGBA,
non-interlaced) is supported behind the same interface for user-supplied
image sets. Recovered images can also be written as headerless raw dumps in
either channel order; their dimensions travel in the carve manifest.
"""

from __future__ import annotations

import os
import struct
import tempfile
import zlib
from pathlib import Path

import numpy as np

from .model import CarveError

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

ENCODE_KINDS = ("ppm", "raw-rgba", "raw-argb")


class UnsupportedFormat(CarveError):
    """The file is recognizably an image but not a supported flavour."""


class CorruptFile(CarveError):
    """The file claims a supported format but its contents are broken."""


class IoFailure(CarveError):
    """Writing the output file failed; no partial file is left behind."""


def decode(path) -> np.ndarray:
    """Decode an image file into an (height, width, 4) RGBA uint8 array.

    Raises UnsupportedFormat for unknown or unsupported flavours and
    CorruptFile for truncated or malformed payloads.
    """
    data = Path(path).read_bytes()
    if data[:2] == b"P6":
        return _decode_ppm(data)
    if data[:8] == PNG_MAGIC:
        return _decode_png(data)
    raise UnsupportedFormat(f"{path}: not a P6 PPM or PNG file")


def _ppm_tokens(data: bytes, count: int) -> tuple[list[int], int]:
    # header tokens separated by whitespace; '#' starts a comment to EOL
    tokens: list[int] = []
    pos = 2  # past the b"P6" magic
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos] == ord("#"):
            while pos < len(data) and data[pos] != ord("\n"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise CorruptFile("truncated PPM header")
        try:
            tokens.append(int(data[start:pos]))
        except ValueError as exc:
            raise CorruptFile(f"bad PPM header token {data[start:pos]!r}") from exc
    return tokens, pos + 1  # exactly one whitespace byte before the payload


def _decode_ppm(data: bytes) -> np.ndarray:
    (width, height, maxval), payload_start = _ppm_tokens(data, 3)
    if maxval != 255:
        raise UnsupportedFormat(f"PPM maxval {maxval} unsupported (only 255)")
    if width < 1 or height < 1:
        raise CorruptFile(f"bad PPM dimensions {width}x{height}")
    expected = width * height * 3
    payload = data[payload_start:payload_start + expected]
    if len(payload) < expected:
        raise CorruptFile("PPM pixel payload truncated")
    rgb = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3)
    out = np.empty((height, width, 4), dtype=np.uint8)
    out[..., :3] = rgb
    out[..., 3] = 255
    return out


def _png_chunks(data: bytes):
    pos = 8
    while pos + 8 <= len(data):
        length, kind = struct.unpack(">I4s", data[pos:pos + 8])
        body = data[pos + 8:pos + 8 + length]
        if len(body) < length:
            raise CorruptFile("PNG chunk truncated")
        yield kind, body
        pos += 12 + length  # header + body + crc
        if kind == b"IEND":
            return
    raise CorruptFile("PNG ended without IEND")


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    return b if pb <= pc else c


def _unfilter(raw: bytes, height: int, stride: int, bpp: int) -> np.ndarray:
    out = np.zeros((height, stride), dtype=np.uint8)
    pos = 0
    for y in range(height):
        if pos >= len(raw):
            raise CorruptFile("PNG scanline data truncated")
        ftype = raw[pos]
        pos += 1
        line = np.frombuffer(raw, dtype=np.uint8, count=stride, offset=pos).astype(np.int32)
        pos += stride
        prev = out[y - 1].astype(np.int32) if y > 0 else np.zeros(stride, np.int32)
        if ftype == 0:
            out[y] = line
        elif ftype == 2:
            out[y] = (line + prev) % 256
        elif ftype in (1, 3, 4):
            cur = np.zeros(stride, dtype=np.int32)
            for x in range(stride):
                left = cur[x - bpp] if x >= bpp else 0
                if ftype == 1:
                    cur[x] = (line[x] + left) % 256
                elif ftype == 3:
                    cur[x] = (line[x] + (left + prev[x]) // 2) % 256
                else:
                    up_left = prev[x - bpp] if x >= bpp else 0
                    cur[x] = (line[x] + _paeth(int(left), int(prev[x]), int(up_left))) % 256
            out[y] = cur
        else:
            raise CorruptFile(f"PNG filter type {ftype} invalid")
    return out


def _decode_png(data: bytes) -> np.ndarray:
    header = None
    idat = bytearray()
    for kind, body in _png_chunks(data):
        if kind == b"IHDR":
            header = struct.unpack(">IIBBBBB", body)
        elif kind == b"IDAT":
            idat.extend(body)
    if header is None:
        raise CorruptFile("PNG missing IHDR")
    width, height, depth, color, compression, filt, interlace = header
    if depth != 8 or color not in (0, 2, 6) or interlace != 0:
        raise UnsupportedFormat(
            "only 8-bit non-interlaced gray/RGB/RGBA PNGs are supported")
    if compression != 0 or filt != 0:
        raise CorruptFile("PNG uses unknown compression or filter method")
    if width < 1 or height < 1:
        raise CorruptFile(f"bad PNG dimensions {width}x{height}")
    channels = {0: 1, 2: 3, 6: 4}[color]
    try:
        raw = zlib.decompress(bytes(idat))
    except zlib.error as exc:
        raise CorruptFile("PNG IDAT stream corrupt") from exc
    stride = width * channels
    if len(raw) < height * (stride + 1):
        raise CorruptFile("PNG pixel data truncated")
    planes = _unfilter(raw, height, stride, channels).reshape(height, width, channels)
    out = np.empty((height, width, 4), dtype=np.uint8)
    if color == 0:
        out[..., 0] = out[..., 1] = out[..., 2] = planes[..., 0]
        out[..., 3] = 255
    elif color == 2:
        out[..., :3] = planes
        out[..., 3] = 255
    else:
        out[...] = planes
    return out


def _as_rgba(image) -> np.ndarray:
    arr = np.asarray(image, dtype=np.uint8)
    if arr.ndim == 3 and arr.shape[2] == 3:
        out = np.empty((*arr.shape[:2], 4), dtype=np.uint8)
        out[..., :3] = arr
        out[..., 3] = 255
        return out
    if arr.ndim == 3 and arr.shape[2] == 4:
        return arr
    raise ValueError("expected an image of shape (height, width, 3|4)")


def encode(image, path, kind: str = "ppm") -> None:
    """Write an image as 'ppm' (alpha dropped), 'raw-rgba' or 'raw-argb'.

    Raw kinds emit 4 bytes per pixel in the named channel order with no
    header. Output is written to a temporary file and renamed, so a failed
    write never leaves a partial file.
    """
    if kind not in ENCODE_KINDS:
        raise ValueError(f"kind must be one of {ENCODE_KINDS}")
    arr = _as_rgba(image)
    height, width = arr.shape[:2]
    if kind == "ppm":
        payload = (f"P6\n{width} {height}\n255\n".encode("ascii")
                   + np.ascontiguousarray(arr[..., :3]).tobytes())
    elif kind == "raw-rgba":
        payload = np.ascontiguousarray(arr).tobytes()
    else:
        payload = np.ascontiguousarray(arr[..., (3, 0, 1, 2)]).tobytes()
    target = Path(path)
    try:
        fd, tmp_name = tempfile.mkstemp(dir=target.parent or Path("."),
                                        prefix=target.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(payload)
            os.replace(tmp_name, target)
        except BaseException:
            os.unlink(tmp_name)
            raise
    except OSError as exc:
        raise IoFailure(f"cannot write {target}: {exc}") from exc
