"""8-bit sRGB image buffers, file IO, and content digests."""

from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

JPEG_QUALITY = 95  # fixed for iteration outputs so renders are reproducible


class ImageDecodeError(ValueError):
    pass


@dataclass(frozen=True)
class ImageBuffer:
    """Interchange image: uint8 sRGB pixels of shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = self.pixels
        if px.ndim != 3 or px.shape[2] != 3 or px.dtype != np.uint8:
            raise ValueError(f"expected (h, w, 3) uint8 pixels, got {px.shape} {px.dtype}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image must be at least 1x1")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def digest(self) -> str:
        """Content hash over raw pixels, independent of file format."""
        h = hashlib.sha256()
        h.update(f"{self.width}x{self.height}:".encode())
        h.update(np.ascontiguousarray(self.pixels).tobytes())
        return h.hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ImageBuffer):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash(self.digest())


def decode_image(data: bytes) -> ImageBuffer:
    """Decode PNG/JPEG bytes into an sRGB buffer."""
    if not data:
        raise ImageDecodeError("empty image data")
    try:
        with Image.open(io.BytesIO(data)) as im:
            rgb = im.convert("RGB")
            arr = np.asarray(rgb, dtype=np.uint8)
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise ImageDecodeError(f"cannot decode image: {exc}") from exc
    return ImageBuffer(pixels=arr.copy())


def load_image(path) -> ImageBuffer:
    with open(path, "rb") as fh:
        return decode_image(fh.read())


def png_bytes(img: ImageBuffer) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(img.pixels, "RGB").save(buf, format="PNG")
    return buf.getvalue()


def jpeg_bytes(img: ImageBuffer) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(img.pixels, "RGB").save(buf, format="JPEG", quality=JPEG_QUALITY)
    return buf.getvalue()


def save_image(img: ImageBuffer, path) -> None:
    """Write PNG or JPEG chosen by file extension (JPEG at fixed quality)."""
    name = str(path).lower()
    data = jpeg_bytes(img) if name.endswith((".jpg", ".jpeg")) else png_bytes(img)
    with open(path, "wb") as fh:
        fh.write(data)
