import numpy as np
import pytest

from retouch.image import ImageBuffer


def random_image(rng: np.random.Generator, width: int = 48, height: int = 32) -> ImageBuffer:
    return ImageBuffer(pixels=rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8))


def uniform_image(value: int, width: int = 48, height: int = 32) -> ImageBuffer:
    return ImageBuffer(pixels=np.full((height, width, 3), value, dtype=np.uint8))


def color_chart() -> ImageBuffer:
    """Small chart of saturated primaries/secondaries plus ramps."""
    colors = [
        (255, 0, 0), (0, 255, 0), (0, 0, 255),
        (255, 255, 0), (0, 255, 255), (255, 0, 255),
        (255, 128, 0), (128, 0, 255), (10, 200, 30),
        (200, 40, 90), (255, 255, 255), (0, 0, 0),
    ]
    tiles = []
    for r, g, b in colors:
        tile = np.zeros((8, 8, 3), dtype=np.uint8)
        tile[..., 0], tile[..., 1], tile[..., 2] = r, g, b
        tiles.append(tile)
    grid = np.concatenate([np.concatenate(tiles[i:i + 4], axis=1) for i in (0, 4, 8)], axis=0)
    ramp = np.linspace(0, 255, grid.shape[1], dtype=np.uint8)
    ramp_rows = np.stack([np.stack([ramp, ramp[::-1], ramp], axis=-1)] * 4, axis=0)
    return ImageBuffer(pixels=np.concatenate([grid, ramp_rows], axis=0))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)
