"""Per-pixel HSL oracle.

Scalar hexcone RGB<->HSL conversions used to derive expected pixel values
for the presence and mixer stages (for example, the pure-blue pixel under
a blue saturation/luminance pull of -10 each).
"""


def rgb_to_hsl(r: float, g: float, b: float) -> tuple[float, float, float]:
    mx, mn = max(r, g, b), min(r, g, b)
    l = (mx + mn) / 2.0
    c = mx - mn
    if c <= 0.0:
        return 0.0, 0.0, l
    s = min(1.0, c / (1.0 - abs(2.0 * l - 1.0)))
    if mx == r:
        h = ((g - b) / c) % 6.0
    elif mx == g:
        h = (b - r) / c + 2.0
    else:
        h = (r - g) / c + 4.0
    return h * 60.0, s, l


def hsl_to_rgb(h: float, s: float, l: float) -> tuple[float, float, float]:
    c = (1.0 - abs(2.0 * l - 1.0)) * s
    hp = (h % 360.0) / 60.0
    x = c * (1.0 - abs(hp % 2.0 - 1.0))
    sector = int(hp) % 6
    r1, g1, b1 = [
        (c, x, 0.0), (x, c, 0.0), (0.0, c, x),
        (0.0, x, c), (x, 0.0, c), (c, 0.0, x),
    ][sector]
    m = l - c / 2.0
    return r1 + m, g1 + m, b1 + m


def quantize(v: float) -> int:
    # round half to even, matching the encoder
    scaled = v * 255.0
    floor = int(scaled)
    frac = scaled - floor
    if frac > 0.5 or (frac == 0.5 and floor % 2 == 1):
        floor += 1
    return min(255, max(0, floor))


def pure_blue_sat_lum_pull() -> tuple[int, int, int]:
    """Pure blue pixel, blue channel saturation -10 and luminance -10.

    Blue sits exactly on its window center (full membership); the only
    other overlapping window has zero sliders and contributes nothing,
    so saturation and luminance each scale by 0.9 exactly.
    """
    h, s, l = rgb_to_hsl(0.0, 0.0, 1.0)
    assert h == 240.0 and s == 1.0 and l == 0.5
    s *= 0.9
    l *= 0.9
    r, g, b = hsl_to_rgb(h, s, l)
    return quantize(r), quantize(g), quantize(b)


def saturation_minus_100_gray(r8: int, g8: int, b8: int) -> int:
    """Gray level (byte) a pixel collapses to under saturation -100."""
    _, _, l = rgb_to_hsl(r8 / 255.0, g8 / 255.0, b8 / 255.0)
    return quantize(l)


if __name__ == "__main__":
    print("pure blue, blue(0,-10,-10) ->", pure_blue_sat_lum_pull())
    for px in [(255, 0, 0), (10, 200, 30), (128, 128, 128)]:
        print(f"saturation -100 on {px} -> gray", saturation_minus_100_gray(*px))
