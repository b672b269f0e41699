"""Deterministic parametric render pipeline.

Fixed stage order: decode to linear, white balance, exposure, tone block,
presence (vibrance then saturation), HSL mixer, encode to 8-bit sRGB.
Light stages run on linear float32; tone/presence/mixer run in gamma
(sRGB-encoded) space. Stages whose parameters are at their identity
values are skipped outright, so an all-identity render degrades to the
decode/encode round trip, which is bit-exact for every 8-bit input.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .image import ImageBuffer
from .params import (
    MIXER_CHANNELS,
    NEUTRAL_TEMP,
    HslChannelAdjustment,
    HslMixer,
    ParamValidationError,
    RetouchParams,
    validate,
)

_NO_ADJUSTMENT = HslChannelAdjustment()

# Rec.709 luma weights, used for tone-mapping masks and gray checks.
LUMA_WEIGHTS = (0.2126, 0.7152, 0.0722)

# Hue window centers for the eight mixer channels, degrees.
CHANNEL_CENTERS = {
    "red": 0.0,
    "orange": 30.0,
    "yellow": 60.0,
    "green": 120.0,
    "cyan": 180.0,
    "blue": 240.0,
    "purple": 280.0,
    "magenta": 320.0,
}
CHANNEL_HALF_WIDTH = 45.0
HUE_SHIFT_MAX_DEGREES = 30.0  # slider +-100 maps to +-30 degrees

_STAGE_ORDER = ("decode", "white_balance", "exposure", "tone", "presence", "mixer", "encode")


@dataclass(frozen=True)
class StageRecord:
    name: str
    seconds: float
    summary: str


@dataclass(frozen=True)
class RenderTrace:
    stages: tuple[StageRecord, ...]

    def stage_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.stages)


# ---------------------------------------------------------------------------
# sRGB transfer

def srgb_decode(encoded: np.ndarray) -> np.ndarray:
    """sRGB-encoded [0,1] -> linear light, float32."""
    u = np.asarray(encoded, dtype=np.float32)
    low = u / np.float32(12.92)
    high = np.power((u + np.float32(0.055)) / np.float32(1.055), np.float32(2.4))
    return np.where(u <= np.float32(0.04045), low, high).astype(np.float32)


def srgb_encode(linear: np.ndarray) -> np.ndarray:
    """Linear light -> sRGB-encoded, clamped to [0,1], float32."""
    x = np.clip(np.asarray(linear, dtype=np.float32), np.float32(0.0), np.float32(1.0))
    low = x * np.float32(12.92)
    high = np.float32(1.055) * np.power(x, np.float32(1.0 / 2.4)) - np.float32(0.055)
    return np.where(x <= np.float32(0.0031308), low, high).astype(np.float32)


_DECODE_TABLE = srgb_decode(np.arange(256, dtype=np.float32) / np.float32(255.0))


def decode_to_linear(img: ImageBuffer) -> np.ndarray:
    return _DECODE_TABLE[img.pixels]


def encode_to_bytes(values: np.ndarray) -> np.ndarray:
    # np.rint rounds half to even.
    scaled = np.clip(values, 0.0, 1.0).astype(np.float32) * np.float32(255.0)
    return np.rint(scaled).astype(np.uint8)


# ---------------------------------------------------------------------------
# White balance

def _kelvin_to_rgb(kelvin: float) -> tuple[float, float, float]:
    """Blackbody-style piecewise log/power approximation of the RGB of a
    Kelvin illuminant, on a 0-255 scale. Continuous variant (no flooring
    of kelvin/100) so gains vary smoothly with temperature."""
    t = kelvin / 100.0
    if t <= 66.0:
        r = 255.0
        g = 99.4708025861 * math.log(t) - 161.1195681661
        b = 0.0 if t <= 19.0 else 138.5177312231 * math.log(t - 10.0) - 305.0447927307
    else:
        r = 329.698727446 * math.pow(t - 60.0, -0.1332047592)
        g = 288.1221695283 * math.pow(t - 60.0, -0.0755148492)
        b = 255.0

    def clamp(x: float) -> float:
        return min(255.0, max(1e-4, x))

    return clamp(r), clamp(g), clamp(b)


def white_balance_gains(temp: float, tint: float) -> tuple[float, float, float]:
    """Per-channel gains for a target temperature and tint.

    Gains are the ratio neutral(6500K)/target(T) after normalizing both
    illuminants by their green channel, so green anchors exposure and
    (6500, 0) is exactly (1, 1, 1). Positive tint pushes magenta by
    scaling down only the green gain; negative tint pushes green.
    """
    if not (2000.0 <= temp <= 50000.0):
        raise ValueError(f"temp {temp!r} outside [2000, 50000]")
    if not (-150.0 <= tint <= 150.0):
        raise ValueError(f"tint {tint!r} outside [-150, 150]")
    nr, ng, nb = _kelvin_to_rgb(NEUTRAL_TEMP)
    tr, tg, tb = _kelvin_to_rgb(temp)
    gain_r = (nr / ng) / (tr / tg)
    gain_g = 1.0 - tint / 300.0
    gain_b = (nb / ng) / (tb / tg)
    return gain_r, gain_g, gain_b


def apply_white_balance(linear: np.ndarray, temp: float, tint: float) -> np.ndarray:
    gains = np.array(white_balance_gains(temp, tint), dtype=np.float32)
    return np.maximum(linear * gains, np.float32(0.0))


# ---------------------------------------------------------------------------
# Exposure

def apply_exposure(linear: np.ndarray, ev: float) -> np.ndarray:
    """Multiply every channel by 2**ev in linear light."""
    return (linear * np.float32(2.0 ** ev)).astype(np.float32)


# ---------------------------------------------------------------------------
# Tone block

def _smoothstep(edge0: float, edge1: float, x: np.ndarray) -> np.ndarray:
    t = np.clip((x - edge0) / (edge1 - edge0), 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def tone_curve(luma, blacks=0.0, whites=0.0, shadows=0.0, highlights=0.0, contrast=0.0):
    """Scalar/array luminance mapping of the tone block, float64.

    Composition order: black/white endpoint remap, shadow lift,
    highlight compression, contrast pivot at 0.5. Each step is clamped
    to [0,1]. Non-decreasing for all in-range sliders; the only flat
    mapping is contrast -100.
    """
    l = np.asarray(luma, dtype=np.float64)
    scalar = l.ndim == 0
    l = np.atleast_1d(l)

    # Endpoint remap: positive blacks lift the black point, positive
    # whites brighten the white point. Slope stays within [2/3, 2].
    low = -0.25 * blacks / 100.0
    high = 1.0 - 0.25 * whites / 100.0
    if blacks != 0.0 or whites != 0.0:
        l = np.clip((l - low) / (high - low), 0.0, 1.0)

    # Masked lifts. Strength slider/300 bounds the mask-slope product at
    # 1 so the composed curve cannot decrease.
    if shadows != 0.0:
        l = np.clip(l + (shadows / 300.0) * (1.0 - _smoothstep(0.0, 0.5, l)), 0.0, 1.0)
    if highlights != 0.0:
        l = np.clip(l + (highlights / 300.0) * _smoothstep(0.5, 1.0, l), 0.0, 1.0)

    if contrast != 0.0:
        l = np.clip(0.5 + (l - 0.5) * (1.0 + contrast / 100.0), 0.0, 1.0)

    return float(l[0]) if scalar else l


def gamma_luma(gamma_rgb: np.ndarray) -> np.ndarray:
    w = np.asarray(LUMA_WEIGHTS, dtype=np.float64)
    return np.asarray(gamma_rgb, dtype=np.float64) @ w


def apply_tone_block(gamma_rgb: np.ndarray, blacks: float, whites: float,
                     shadows: float, highlights: float, contrast: float) -> np.ndarray:
    """Map per-pixel luma through the tone curve; scale RGB proportionally
    so hue/chroma ratios are preserved. Pixels at zero luma take the
    mapped luma on all channels."""
    luma = gamma_luma(gamma_rgb)
    mapped = tone_curve(luma, blacks, whites, shadows, highlights, contrast)
    safe = np.maximum(luma, 1e-8)
    ratio = (mapped / safe)[..., None]
    out = np.asarray(gamma_rgb, dtype=np.float64) * ratio
    out = np.where(luma[..., None] <= 1e-8, mapped[..., None], out)
    return np.clip(out, 0.0, 1.0).astype(np.float32)


# ---------------------------------------------------------------------------
# HSL helpers (gamma space, float64 internally)

def rgb_to_hsl(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    v = np.asarray(rgb, dtype=np.float64)
    r, g, b = v[..., 0], v[..., 1], v[..., 2]
    mx = v.max(axis=-1)
    mn = v.min(axis=-1)
    l = (mx + mn) / 2.0
    c = mx - mn
    achroma = c <= 0.0
    denom = 1.0 - np.abs(2.0 * l - 1.0)
    s = np.where(achroma, 0.0, c / np.maximum(denom, 1e-12))
    s = np.clip(s, 0.0, 1.0)
    safe_c = np.where(achroma, 1.0, c)
    hue_r = ((g - b) / safe_c) % 6.0
    hue_g = (b - r) / safe_c + 2.0
    hue_b = (r - g) / safe_c + 4.0
    h = np.where(mx == r, hue_r, np.where(mx == g, hue_g, hue_b))
    h = np.where(achroma, 0.0, h * 60.0)
    return h, s, l


def hsl_to_rgb(h: np.ndarray, s: np.ndarray, l: np.ndarray) -> np.ndarray:
    c = (1.0 - np.abs(2.0 * l - 1.0)) * s
    hp = (np.asarray(h, dtype=np.float64) % 360.0) / 60.0
    x = c * (1.0 - np.abs(hp % 2.0 - 1.0))
    z = np.zeros_like(c)
    sector = np.floor(hp).astype(np.int64) % 6
    r = np.choose(sector, [c, x, z, z, x, c])
    g = np.choose(sector, [x, c, c, x, z, z])
    b = np.choose(sector, [z, z, x, c, c, x])
    m = l - c / 2.0
    out = np.stack([r + m, g + m, b + m], axis=-1)
    return np.clip(out, 0.0, 1.0).astype(np.float32)


# ---------------------------------------------------------------------------
# Presence

def apply_presence(gamma_rgb: np.ndarray, vibrance: float, saturation: float) -> np.ndarray:
    """Vibrance weights its boost toward low-saturation pixels; the
    saturation slider scales uniformly, with -100 forcing gray. Hue and
    HSL lightness are untouched."""
    h, s, l = rgb_to_hsl(gamma_rgb)
    if vibrance != 0.0:
        s = np.clip(s * (1.0 + (vibrance / 100.0) * (1.0 - s)), 0.0, 1.0)
    if saturation != 0.0:
        s = np.clip(s * (1.0 + saturation / 100.0), 0.0, 1.0)
    return hsl_to_rgb(h, s, l)


# ---------------------------------------------------------------------------
# HSL mixer

def _hue_membership(h: np.ndarray, center: float) -> np.ndarray:
    dist = np.abs((h - center + 180.0) % 360.0 - 180.0)
    return np.maximum(0.0, 1.0 - dist / CHANNEL_HALF_WIDTH)


def mixer_is_identity(mixer: HslMixer) -> bool:
    return all(mixer.channel(c) == _NO_ADJUSTMENT for c in MIXER_CHANNELS)


def apply_hsl_mixer(gamma_rgb: np.ndarray, mixer: HslMixer) -> np.ndarray:
    """Blend per-channel hue/saturation/luminance adjustments with
    triangular hue-window memberships. Channels whose sliders are zero
    contribute nothing regardless of membership; blended slider totals
    are capped at the +-100 slider range where windows overlap."""
    h, s, l = rgb_to_hsl(gamma_rgb)
    d_hue = np.zeros_like(h)
    d_sat = np.zeros_like(h)
    d_lum = np.zeros_like(h)
    for name, center in CHANNEL_CENTERS.items():
        adj = mixer.channel(name)
        if adj.hue == 0.0 and adj.saturation == 0.0 and adj.luminance == 0.0:
            continue
        weight = _hue_membership(h, center)
        d_hue += weight * adj.hue
        d_sat += weight * adj.saturation
        d_lum += weight * adj.luminance
    d_hue = np.clip(d_hue, -100.0, 100.0) * (HUE_SHIFT_MAX_DEGREES / 100.0)
    d_sat = np.clip(d_sat, -100.0, 100.0)
    d_lum = np.clip(d_lum, -100.0, 100.0)
    h2 = (h + d_hue) % 360.0
    s2 = np.clip(s * (1.0 + d_sat / 100.0), 0.0, 1.0)
    l2 = np.clip(l * (1.0 + d_lum / 100.0), 0.0, 1.0)
    return hsl_to_rgb(h2, s2, l2)


# ---------------------------------------------------------------------------
# Full pipeline

def render(src: ImageBuffer, params: RetouchParams) -> tuple[ImageBuffer, RenderTrace]:
    """Render ``src`` under ``params``. Pure and deterministic: identical
    inputs give bit-identical outputs."""
    result = validate(params)
    if not result.ok:
        raise ParamValidationError(result.violations)

    b = params.basic
    records: list[StageRecord] = []

    def record(name: str, started: float, summary: str) -> None:
        records.append(StageRecord(name, time.perf_counter() - started, summary))

    t = time.perf_counter()
    buf = decode_to_linear(src)
    space = "linear"
    record("decode", t, f"{src.width}x{src.height} sRGB -> linear")

    t = time.perf_counter()
    if b.temp != NEUTRAL_TEMP or b.tint != 0.0:
        gains = white_balance_gains(b.temp, b.tint)
        buf = apply_white_balance(buf, b.temp, b.tint)
        record("white_balance", t,
               f"temp={b.temp:g}K tint={b.tint:g} gains=({gains[0]:.6f}, {gains[1]:.6f}, {gains[2]:.6f})")
    else:
        record("white_balance", t, "identity (skipped)")

    t = time.perf_counter()
    if b.exposure != 0.0:
        buf = apply_exposure(buf, b.exposure)
        record("exposure", t, f"ev={b.exposure:+g} scale={2.0 ** b.exposure:.6f}")
    else:
        record("exposure", t, "identity (skipped)")

    def to_gamma():
        nonlocal buf, space
        if space == "linear":
            buf = srgb_encode(buf)
            space = "gamma"

    t = time.perf_counter()
    tone_active = any(v != 0.0 for v in (b.blacks, b.whites, b.shadows, b.highlights, b.contrast))
    if tone_active:
        to_gamma()
        buf = apply_tone_block(buf, b.blacks, b.whites, b.shadows, b.highlights, b.contrast)
        record("tone", t,
               f"blacks={b.blacks:g} whites={b.whites:g} shadows={b.shadows:g} "
               f"highlights={b.highlights:g} contrast={b.contrast:g}")
    else:
        record("tone", t, "identity (skipped)")

    t = time.perf_counter()
    if b.vibrance != 0.0 or b.saturation != 0.0:
        to_gamma()
        buf = apply_presence(buf, b.vibrance, b.saturation)
        record("presence", t, f"vibrance={b.vibrance:g} saturation={b.saturation:g}")
    else:
        record("presence", t, "identity (skipped)")

    t = time.perf_counter()
    if not mixer_is_identity(params.mixer):
        to_gamma()
        buf = apply_hsl_mixer(buf, params.mixer)
        active = [c for c in MIXER_CHANNELS if params.mixer.channel(c) != _NO_ADJUSTMENT]
        record("mixer", t, "channels: " + ", ".join(active))
    else:
        record("mixer", t, "identity (skipped)")

    t = time.perf_counter()
    if space == "linear":
        buf = srgb_encode(buf)
    out = ImageBuffer(pixels=encode_to_bytes(buf))
    record("encode", t, "gamma -> 8-bit sRGB, round half to even")

    trace = RenderTrace(stages=tuple(records))
    assert trace.stage_names() == _STAGE_ORDER
    return out, trace
