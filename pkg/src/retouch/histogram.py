"""Per-channel histograms, derived tone features, and the rendered
histogram plot that accompanies tone-analysis requests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import ImageBuffer

CHANNEL_NAMES = ("red", "green", "blue")

# Plot geometry: 3 px per bin, fixed canvas.
PLOT_WIDTH = 768
PLOT_HEIGHT = 256

# Finding thresholds, all in one place. Values are on the 0-255 bin
# scale unless noted. These drive both summarize_tone and the offline
# heuristic backend.
UNDEREXPOSED_MEAN = 96.0
OVEREXPOSED_MEAN = 176.0
CLIP_FRACTION = 0.01
LOW_CONTRAST_WIDTH = 128  # pooled 0.1%..99.9% percentile span, bins
HIGH_CONTRAST_MIDTONE_FRACTION = 0.25
COLOR_BIAS = 0.06  # normalized mean-difference threshold

MIDTONE_LO = 64
MIDTONE_HI = 191
PERCENTILE_LOW = 0.001
PERCENTILE_HIGH = 0.999

FINDING_KINDS = (
    "underexposed", "overexposed", "shadow_clipping", "highlight_clipping",
    "low_contrast", "high_contrast", "warm_bias", "cool_bias",
    "green_bias", "magenta_bias", "balanced",
)

# Findings that mark an actionable tonal problem; "balanced" means none
# of these fired. Contrast findings are reported but do not break balance.
_IMBALANCE_KINDS = (
    "underexposed", "overexposed", "shadow_clipping", "highlight_clipping",
    "warm_bias", "cool_bias", "green_bias", "magenta_bias",
)


@dataclass(frozen=True)
class ChannelStats:
    bins: tuple[int, ...]
    shadow_clip_fraction: float
    highlight_clip_fraction: float
    black_point: int
    white_point: int
    mean: float


@dataclass(frozen=True)
class HistogramReport:
    width: int
    height: int
    channels: dict[str, ChannelStats]
    midtone_fraction: float
    dominant_channel: str
    warm_cool_bias: float  # (meanR - meanB) / 255
    green_magenta_bias: float  # (meanG - (meanR+meanB)/2) / 255

    @property
    def pixel_count(self) -> int:
        return self.width * self.height

    @property
    def pooled_mean(self) -> float:
        return sum(c.mean for c in self.channels.values()) / 3.0

    def pooled_percentile_span(self) -> tuple[int, int]:
        pooled = np.zeros(256, dtype=np.int64)
        for stats in self.channels.values():
            pooled += np.asarray(stats.bins, dtype=np.int64)
        return _percentile_bins(pooled, int(pooled.sum()))

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "channels": {
                name: {
                    "bins": list(stats.bins),
                    "shadow_clip_fraction": stats.shadow_clip_fraction,
                    "highlight_clip_fraction": stats.highlight_clip_fraction,
                    "black_point": stats.black_point,
                    "white_point": stats.white_point,
                    "mean": stats.mean,
                }
                for name, stats in self.channels.items()
            },
            "midtone_fraction": self.midtone_fraction,
            "dominant_channel": self.dominant_channel,
            "warm_cool_bias": self.warm_cool_bias,
            "green_magenta_bias": self.green_magenta_bias,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "HistogramReport":
        channels = {
            name: ChannelStats(
                bins=tuple(int(v) for v in ch["bins"]),
                shadow_clip_fraction=float(ch["shadow_clip_fraction"]),
                highlight_clip_fraction=float(ch["highlight_clip_fraction"]),
                black_point=int(ch["black_point"]),
                white_point=int(ch["white_point"]),
                mean=float(ch["mean"]),
            )
            for name, ch in doc["channels"].items()
        }
        return cls(
            width=int(doc["width"]),
            height=int(doc["height"]),
            channels=channels,
            midtone_fraction=float(doc["midtone_fraction"]),
            dominant_channel=str(doc["dominant_channel"]),
            warm_cool_bias=float(doc["warm_cool_bias"]),
            green_magenta_bias=float(doc["green_magenta_bias"]),
        )


@dataclass(frozen=True)
class ToneFinding:
    kind: str
    value: float
    threshold: float

    def to_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value, "threshold": self.threshold}


def _percentile_bins(counts: np.ndarray, total: int) -> tuple[int, int]:
    cumulative = np.cumsum(counts)
    black = int(np.searchsorted(cumulative, PERCENTILE_LOW * total, side="left"))
    white = int(np.searchsorted(cumulative, PERCENTILE_HIGH * total, side="left"))
    return min(black, 255), min(white, 255)


def compute_histogram(img: ImageBuffer) -> HistogramReport:
    """Exact 256-bin counts per channel plus derived tone features."""
    n = img.width * img.height
    channels: dict[str, ChannelStats] = {}
    means = {}
    bin_values = np.arange(256, dtype=np.float64)
    midtone_mass = 0
    for idx, name in enumerate(CHANNEL_NAMES):
        counts = np.bincount(img.pixels[..., idx].ravel(), minlength=256).astype(np.int64)
        black, white = _percentile_bins(counts, n)
        mean = float((counts * bin_values).sum() / n)
        means[name] = mean
        midtone_mass += int(counts[MIDTONE_LO:MIDTONE_HI + 1].sum())
        channels[name] = ChannelStats(
            bins=tuple(int(c) for c in counts),
            shadow_clip_fraction=float(counts[0] / n),
            highlight_clip_fraction=float(counts[255] / n),
            black_point=black,
            white_point=white,
            mean=mean,
        )
    dominant = max(CHANNEL_NAMES, key=lambda c: means[c])
    return HistogramReport(
        width=img.width,
        height=img.height,
        channels=channels,
        midtone_fraction=midtone_mass / (3 * n),
        dominant_channel=dominant,
        warm_cool_bias=(means["red"] - means["blue"]) / 255.0,
        green_magenta_bias=(means["green"] - (means["red"] + means["blue"]) / 2.0) / 255.0,
    )


def summarize_tone(report: HistogramReport) -> tuple[ToneFinding, ...]:
    """Closed-vocabulary findings from the fixed threshold table."""
    findings: list[ToneFinding] = []
    mean = report.pooled_mean
    if mean < UNDEREXPOSED_MEAN:
        findings.append(ToneFinding("underexposed", mean, UNDEREXPOSED_MEAN))
    elif mean > OVEREXPOSED_MEAN:
        findings.append(ToneFinding("overexposed", mean, OVEREXPOSED_MEAN))

    shadow_clip = max(c.shadow_clip_fraction for c in report.channels.values())
    if shadow_clip > CLIP_FRACTION:
        findings.append(ToneFinding("shadow_clipping", shadow_clip, CLIP_FRACTION))
    highlight_clip = max(c.highlight_clip_fraction for c in report.channels.values())
    if highlight_clip > CLIP_FRACTION:
        findings.append(ToneFinding("highlight_clipping", highlight_clip, CLIP_FRACTION))

    black, white = report.pooled_percentile_span()
    width = white - black
    if width < LOW_CONTRAST_WIDTH:
        findings.append(ToneFinding("low_contrast", float(width), float(LOW_CONTRAST_WIDTH)))
    elif report.midtone_fraction < HIGH_CONTRAST_MIDTONE_FRACTION:
        findings.append(ToneFinding("high_contrast", report.midtone_fraction,
                                    HIGH_CONTRAST_MIDTONE_FRACTION))

    if report.warm_cool_bias > COLOR_BIAS:
        findings.append(ToneFinding("warm_bias", report.warm_cool_bias, COLOR_BIAS))
    elif report.warm_cool_bias < -COLOR_BIAS:
        findings.append(ToneFinding("cool_bias", report.warm_cool_bias, COLOR_BIAS))
    if report.green_magenta_bias > COLOR_BIAS:
        findings.append(ToneFinding("green_bias", report.green_magenta_bias, COLOR_BIAS))
    elif report.green_magenta_bias < -COLOR_BIAS:
        findings.append(ToneFinding("magenta_bias", report.green_magenta_bias, COLOR_BIAS))

    kinds = {f.kind for f in findings}
    if not kinds & set(_IMBALANCE_KINDS):
        findings.insert(0, ToneFinding("balanced", 0.0, 0.0))
    return tuple(findings)


def is_balanced(findings: tuple[ToneFinding, ...]) -> bool:
    return any(f.kind == "balanced" for f in findings)


_PLOT_COLORS = {
    "red": np.array([230, 70, 70], dtype=np.float64),
    "green": np.array([80, 200, 90], dtype=np.float64),
    "blue": np.array([80, 120, 235], dtype=np.float64),
}
_PLOT_BACKGROUND = 24  # uniform dark gray


def render_histogram_image(report: HistogramReport) -> ImageBuffer:
    """Deterministic 768x256 overlaid RGB histogram plot.

    Each bin is a 3 px column; bars are max-normalized per plot and
    channel colors blend additively where they overlap.
    """
    canvas = np.full((PLOT_HEIGHT, PLOT_WIDTH, 3), float(_PLOT_BACKGROUND), dtype=np.float64)
    peak = max(
        max(stats.bins) for stats in report.channels.values()
    )
    if peak > 0:
        px_per_bin = PLOT_WIDTH // 256
        for name in CHANNEL_NAMES:
            stats = report.channels[name]
            color = _PLOT_COLORS[name]
            heights = np.floor(np.asarray(stats.bins, dtype=np.float64) / peak * (PLOT_HEIGHT - 2)).astype(np.int64)
            for b in range(256):
                h = heights[b]
                if h <= 0:
                    continue
                x0 = b * px_per_bin
                canvas[PLOT_HEIGHT - h:, x0:x0 + px_per_bin] += color * 0.55
    return ImageBuffer(pixels=np.clip(canvas, 0, 255).astype(np.uint8))
