"""Brute-force histogram oracle.

Recounts bins and rederives every tone feature with plain Python loops
over the pixel values. Deliberately avoids numpy so the counting path is
independent of the implementation under test.
"""

MIDTONE_LO = 64
MIDTONE_HI = 191


def channel_bins(values) -> list[int]:
    bins = [0] * 256
    for v in values:
        bins[v] += 1
    return bins


def percentile_bin(bins: list[int], total: int, fraction: float) -> int:
    target = fraction * total
    running = 0
    for idx, count in enumerate(bins):
        running += count
        if running >= target:
            return idx
    return 255


def report_features(pixels) -> dict:
    """pixels: iterable of (r, g, b) byte triples."""
    triples = list(pixels)
    n = len(triples)
    channels = {}
    means = {}
    midtone_mass = 0
    for idx, name in enumerate(("red", "green", "blue")):
        values = [p[idx] for p in triples]
        bins = channel_bins(values)
        mean = sum(values) / n
        means[name] = mean
        midtone_mass += sum(bins[MIDTONE_LO:MIDTONE_HI + 1])
        channels[name] = {
            "bins": bins,
            "shadow_clip_fraction": bins[0] / n,
            "highlight_clip_fraction": bins[255] / n,
            "black_point": percentile_bin(bins, n, 0.001),
            "white_point": percentile_bin(bins, n, 0.999),
            "mean": mean,
        }
    dominant = max(("red", "green", "blue"), key=lambda c: means[c])
    return {
        "channels": channels,
        "midtone_fraction": midtone_mass / (3 * n),
        "dominant_channel": dominant,
        "warm_cool_bias": (means["red"] - means["blue"]) / 255.0,
        "green_magenta_bias": (means["green"] - (means["red"] + means["blue"]) / 2.0) / 255.0,
    }


if __name__ == "__main__":
    import random

    rng = random.Random(11)
    pixels = [(rng.randrange(256), rng.randrange(256), rng.randrange(256)) for _ in range(4096)]
    feats = report_features(pixels)
    for name, ch in feats["channels"].items():
        print(name, "mean", ch["mean"], "bp", ch["black_point"], "wp", ch["white_point"])
    print("midtone_fraction", feats["midtone_fraction"])
