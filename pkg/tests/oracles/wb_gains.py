"""White-balance gain oracle.

Evaluates the piecewise log/power Kelvin-to-RGB approximation with plain
scalar math and derives per-channel gains as the green-normalized ratio
neutral(6500K)/target(T), with tint scaling only the green gain by
(1 - tint/300). Prints the values frozen in the tests.
"""

from math import log, pow

NEUTRAL_KELVIN = 6500.0


def kelvin_to_rgb(kelvin: float) -> tuple[float, float, float]:
    t = kelvin / 100.0
    if t <= 66.0:
        r = 255.0
        g = 99.4708025861 * log(t) - 161.1195681661
        b = 0.0 if t <= 19.0 else 138.5177312231 * log(t - 10.0) - 305.0447927307
    else:
        r = 329.698727446 * pow(t - 60.0, -0.1332047592)
        g = 288.1221695283 * pow(t - 60.0, -0.0755148492)
        b = 255.0
    clamp = lambda x: min(255.0, max(1e-4, x))
    return clamp(r), clamp(g), clamp(b)


def gains(temp: float, tint: float) -> tuple[float, float, float]:
    nr, ng, nb = kelvin_to_rgb(NEUTRAL_KELVIN)
    tr, tg, tb = kelvin_to_rgb(temp)
    return (
        (nr / ng) / (tr / tg),
        1.0 - tint / 300.0,
        (nb / ng) / (tb / tg),
    )


CASES = [
    (6500.0, 0.0),
    (5800.0, 5.0),
    (6500.0, 150.0),
    (8000.0, 0.0),
    (2000.0, 0.0),
    (50000.0, 0.0),
]

if __name__ == "__main__":
    for temp, tint in CASES:
        r, g, b = gains(temp, tint)
        print(f"temp={temp:7.0f} tint={tint:+5.0f} -> ({r!r}, {g!r}, {b!r})")
