"""Authored content of the five bundled demo sessions.

Each session script carries the source-image recipe, the stage texts,
the absolute parameter set of every iteration, and the reflection
verdicts. tools/make_fixtures.py turns these into recorded transcripts.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class IterationScript:
    params: dict
    tone_analysis: str
    rationale: str
    satisfactory: bool
    critique: str
    directives: list[dict] = field(default_factory=list)


@dataclass(frozen=True)
class SessionScript:
    name: str
    image_recipe: dict  # args for make_fixtures.build_source_image
    description: str
    approaches: list[dict]
    plan: str
    iterations: list[IterationScript]
    summary: str


def mixer(**channels) -> dict:
    """Full 8-channel mixer dict with the named channels set."""
    out = {
        name: {"hue": 0, "saturation": 0, "luminance": 0}
        for name in ("red", "orange", "yellow", "green", "cyan", "blue", "purple", "magenta")
    }
    for name, (h, s, l) in channels.items():
        out[name] = {"hue": h, "saturation": s, "luminance": l}
    return out


def basic(exposure, contrast, highlights, shadows, whites, blacks, temp, tint, vibrance, saturation):
    return {
        "exposure": exposure, "contrast": contrast, "highlights": highlights,
        "shadows": shadows, "whites": whites, "blacks": blacks,
        "temp": temp, "tint": tint, "vibrance": vibrance, "saturation": saturation,
    }


def _approaches(a, b, c) -> list[dict]:
    return [
        {"name": a[0], "light": a[1], "color": a[2], "mixer_notes": a[3]},
        {"name": b[0], "light": b[1], "color": b[2], "mixer_notes": b[3]},
        {"name": c[0], "light": c[1], "color": c[2], "mixer_notes": c[3]},
    ]


COASTAL_CLIFFS = SessionScript(
    name="coastal_cliffs",
    image_recipe={"seed": 101, "top": (150, 176, 205), "bottom": (168, 136, 96), "noise": 18},
    description=(
        "Banded shoreline rock fills the lower frame in warm tans, with a "
        "pale blue sky band above. Light is flat and even, so the stone "
        "texture reads softer than it could."
    ),
    approaches=_approaches(
        ("Warm stone lift", "Small exposure push with moderate contrast; keep sky detail by easing highlights.",
         "Nudge temperature warm and add vibrance for the rock tones.",
         "Raise orange and yellow presence; quiet the blues slightly."),
        ("Cool overcast read", "Lower exposure a touch and soften whites for a muted register.",
         "Cool the temperature and pull vibrance down.",
         "Desaturate warm channels; lift cyan and blue luminance."),
        ("Graphic punch", "Strong contrast with deep blacks and bright whites.",
         "Push saturation hard while keeping the sky in range.",
         "Amplify orange and yellow saturation; darken blue for weight."),
    ),
    plan=(
        "Go with the warm stone lift: a half-stop of exposure, moderate "
        "contrast, eased highlights with lifted shadows, slightly warm "
        "temperature, and stronger orange and yellow presence while the "
        "blues step back."
    ),
    iterations=[
        IterationScript(
            params={**basic(0.5, 20, -20, 20, 10, -10, 5800, 5, 25, 15),
                    "mixer": mixer(orange=(0, 10, 10), yellow=(0, 10, 15),
                                   cyan=(0, -10, 5), blue=(0, -10, -10))},
            tone_analysis=(
                "Mass sits in the midtones with clean tails on both ends; "
                "red and green run slightly ahead of blue, which fits the "
                "warm stone but leaves the sky a little heavy."
            ),
            rationale=(
                "Open the frame half a stop, ease highlights while lifting "
                "shadows, warm the cast a touch, and tilt the mixer toward "
                "the stone's orange and yellow."
            ),
            satisfactory=False,
            critique=(
                "Not satisfactory yet: the bright rock faces still push too "
                "hot, the shadow bands can open further, and the cast "
                "wants one more step toward magenta."
            ),
            directives=[{"path": "highlights", "direction": "decrease"},
                        {"path": "shadows", "direction": "increase"},
                        {"path": "tint", "direction": "increase"}],
        ),
        IterationScript(
            params={**basic(0.3, 25, -30, 25, 15, -10, 5800, 8, 20, 10),
                    "mixer": mixer(orange=(0, 15, 10), yellow=(0, 15, 20),
                                   cyan=(0, -10, 5), blue=(0, -15, -10))},
            tone_analysis=(
                "The retouched frame holds a fuller midtone spread with no "
                "clipping; channel balance is close, with warmth carried "
                "mostly by the midtones."
            ),
            rationale=(
                "Trade a little exposure for contrast, push the highlight "
                "recovery and shadow lift further, and strengthen the warm "
                "channels while calming global saturation."
            ),
            satisfactory=True,
            critique=(
                "Satisfactory: stone texture reads warm and dimensional, "
                "the sky keeps its detail, and the balance between the two "
                "holds together."
            ),
        ),
    ],
    summary=(
        "Two passes settled the frame: the first opened exposure and "
        "warmed the stone, the second traded some of that brightness for "
        "contrast and highlight recovery while the mixer kept the rock "
        "bands forward of the sky."
    ),
)


DUSK_TREE = SessionScript(
    name="dusk_tree",
    image_recipe={"seed": 202, "top": (214, 180, 150), "bottom": (30, 34, 44), "noise": 14},
    description=(
        "A dark silhouette anchors the frame against a pale dusk gradient; "
        "the ground falls into near-black while the sky holds most of the "
        "light."
    ),
    approaches=_approaches(
        ("Quiet balance", "Lift the foreground gently and hold the sky; blacks stay rich.",
         "Keep the cast neutral with a small vibrance touch.",
         "Warm channel luminance up slightly; leave blue alone."),
        ("Golden hour", "Brighten globally and soften shadows for a glowing read.",
         "Warm strongly and add saturation.",
         "Push orange and red; soften blue saturation."),
        ("Stark silhouette", "Deepen contrast and crush the foreground for drama.",
         "Cool the sky and boost vibrance hard.",
         "Lift blue and cyan luminance; darken warm channels."),
    ),
    plan=(
        "Blend the quiet and golden reads: a strong exposure lift for the "
        "foreground, heavy highlight and white recovery to protect the "
        "sky, gentle shadow support, and warm yellows and oranges in the "
        "mixer with a restrained blue lift."
    ),
    iterations=[
        IterationScript(
            params={**basic(1.5, 20, -60, 30, -35, 15, 5500, 0, 15, 10),
                    "mixer": mixer(orange=(0, 10, 15), yellow=(0, 10, 20), blue=(0, 15, 10))},
            tone_analysis=(
                "The histogram splits into two masses: a tall dark cluster "
                "from the ground and silhouette, and a bright cluster with "
                "a clear blue lead. Midtones between them are thin."
            ),
            rationale=(
                "Push exposure well up for the foreground, pull highlights "
                "and whites down hard to keep the sky, support shadows and "
                "blacks, warm slightly, and lift the warm channels."
            ),
            satisfactory=False,
            critique=(
                "Not satisfactory: the frame still leans cold against the "
                "intended warmth, the brightest sky runs close to the "
                "edge, and the dark mass keeps swallowing ground detail."
            ),
            directives=[{"path": "temp", "direction": "increase"},
                        {"path": "highlights", "direction": "decrease"},
                        {"path": "shadows", "direction": "increase"}],
        ),
        IterationScript(
            params={**basic(1.5, 20, -75, 50, -40, 10, 6500, 0, 20, 10),
                    "mixer": mixer(orange=(0, 15, 20), yellow=(0, 10, 25), blue=(0, 10, 15))},
            tone_analysis=(
                "Both end clusters persist, the bright one still led by "
                "blue; midtones stay underfilled, so the tonal step from "
                "silhouette to sky remains abrupt."
            ),
            rationale=(
                "Keep the exposure, go further on highlight recovery and "
                "shadow lift, warm the temperature to neutralize the blue "
                "lead, and brighten the warm channels a step more."
            ),
            satisfactory=False,
            critique=(
                "Not satisfactory: midtone gradation is still thin, the "
                "shadow floor sits slightly low, and the sky's cool lead "
                "now overshoots the warmth the plan asked for."
            ),
            directives=[{"path": "whites", "direction": "decrease"},
                        {"path": "blacks", "direction": "increase"},
                        {"path": "temp", "direction": "decrease"}],
        ),
        IterationScript(
            params={**basic(1.5, 20, -70, 30, -50, 20, 5500, 10, 15, 10),
                    "mixer": mixer(orange=(0, 10, 15), yellow=(0, 10, 20), blue=(0, 10, 15))},
            tone_analysis=(
                "The two masses have pulled toward each other with more "
                "midtone fill; channel peaks sit closer together, leaving "
                "only a mild cool lead in the brightest band."
            ),
            rationale=(
                "Back off the extreme shadow lift, trade white level for "
                "highlight room, step the temperature back toward warm with "
                "a touch of tint, and settle the mixer to its earlier state."
            ),
            satisfactory=True,
            critique=(
                "Satisfactory: the silhouette keeps its weight, the ground "
                "shows believable texture, and the sky gradient lands warm "
                "without losing its depth."
            ),
        ),
    ],
    summary=(
        "Three passes walked the frame in: a big exposure push with sky "
        "recovery, then deeper recovery that briefly overcooled the cast, "
        "and a final rebalance of temperature, whites, and blacks that "
        "let the silhouette sit against a warm dusk gradient."
    ),
)


LEAFY_SHALLOWS = SessionScript(
    name="leafy_shallows",
    image_recipe={"seed": 303, "top": (96, 142, 128), "bottom": (58, 104, 92), "noise": 20},
    description=(
        "Shallow green water fills the frame with scattered bright leaf "
        "flecks; a pale figure-like highlight stands off-center. The light "
        "is soft with no hard shadows."
    ),
    approaches=_approaches(
        ("Subtle and true", "Small exposure and contrast touches; protect the soft highlights.",
         "Neutral temperature with light vibrance.",
         "Feed green saturation and luminance; steady blue."),
        ("Warm shallows", "Brighten and soften contrast for an airy read.",
         "Warm noticeably and saturate gently.",
         "Shift green toward yellow; lift orange luminance."),
        ("Vivid tropic", "Hard contrast and bright highlights.",
         "Cool the water and push saturation high.",
         "Swing green toward cyan; deepen blue heavily."),
    ),
    plan=(
        "Stay subtle and true: minor exposure lift, moderate contrast, "
        "gentle highlight easing with shadow support, near-neutral "
        "temperature, and mixer work that freshens green and blue while "
        "keeping the leaf flecks bright."
    ),
    iterations=[
        IterationScript(
            params={**basic(0.2, 15, -20, 15, -10, 10, 5700, 5, 20, 10),
                    "mixer": mixer(orange=(0, 10, 5), yellow=(0, 10, 10),
                                   green=(0, 20, 15), blue=(0, 10, 10))},
            tone_analysis=(
                "Tones concentrate in the lower midtones with an empty top "
                "quarter; green leads the other channels through the "
                "midrange, reading as a cast rather than subject color."
            ),
            rationale=(
                "Small exposure and contrast lift, slight highlight easing, "
                "modest warmth, and a green-forward mixer to make the water "
                "read intentional."
            ),
            satisfactory=False,
            critique=(
                "Not satisfactory: the frame stays a touch flat, with "
                "whites sitting too low for the leaf flecks to sparkle and "
                "midtone separation still thin."
            ),
            directives=[{"path": "whites", "direction": "increase"},
                        {"path": "contrast", "direction": "increase"}],
        ),
        IterationScript(
            params={**basic(0.3, 25, -25, 20, -5, 15, 6000, 10, 30, 15),
                    "mixer": mixer(orange=(0, 15, 10), yellow=(0, 15, 10),
                                   green=(0, 25, 20), blue=(0, 20, 15))},
            tone_analysis=(
                "Midtone spread has widened and the top quarter now holds "
                "usable data; the green lead persists but reads intentional "
                "against the lifted blue."
            ),
            rationale=(
                "A step more exposure and contrast, whites nearly restored, "
                "warmer temperature with added tint, and stronger green and "
                "blue presence for the water."
            ),
            satisfactory=True,
            critique=(
                "Satisfactory: the water reads fresh, the flecks carry "
                "light, and the added contrast gives the frame its depth "
                "without losing the soft mood."
            ),
        ),
    ],
    summary=(
        "Two passes: a cautious lift that proved too flat, then a firmer "
        "contrast and vibrance step with green and blue feeding the water "
        "color, landing a fresh but still quiet result."
    ),
)


PASTEL_HOUSE = SessionScript(
    name="pastel_house",
    image_recipe={"seed": 404, "top": (170, 196, 224), "bottom": (212, 186, 120), "noise": 16},
    description=(
        "A sunlit pastel facade in soft yellow sits under a light blue "
        "sky, with green growth along the base. The register is bright "
        "and friendly with shallow shadows."
    ),
    approaches=_approaches(
        ("Sunny and honest", "Mild brightness and contrast; keep shadows soft but present.",
         "A touch of warmth and vibrance.",
         "Feed yellow and green gently; let the blue shutters sing."),
        ("Cool morning", "Ease exposure down with soft highlights.",
         "Cool the cast and mute vibrance.",
         "Desaturate warm channels; push blue saturation."),
        ("Postcard pop", "Hard contrast, deep blacks, bright whites, slight vignette feel.",
         "Strong vibrance across the warm range.",
         "Saturate yellow and green hard; shift yellow toward orange."),
    ),
    plan=(
        "Sunny and honest: small exposure bump, moderate contrast, gentle "
        "shadow support with whites kept in check, slightly warm "
        "temperature, and mixer attention on the yellow walls, green "
        "growth, and blue accents."
    ),
    iterations=[
        IterationScript(
            params={**basic(0.3, 15, -10, 10, 20, -10, 5500, 0, 10, 5),
                    "mixer": mixer(yellow=(0, 10, 15), green=(0, 5, 5), blue=(0, 10, 15))},
            tone_analysis=(
                "Mass leans into midtones and upper tones with little in "
                "the shadow third; red and green midtones lead while blue "
                "trails, so the frame reads warm but shallow."
            ),
            rationale=(
                "Light exposure and contrast lift, whites up for sparkle "
                "with blacks slightly deeper, neutral tint, and gentle "
                "feeding of yellow, green, and blue."
            ),
            satisfactory=False,
            critique=(
                "Not satisfactory: shadow depth is still missing so the "
                "facade looks pasted on, and the warm lead needs cooling "
                "for the blue accents to register."
            ),
            directives=[{"path": "blacks", "direction": "decrease"},
                        {"path": "temp", "direction": "decrease"},
                        {"path": "contrast", "direction": "increase"}],
        ),
        IterationScript(
            params={**basic(0.3, 25, -10, 15, 10, -20, 5000, 0, 15, 5),
                    "mixer": mixer(orange=(0, 10, 5), yellow=(0, 20, 15),
                                   green=(0, 10, 10), blue=(0, 15, 15))},
            tone_analysis=(
                "The shadow third now holds real data and the channel "
                "peaks sit closer together; the remaining warmth reads as "
                "sunlight rather than a cast."
            ),
            rationale=(
                "Deepen blacks and raise contrast for grounding, cool the "
                "temperature a clear step, and strengthen yellow, green, "
                "and blue so each element holds its own color."
            ),
            satisfactory=True,
            critique=(
                "Satisfactory: the facade has weight, the sky and accents "
                "read clean against the warm walls, and nothing tips into "
                "the artificial."
            ),
        ),
    ],
    summary=(
        "The first pass brightened but floated; the second grounded the "
        "frame with deeper blacks and stronger contrast while a cooler "
        "temperature let the blue accents balance the sunny walls."
    ),
)


DESERT_SPIRE = SessionScript(
    name="desert_spire",
    image_recipe={"seed": 505, "top": (104, 96, 100), "bottom": (120, 74, 52), "noise": 22},
    description=(
        "A dark, moody desert flat in rusty browns rises toward a single "
        "vertical spire against a heavy, clouded sky. The whole register "
        "sits low with the weight in the land."
    ),
    approaches=_approaches(
        ("Patient reveal", "Strong exposure lift with highlight recovery so the sky keeps its drama.",
         "Slight warmth and vibrance for the rust tones.",
         "Feed red, orange, and yellow; steady blue for the sky."),
        ("Blue hour", "Modest lift with deep shadows retained.",
         "Cool strongly and mute saturation.",
         "Lift blue and cyan; desaturate the rust range."),
        ("Furnace", "High contrast with bright highlights.",
         "Heavy warmth and saturation.",
         "Push red and orange hard; darken blue for contrast."),
    ),
    plan=(
        "Patient reveal: a big exposure push balanced by strong highlight "
        "and white recovery, shadows and blacks opened for the land, "
        "modest warmth, and mixer support for red, orange, and yellow "
        "with the sky's blue lifted for separation."
    ),
    iterations=[
        IterationScript(
            params={**basic(1.5, 20, -60, 50, -20, 30, 7000, 10, 30, 10),
                    "mixer": mixer(red=(0, 15, 10), orange=(0, 20, 10), yellow=(0, 10, 10),
                                   green=(0, 0, 5), blue=(0, 10, 15))},
            tone_analysis=(
                "The register sits low with a defined dark edge and modest "
                "highlight presence; red leads in the shadows, giving the "
                "land its rust weight, while the sky holds a faint cool "
                "lead up top."
            ),
            rationale=(
                "Open the frame well over a stop, recover the sky hard, "
                "lift shadows and blacks for the land, warm generously, and "
                "feed the rust channels."
            ),
            satisfactory=False,
            critique=(
                "Not satisfactory: the land now reads but its darkest "
                "pockets clip away, the warm push overshoots toward "
                "orange, and the brightest band wants more restraint."
            ),
            directives=[{"path": "temp", "direction": "decrease"},
                        {"path": "highlights", "direction": "decrease"},
                        {"path": "shadows", "direction": "decrease"}],
        ),
        IterationScript(
            params={**basic(1.5, 25, -50, 40, -20, 20, 5500, 10, 30, 10),
                    "mixer": mixer(red=(0, 15, 10), orange=(0, 20, 15), yellow=(0, 10, 20),
                                   green=(0, 5, 15), blue=(0, 10, 20))},
            tone_analysis=(
                "Brightness now concentrates toward the upper band with a "
                "controlled dark floor; the warm lead has eased but the "
                "top of the range presses against its limit."
            ),
            rationale=(
                "Trade some shadow lift for contrast, relax the highlight "
                "pull, cool the temperature sharply, and brighten the land "
                "channels' luminance."
            ),
            satisfactory=False,
            critique=(
                "Not satisfactory: the brightest sky still crowds the top "
                "end, and the frame has lost some of its grounded weight "
                "with blacks this open."
            ),
            directives=[{"path": "highlights", "direction": "decrease"},
                        {"path": "blacks", "direction": "decrease"},
                        {"path": "whites", "direction": "decrease"}],
        ),
        IterationScript(
            params={**basic(1.2, 20, -60, 40, -30, -20, 5700, 0, 30, 15),
                    "mixer": mixer(red=(0, 15, 10), orange=(0, 10, 15), yellow=(0, 10, 20),
                                   green=(0, 5, 10), blue=(0, 10, 20))},
            tone_analysis=(
                "The spread is nearly even: a solid dark floor without "
                "clipping, a restrained bright band, and channel peaks in "
                "agreement through the midrange."
            ),
            rationale=(
                "Ease the exposure slightly, push whites and highlights "
                "down once more, send blacks negative to restore weight, "
                "neutralize the tint, and add a final saturation step."
            ),
            satisfactory=True,
            critique=(
                "Satisfactory: the land carries believable rust texture "
                "under a sky that keeps its drama, and the low-key mood of "
                "the original survives the brightening."
            ),
        ),
    ],
    summary=(
        "Three passes: a bold reveal that overshot the warmth, a cooling "
        "correction that floated the blacks, and a final settling pass "
        "that restored the frame's weight while holding the recovered sky."
    ),
)


ALL_SESSIONS = [COASTAL_CLIFFS, DUSK_TREE, LEAFY_SHALLOWS, PASTEL_HOUSE, DESERT_SPIRE]
