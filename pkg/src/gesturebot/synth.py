"""Deterministic synthetic gesture dataset: parametric hand silhouettes.

Stands in for camera data.  Each label renders a distinct hand (finger
count, finger length/width, fan angle, palm size); probes perturb a
template with pixel flips, scale jitter and a shift, then embed it in a
larger frame with an arm band so the full segmentation path is exercised.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigengesture import TEMPLATE_HEIGHT, TEMPLATE_WIDTH, GestureTemplate
from .raster import BinFrame
from .segmenter import Orientation, crop_roi, resize_binary

PROBE_HEIGHT = 160
PROBE_WIDTH = 120

# probes carry an arm band below the hand (fingers up)
DATASET_ORIENTATION = Orientation.ARM_FROM_BOTTOM

GESTURE_NAMES = [
    "halt", "advance", "retreat", "veer-left", "veer-right",
    "grip", "spare-6", "spare-7", "spare-8", "spare-9",
]


@dataclass(frozen=True)
class SyntheticSpec:
    seed: int = 42
    n_labels: int = 10
    variants_per_label: int = 100
    flip_fraction: float = 0.005
    max_shift_fraction: float = 0.03
    scale_jitter: float = 0.02

    def __post_init__(self):
        if not (1 <= self.n_labels <= 255):
            raise ValueError("n_labels must be in 1..255")
        if self.variants_per_label < 0:
            raise ValueError("variants_per_label must be >= 0")
        if not (0 <= self.flip_fraction <= 0.02):
            raise ValueError("flip_fraction must be <= 0.02")
        if not (0 <= self.max_shift_fraction <= 0.05):
            raise ValueError("max_shift_fraction must be <= 0.05")
        if not (0 <= self.scale_jitter <= 0.10):
            raise ValueError("scale_jitter must be <= 0.10")


def _capsule_mask(yy, xx, y0, x0, y1, x1, radius):
    """Pixels within `radius` of the segment (y0,x0)-(y1,x1)."""
    dy, dx = y1 - y0, x1 - x0
    seg2 = dy * dy + dx * dx
    if seg2 == 0:
        return (yy - y0) ** 2 + (xx - x0) ** 2 <= radius * radius
    t = np.clip(((yy - y0) * dy + (xx - x0) * dx) / seg2, 0.0, 1.0)
    cy = y0 + t * dy
    cx = x0 + t * dx
    return (yy - cy) ** 2 + (xx - cx) ** 2 <= radius * radius


def render_hand(label: int) -> np.ndarray:
    """Canonical fingers-up silhouette for a label, on a 60x80 canvas.

    Labels cycle through finger counts 1..5; the second family (labels
    5..9) uses a smaller palm, longer thinner fingers and a wider fan.
    """
    w, h = TEMPLATE_WIDTH, TEMPLATE_HEIGHT
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    n_fingers = 1 + label % 5
    family = (label // 5) % 2
    pcx = w / 2
    if family == 0:
        pcy, prx, pry = 58.0, 24.0, 19.0
        f_len, f_rad, fan = 36.0, 3.0, 85.0
    else:
        pcy, prx, pry = 62.0, 15.0, 13.0
        f_len, f_rad, fan = 50.0, 2.2, 115.0
    mask = ((yy - pcy) / pry) ** 2 + ((xx - pcx) / prx) ** 2 <= 1.0
    base_y = pcy - pry + 2.0
    if n_fingers == 1:
        angles = [0.0]
    else:
        angles = np.linspace(-fan / 2, fan / 2, n_fingers)
    for i, a in enumerate(np.deg2rad(angles)):
        # alternate finger lengths so adjacent counts stay far apart
        length = f_len * (1.0 - 0.18 * (i % 2))
        tip_y = base_y - length * np.cos(a)
        tip_x = pcx + length * np.sin(a)
        mask |= _capsule_mask(yy, xx, base_y, pcx, tip_y, tip_x, f_rad)
    return mask.astype(np.uint8)


def make_templates(spec: SyntheticSpec) -> list[GestureTemplate]:
    templates = []
    for label in range(spec.n_labels):
        tight = crop_roi(BinFrame(render_hand(label)))
        image = resize_binary(tight, TEMPLATE_WIDTH, TEMPLATE_HEIGHT)
        name = GESTURE_NAMES[label] if label < len(GESTURE_NAMES) else f"gesture-{label}"
        templates.append(GestureTemplate(label, image, name))
    return templates


def _make_probe(template: BinFrame, rng: np.random.Generator, spec: SyntheticSpec) -> BinFrame:
    bits = np.array(template.bits)
    # pixel flips, bounded by flip_fraction of the template area
    n_flips = int(spec.flip_fraction * bits.size)
    if n_flips:
        flat = rng.choice(bits.size, size=n_flips, replace=False)
        bits.reshape(-1)[flat] ^= 1
    # scale jitter
    s = 1.0 + rng.uniform(-spec.scale_jitter, spec.scale_jitter)
    hw = max(8, round(template.width * s))
    hh = max(8, round(template.height * s))
    hand = resize_binary(BinFrame(bits), hw, hh).bits
    # embed with a bounded shift
    canvas = np.zeros((PROBE_HEIGHT, PROBE_WIDTH), dtype=np.uint8)
    base_r = (PROBE_HEIGHT - hh) // 2
    base_c = (PROBE_WIDTH - hw) // 2
    r0 = base_r + rng.integers(-1, 2) * int(spec.max_shift_fraction * PROBE_HEIGHT)
    c0 = base_c + rng.integers(-1, 2) * int(spec.max_shift_fraction * PROBE_WIDTH)
    r0 = int(np.clip(r0, 2, PROBE_HEIGHT - hh - 34))
    c0 = int(np.clip(c0, 14, PROBE_WIDTH - hw - 14))
    canvas[r0 : r0 + hh, c0 : c0 + hw] = hand
    # wrist and arm bands below the palm; the wrist (and anything wider)
    # stays above the palm-tip row count, so the histogram minimum falls on
    # the hand's own bottom row and the crop recovers the hand exactly
    col_counts = hand.sum(axis=0)
    wx = c0 + int(np.argmax(col_counts))
    r1 = r0 + hh - 1
    wrist_half = (int(hand[-1].sum()) + 4) // 2 + 1
    arm_half = wrist_half + 3
    canvas[r1 + 1 : r1 + 8, wx - wrist_half : wx + wrist_half + 1] = 1
    canvas[r1 + 8 : PROBE_HEIGHT - 2, wx - arm_half : wx + arm_half + 1] = 1
    return BinFrame(canvas)


def gen_dataset(spec: SyntheticSpec) -> tuple[list[GestureTemplate], list[tuple[int, BinFrame]]]:
    """Deterministically build (templates, labeled probes) from the spec."""
    rng = np.random.default_rng(spec.seed)
    templates = make_templates(spec)
    probes = []
    for t in templates:
        for _ in range(spec.variants_per_label):
            probes.append((t.label, _make_probe(t.image, rng, spec)))
    return templates, probes
