"""FiveShape corpus: binary shape templates that constrain sticker outlines.

The corpus holds five kinds of centered convex shapes (circle, square,
pentagon, hexagon, heptagon) rasterized as 80x80 binary masks.  Foreground
areas are kept inside a common band so no kind is systematically larger
than another.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

SHAPE_KINDS = ("circle", "square", "pentagon", "hexagon", "heptagon")
MASK_SIZE = 80
AREA_BAND = (0.55, 0.85)

_MAGIC = b"FVSH"
_VERSION = 1


@dataclass(frozen=True)
class ShapeMask:
    """Single-channel mask in [0, 1]; corpus templates are strictly binary."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 2:
            raise ValueError(f"mask must be 2-D, got shape {p.shape}")

    @property
    def area_fraction(self) -> float:
        return float(self.pixels.sum()) / self.pixels.size


@dataclass
class CorpusConfig:
    per_kind: int = 3000
    size: int = MASK_SIZE
    area_band: tuple[float, float] = AREA_BAND
    rotation_range: tuple[float, float] = (0.0, 360.0)
    seed: int = 0


@dataclass
class ShapeCorpus:
    masks: np.ndarray  # (N, H, W) uint8
    labels: list[str]
    config: CorpusConfig = field(default_factory=CorpusConfig)

    @property
    def count(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return self.count


def _polygon_vertices(kind: str, area: float, rotation_deg: float) -> np.ndarray:
    """Vertices (k, 2) of a centered regular polygon with the given area."""
    k = {"square": 4, "pentagon": 5, "hexagon": 6, "heptagon": 7}[kind]
    # area of a regular k-gon with circumradius R: k * R^2 * sin(2*pi/k) / 2
    radius = np.sqrt(2.0 * area / (k * np.sin(2.0 * np.pi / k)))
    base = np.pi / 4.0 if k == 4 else np.pi / 2.0  # square axis-aligned at rot 0
    angles = base + np.deg2rad(rotation_deg) + 2.0 * np.pi * np.arange(k) / k
    return radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)


def generate_shape_mask(
    kind: str,
    size: int = MASK_SIZE,
    area_fraction: float = 0.64,
    rotation: float = 0.0,
    seed: int = 0,
) -> ShapeMask:
    """Rasterize one centered shape template as a binary mask.

    The foreground covers ``area_fraction`` of the grid to within 2%;
    ``seed`` is accepted for interface symmetry (rasterization itself is
    deterministic given the geometry).
    """
    if kind not in SHAPE_KINDS:
        raise ValueError(f"unknown shape kind {kind!r}; expected one of {SHAPE_KINDS}")
    if not AREA_BAND[0] <= area_fraction <= AREA_BAND[1]:
        raise ValueError(
            f"area_fraction {area_fraction} outside band {list(AREA_BAND)}"
        )
    del seed
    target_area = area_fraction * size * size
    center = (size - 1) / 2.0
    ys, xs = np.mgrid[0:size, 0:size]
    px = xs - center
    py = ys - center
    if kind == "circle":
        radius = np.sqrt(target_area / np.pi)
        mask = (px * px + py * py) <= radius * radius
    else:
        verts = _polygon_vertices(kind, target_area, rotation)
        mask = np.ones((size, size), dtype=bool)
        for i in range(len(verts)):
            ax, ay = verts[i]
            bx, by = verts[(i + 1) % len(verts)]
            cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
            mask &= cross >= 0
    return ShapeMask(mask.astype(np.uint8))


def build_corpus(config: CorpusConfig | None = None) -> ShapeCorpus:
    """Generate the full template corpus, uniformly over the five kinds."""
    config = config or CorpusConfig()
    rng = np.random.default_rng(config.seed)
    lo, hi = config.area_band
    masks = np.empty(
        (config.per_kind * len(SHAPE_KINDS), config.size, config.size), dtype=np.uint8
    )
    labels: list[str] = []
    i = 0
    for kind in SHAPE_KINDS:
        for _ in range(config.per_kind):
            frac = rng.uniform(lo, hi)
            rot = rng.uniform(*config.rotation_range)
            masks[i] = generate_shape_mask(kind, config.size, frac, rot).pixels
            labels.append(kind)
            i += 1
    return ShapeCorpus(masks=masks, labels=labels, config=config)


def sample_batch(corpus: ShapeCorpus, m: int, seed: int) -> np.ndarray:
    """Draw m templates uniformly with replacement; returns (m, H, W) float32."""
    if corpus.count == 0:
        raise ValueError("cannot sample from an empty corpus")
    if m < 1:
        raise ValueError("batch size must be >= 1")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, corpus.count, size=m)
    return corpus.masks[idx].astype(np.float32)


def is_connected(mask: np.ndarray) -> bool:
    _, n = ndimage.label(mask > 0)
    return n == 1


def save_corpus(corpus: ShapeCorpus, path: str | Path) -> None:
    """Packed binary file: header (magic, version, count, H, W) + uint8 masks,
    plus a JSON manifest sidecar."""
    path = Path(path)
    n, h, w = corpus.masks.shape
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<IIII", _VERSION, n, h, w))
        f.write(corpus.masks.tobytes())
    manifest = {
        "seed": corpus.config.seed,
        "per_kind": corpus.config.per_kind,
        "area_band": list(corpus.config.area_band),
        "entries": [{"index": i, "kind": k} for i, k in enumerate(corpus.labels)],
    }
    with open(path.with_suffix(path.suffix + ".manifest.json"), "w") as f:
        json.dump(manifest, f, indent=0, sort_keys=True)


def load_corpus(path: str | Path) -> ShapeCorpus:
    path = Path(path)
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != _MAGIC:
            raise ValueError(f"bad corpus magic {magic!r}")
        version, n, h, w = struct.unpack("<IIII", f.read(16))
        if version != _VERSION:
            raise ValueError(f"unsupported corpus version {version}")
        masks = np.frombuffer(f.read(n * h * w), dtype=np.uint8).reshape(n, h, w)
    with open(path.with_suffix(path.suffix + ".manifest.json")) as f:
        manifest = json.load(f)
    labels = [e["kind"] for e in manifest["entries"]]
    cfg = CorpusConfig(
        per_kind=manifest["per_kind"],
        size=h,
        area_band=tuple(manifest["area_band"]),
        seed=manifest["seed"],
    )
    return ShapeCorpus(masks=masks.copy(), labels=labels, config=cfg)
