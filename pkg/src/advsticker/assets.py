"""Face assets: image + mesh + UV + SH lighting + camera + sticker regions.

Assets are either synthesized parametrically (half-ellipsoid head with a
procedural identity texture) or loaded from an asset directory, so
externally reconstructed meshes can be ingested through the same format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .sh import IlluminationSH, sh_irradiance

IMAGE_SIZE = 300
TEMPLATE_SIZE = 600
DEFAULT_SLOT = 90

REGION_NAMES = (
    "right superciliary arch",
    "left superciliary arch",
    "nasal bone",
    "right nasolabial sulcus",
    "left nasolabial sulcus",
)

# template-space anchor centers (u, v); spaced so slots up to 100px do not overlap
_ANCHOR_UV = {
    "right superciliary arch": (0.32, 0.37),
    "left superciliary arch": (0.68, 0.37),
    "nasal bone": (0.50, 0.48),
    "right nasolabial sulcus": (0.30, 0.64),
    "left nasolabial sulcus": (0.70, 0.64),
}


@dataclass(frozen=True)
class RegionAnchor:
    name: str
    center_uv: tuple[float, float]
    orientation: float = 0.0
    slot_size: int = DEFAULT_SLOT

    def __post_init__(self):
        if self.name not in REGION_NAMES:
            raise ValueError(f"unknown region {self.name!r}")


def default_regions(slot_size: int = DEFAULT_SLOT) -> dict[str, RegionAnchor]:
    return {
        name: RegionAnchor(name, _ANCHOR_UV[name], 0.0, slot_size)
        for name in REGION_NAMES
    }


class AssetError(ValueError):
    pass


@dataclass
class FaceAsset:
    image: np.ndarray  # (300, 300, 3) float32 in [0, 1], on the 8-bit grid
    vertices: np.ndarray  # (V, 3)
    triangles: np.ndarray  # (T, 3) int
    uv: np.ndarray  # (V, 2) in [0, 1]
    normals: np.ndarray  # (V, 3) unit
    sh: IlluminationSH
    camera: np.ndarray  # (3, 4), projective rows
    label: str = ""
    regions: dict[str, RegionAnchor] = field(default_factory=default_regions)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def validate(self) -> "FaceAsset":
        if self.image.shape != (IMAGE_SIZE, IMAGE_SIZE, 3):
            raise AssetError(f"image shape {self.image.shape}")
        v = len(self.vertices)
        if self.triangles.min() < 0 or self.triangles.max() >= v:
            raise AssetError("triangle index out of range")
        if self.uv.min() < -1e-9 or self.uv.max() > 1 + 1e-9:
            raise AssetError("uv outside [0,1]")
        if self.sh.coeffs.shape != (9, 3):
            raise AssetError("sh length")
        if self.camera.shape != (3, 4):
            raise AssetError(f"camera shape {self.camera.shape}")
        if abs(np.linalg.det(self.camera[:, :3])) < 1e-12:
            raise AssetError("degenerate camera")
        pu, pv, _ = project_vertices(self.vertices, self.camera)
        if pu.min() < -0.5 or pu.max() > IMAGE_SIZE - 0.5 or pv.min() < -0.5 or pv.max() > IMAGE_SIZE - 0.5:
            raise AssetError("projected mesh outside image bounds")
        return self


def project_vertices(vertices: np.ndarray, camera: np.ndarray):
    """Project (V,3) model points to pixel coords and depth."""
    hom = vertices @ camera[:, :3].T + camera[:, 3]
    depth = hom[:, 2]
    return hom[:, 0] / depth, hom[:, 1] / depth, depth


def _ellipsoid_point(alpha, beta, radii):
    rx, ry, rz = radii
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    pts = np.stack([rx * sa * cb, ry * sb, rz * ca * cb], axis=-1)
    return pts


def _ellipsoid_normal(pts, radii):
    n = pts / np.asarray(radii, dtype=np.float64) ** 2
    return n / np.linalg.norm(n, axis=-1, keepdims=True)


_ALPHA_MAX = 1.3
_BETA_MAX = 1.2


def _uv_to_param(uv):
    alpha = (uv[..., 0] - 0.5) * np.pi
    beta = (0.5 - uv[..., 1]) * np.pi
    return alpha, beta


def _camera_matrix(yaw_deg: float, pitch_deg: float, focal: float = 500.0,
                   distance: float = 600.0) -> np.ndarray:
    y, p = np.deg2rad(yaw_deg), np.deg2rad(pitch_deg)
    ryaw = np.array([[np.cos(y), 0, np.sin(y)], [0, 1, 0], [-np.sin(y), 0, np.cos(y)]])
    rpitch = np.array([[1, 0, 0], [0, np.cos(p), -np.sin(p)], [0, np.sin(p), np.cos(p)]])
    flip = np.diag([1.0, 1.0, -1.0])  # face front (+z) toward the camera
    m = flip @ rpitch @ ryaw
    k = np.array([[focal, 0, IMAGE_SIZE / 2], [0, -focal, IMAGE_SIZE / 2], [0, 0, 1.0]])
    rt = np.concatenate([m, [[0], [0], [distance]]], axis=1)
    return k @ rt


def _identity_texture(rng: np.random.Generator) -> np.ndarray:
    """Smooth per-identity color field on the 600x600 UV template."""
    u = np.linspace(0, 1, TEMPLATE_SIZE)
    uu, vv = np.meshgrid(u, u, indexing="xy")
    base = rng.uniform(0.35, 0.75, size=3)
    tex = np.tile(base, (TEMPLATE_SIZE, TEMPLATE_SIZE, 1))
    for _ in range(6):
        freq = rng.uniform(1.5, 6.0, size=2)
        phase = rng.uniform(0, 2 * np.pi, size=2)
        amp = rng.uniform(0.04, 0.14, size=3)
        wave = np.sin(2 * np.pi * freq[0] * uu + phase[0]) * np.sin(
            2 * np.pi * freq[1] * vv + phase[1]
        )
        tex += wave[..., None] * amp
    return np.clip(tex, 0.0, 1.0)


def _quantize(image: np.ndarray) -> np.ndarray:
    return (np.clip(image, 0.0, 1.0) * 255.0).round().astype(np.uint8).astype(np.float32) / 255.0


def make_synthetic_asset(
    identity_seed: int,
    pose: tuple[float, float] = (0.0, 0.0),
    sh: IlluminationSH | None = None,
    grid: int = 32,
    label: str | None = None,
) -> FaceAsset:
    """Parametric half-ellipsoid face with a procedural identity texture.

    The asset image is the identity texture rasterized under the given
    pose and SH lighting, so recognition and sticker rendering share one
    consistent imaging model.
    """
    yaw, pitch = pose
    if abs(yaw) > 30 or abs(pitch) > 30:
        raise ValueError("|yaw| and |pitch| must be <= 30 degrees")
    if sh is None:
        sh = IlluminationSH.from_flat([0.9] + [0.0] * 8 + [0.9] + [0.0] * 8 + [0.9] + [0.0] * 8)
    rng = np.random.default_rng(identity_seed)
    radii = np.array([95.0, 120.0, 95.0]) * rng.uniform(0.94, 1.06, size=3)

    a = np.linspace(-_ALPHA_MAX, _ALPHA_MAX, grid + 1)
    b = np.linspace(-_BETA_MAX, _BETA_MAX, grid + 1)
    alpha, beta = np.meshgrid(a, b, indexing="xy")
    pts = _ellipsoid_point(alpha, beta, radii).reshape(-1, 3)
    normals = _ellipsoid_normal(pts, radii)
    uu = alpha / np.pi + 0.5
    vv = 0.5 - beta / np.pi
    uv = np.stack([uu.reshape(-1), vv.reshape(-1)], axis=1)

    tris = []
    n = grid + 1
    for j in range(grid):
        for i in range(grid):
            p0, p1, p2, p3 = j * n + i, j * n + i + 1, (j + 1) * n + i, (j + 1) * n + i + 1
            tris.append((p0, p1, p3))
            tris.append((p0, p3, p2))
    triangles = np.array(tris, dtype=np.int32)

    camera = _camera_matrix(yaw, pitch)
    texture = _identity_texture(rng)
    background = np.tile(rng.uniform(0.05, 0.25, size=3), (IMAGE_SIZE, IMAGE_SIZE, 1))

    asset = FaceAsset(
        image=np.zeros((IMAGE_SIZE, IMAGE_SIZE, 3), dtype=np.float32),
        vertices=pts,
        triangles=triangles,
        uv=uv,
        normals=normals,
        sh=sh,
        camera=camera,
        label=label if label is not None else f"id{identity_seed}",
    )
    from .raster import raster_map, sample_texture_numpy

    rm = raster_map(asset)
    image = background.copy()
    rgb = sample_texture_numpy(texture, rm.uv) * rm.gain
    image[rm.rows, rm.cols] = rgb
    asset.image = _quantize(image)
    asset._cache["identity_texture"] = texture
    return asset.validate()


def make_dataset(
    n_identities: int = 10,
    per_identity: int = 32,
    seed: int = 0,
    grid: int = 32,
) -> list[FaceAsset]:
    """Synthetic multi-pose, multi-illumination identity dataset."""
    rng = np.random.default_rng(seed)
    assets = []
    for ident in range(n_identities):
        for _ in range(per_identity):
            yaw = rng.uniform(-20, 20)
            pitch = rng.uniform(-12, 12)
            dc = rng.uniform(0.7, 1.1, size=3)
            band1 = rng.uniform(-0.12, 0.12, size=(3, 3))
            coeffs = np.zeros((9, 3))
            coeffs[0] = dc
            coeffs[1:4] = band1.T
            sh = IlluminationSH(coeffs)
            assets.append(
                make_synthetic_asset(seed * 100003 + ident, (yaw, pitch), sh, grid=grid,
                                     label=f"id{ident}")
            )
    return assets


# ---------------------------------------------------------------------------
# asset directory format


def save_asset(asset: FaceAsset, directory: str | Path) -> None:
    """Write manifest.json, image.png, mesh.txt, sh.txt, camera.txt, regions.txt.

    Mesh lines: `v x y z u v nx ny nz` and `f i j k` with 0-based indices.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    Image.fromarray((asset.image * 255.0).round().astype(np.uint8)).save(directory / "image.png")
    with open(directory / "mesh.txt", "w") as f:
        for p, t, nrm in zip(asset.vertices, asset.uv, asset.normals):
            f.write(f"v {p[0]!r} {p[1]!r} {p[2]!r} {t[0]!r} {t[1]!r} {nrm[0]!r} {nrm[1]!r} {nrm[2]!r}\n")
        for tri in asset.triangles:
            f.write(f"f {tri[0]} {tri[1]} {tri[2]}\n")
    np.savetxt(directory / "sh.txt", asset.sh.to_flat()[None], fmt="%r")
    np.savetxt(directory / "camera.txt", asset.camera.reshape(1, -1), fmt="%r")
    with open(directory / "regions.txt", "w") as f:
        for r in asset.regions.values():
            f.write(f"{r.name}, {r.center_uv[0]!r}, {r.center_uv[1]!r}, {r.orientation!r}\n")
    manifest = {
        "image": "image.png",
        "mesh": "mesh.txt",
        "sh": "sh.txt",
        "camera": "camera.txt",
        "regions": "regions.txt",
        "label": asset.label,
    }
    with open(directory / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)


def load_face_asset(directory: str | Path) -> FaceAsset:
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        raise AssetError(f"missing manifest: {manifest_path}")
    manifest = json.loads(manifest_path.read_text())
    image = np.asarray(Image.open(directory / manifest["image"]), dtype=np.float32) / 255.0
    verts, uvs, nrms, tris = [], [], [], []
    for line in (directory / manifest["mesh"]).read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            vals = [float(x) for x in parts[1:]]
            if len(vals) != 8:
                raise AssetError(f"mesh vertex line needs 8 values, got {len(vals)}")
            verts.append(vals[0:3])
            uvs.append(vals[3:5])
            nrms.append(vals[5:8])
        elif parts[0] == "f":
            tris.append([int(x) for x in parts[1:4]])
    sh_values = np.loadtxt(directory / manifest["sh"]).reshape(-1)
    if sh_values.size != 27:
        raise AssetError(f"sh length {sh_values.size}, expected 27")
    camera = np.loadtxt(directory / manifest["camera"]).reshape(-1)
    if camera.size != 12:
        raise AssetError(f"camera needs 12 values, got {camera.size}")
    regions = {}
    for line in (directory / manifest["regions"]).read_text().splitlines():
        if not line.strip():
            continue
        name, cu, cv, rot = (s.strip() for s in line.split(","))
        regions[name] = RegionAnchor(name, (float(cu), float(cv)), float(rot))
    if set(regions) != set(REGION_NAMES):
        raise AssetError(f"regions file must name all of {REGION_NAMES}")
    asset = FaceAsset(
        image=image,
        vertices=np.array(verts, dtype=np.float64),
        triangles=np.array(tris, dtype=np.int32),
        uv=np.array(uvs, dtype=np.float64),
        normals=np.array(nrms, dtype=np.float64),
        sh=IlluminationSH.from_flat(sh_values),
        camera=camera.reshape(3, 4),
        label=manifest.get("label", ""),
        regions=regions,
    )
    return asset.validate()


def project_region_center(asset: FaceAsset, region: RegionAnchor) -> tuple[float, float]:
    """Pixel coordinates of a region anchor's surface point."""
    uv = np.array(region.center_uv)
    # nearest mesh vertex, so loaded meshes need not be parametric
    d = np.linalg.norm(asset.uv - uv, axis=1)
    vidx = int(np.argmin(d))
    pu, pv, _ = project_vertices(asset.vertices[vidx : vidx + 1], asset.camera)
    return float(pu[0]), float(pv[0])
