"""Software rasterizer producing a fixed per-asset sampling map.

Geometry never receives gradients, so each asset is rasterized once into
a RasterMap: covered pixel coordinates, interpolated UVs and the SH
irradiance gain at the interpolated normal.  Rendering a texture through
the map is then a plain differentiable bilinear lookup.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assets import FaceAsset, project_vertices
from .sh import sh_irradiance


@dataclass
class RasterMap:
    rows: np.ndarray  # (P,) covered pixel rows
    cols: np.ndarray  # (P,) covered pixel columns
    uv: np.ndarray  # (P, 2) interpolated texture coordinates
    gain: np.ndarray  # (P, 3) per-channel irradiance at the pixel normal
    height: int
    width: int


def rasterize(asset: FaceAsset, size: int | None = None) -> RasterMap:
    """Z-buffered scanline rasterization with screen-space back-face culling."""
    h = w = size if size is not None else asset.image.shape[0]
    scale = h / asset.image.shape[0]
    pu, pv, depth = project_vertices(asset.vertices, asset.camera)
    pu, pv = pu * scale, pv * scale

    zbuf = np.full((h, w), np.inf)
    tri_of = np.full((h, w), -1, dtype=np.int32)
    bary = np.zeros((h, w, 3))

    tris = asset.triangles
    ax, ay = pu[tris[:, 0]], pv[tris[:, 0]]
    bx, by = pu[tris[:, 1]], pv[tris[:, 1]]
    cx, cy = pu[tris[:, 2]], pv[tris[:, 2]]
    area = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    front = area < -1e-12  # consistent winding: front faces in image coords

    for t in np.nonzero(front)[0]:
        i0, i1, i2 = tris[t]
        xs = pu[[i0, i1, i2]]
        ys = pv[[i0, i1, i2]]
        x_lo = max(int(np.ceil(xs.min() - 0.5)), 0)
        x_hi = min(int(np.floor(xs.max() + 0.5)), w - 1)
        y_lo = max(int(np.ceil(ys.min() - 0.5)), 0)
        y_hi = min(int(np.floor(ys.max() + 0.5)), h - 1)
        if x_lo > x_hi or y_lo > y_hi:
            continue
        gx, gy = np.meshgrid(np.arange(x_lo, x_hi + 1), np.arange(y_lo, y_hi + 1))
        w0 = -((xs[1] - xs[0]) * (gy - ys[0]) - (ys[1] - ys[0]) * (gx - xs[0]))
        w1 = -((xs[2] - xs[1]) * (gy - ys[1]) - (ys[2] - ys[1]) * (gx - xs[1]))
        w2 = -((xs[0] - xs[2]) * (gy - ys[2]) - (ys[0] - ys[2]) * (gx - xs[2]))
        inside = (w0 >= 0) & (w1 >= 0) & (w2 >= 0)
        if not inside.any():
            continue
        total = w0 + w1 + w2
        l1 = np.where(inside, w2 / np.where(total == 0, 1, total), 0)
        l2 = np.where(inside, w0 / np.where(total == 0, 1, total), 0)
        l0 = 1.0 - l1 - l2
        z = l0 * depth[i0] + l1 * depth[i1] + l2 * depth[i2]
        ys_idx, xs_idx = np.nonzero(inside)
        rr, cc = gy[ys_idx, xs_idx], gx[ys_idx, xs_idx]
        zz = z[ys_idx, xs_idx]
        closer = zz < zbuf[rr, cc]
        rr, cc, zz = rr[closer], cc[closer], zz[closer]
        zbuf[rr, cc] = zz
        tri_of[rr, cc] = t
        bary[rr, cc, 0] = l0[ys_idx, xs_idx][closer]
        bary[rr, cc, 1] = l1[ys_idx, xs_idx][closer]
        bary[rr, cc, 2] = l2[ys_idx, xs_idx][closer]

    rows, cols = np.nonzero(tri_of >= 0)
    t_idx = tri_of[rows, cols]
    lam = bary[rows, cols]  # (P, 3)
    vids = tris[t_idx]  # (P, 3)
    uv = np.einsum("pk,pkd->pd", lam, asset.uv[vids])
    nrm = np.einsum("pk,pkd->pd", lam, asset.normals[vids])
    nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
    gain = sh_irradiance(asset.sh, nrm)
    return RasterMap(rows=rows, cols=cols, uv=uv, gain=gain, height=h, width=w)


def raster_map(asset: FaceAsset) -> RasterMap:
    """Cached rasterization at the asset's native image size."""
    rm = asset._cache.get("raster_map")
    if rm is None:
        rm = rasterize(asset)
        asset._cache["raster_map"] = rm
    return rm


def sample_texture_numpy(texture: np.ndarray, uv: np.ndarray) -> np.ndarray:
    """Bilinear lookup of (H, W, C) texture at (P, 2) uv in [0, 1]."""
    h, w = texture.shape[:2]
    x = uv[:, 0] * (w - 1)
    y = uv[:, 1] * (h - 1)
    x0 = np.clip(np.floor(x).astype(int), 0, w - 2)
    y0 = np.clip(np.floor(y).astype(int), 0, h - 2)
    fx = (x - x0)[:, None]
    fy = (y - y0)[:, None]
    return (
        texture[y0, x0] * (1 - fx) * (1 - fy)
        + texture[y0, x0 + 1] * fx * (1 - fy)
        + texture[y0 + 1, x0] * (1 - fx) * fy
        + texture[y0 + 1, x0 + 1] * fx * fy
    )
