"""Nine-coefficient spherical-harmonics irradiance (27 parameters over RGB).

Irradiance at a surface normal n is the environment radiance convolved
with the clamped cosine kernel; for a band-2 SH environment this reduces
to E(n) = sum_l A_l sum_m L_lm Y_lm(n) with A = (pi, 2*pi/3, pi/4).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# real SH basis constants (band 0..2, graphics convention)
_C0 = 0.2820947917738781  # 1/(2 sqrt(pi))
_C1 = 0.4886025119029199  # sqrt(3/(4 pi))
_C2A = 1.0925484305920792  # sqrt(15/(4 pi))
_C2B = 0.31539156525252005  # sqrt(5/(16 pi))
_C2C = 0.5462742152960396  # sqrt(15/(16 pi))

_A_BAND = np.array([np.pi, 2.0 * np.pi / 3.0, np.pi / 4.0])
_A_PER_COEFF = _A_BAND[[0, 1, 1, 1, 2, 2, 2, 2, 2]]


@dataclass(frozen=True)
class IlluminationSH:
    """coeffs: (9, 3) band-major SH coefficients per color channel."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64)
        if c.shape != (9, 3):
            raise ValueError(f"sh coefficients must be (9, 3), got {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_flat(cls, values) -> "IlluminationSH":
        values = np.asarray(values, dtype=np.float64).reshape(-1)
        if values.size != 27:
            raise ValueError(f"sh length {values.size}, expected 27")
        return cls(values.reshape(3, 9).T)  # channel-major file layout

    def to_flat(self) -> np.ndarray:
        return self.coeffs.T.reshape(-1)


def sh_basis(normals: np.ndarray) -> np.ndarray:
    """Evaluate the 9 real SH basis functions at unit vectors (..., 3)."""
    n = np.asarray(normals, dtype=np.float64)
    x, y, z = n[..., 0], n[..., 1], n[..., 2]
    return np.stack(
        [
            np.full_like(x, _C0),
            _C1 * y,
            _C1 * z,
            _C1 * x,
            _C2A * x * y,
            _C2A * y * z,
            _C2B * (3.0 * z * z - 1.0),
            _C2A * x * z,
            _C2C * (x * x - y * y),
        ],
        axis=-1,
    )


def sh_irradiance(sh: IlluminationSH, normal: np.ndarray) -> np.ndarray:
    """Per-channel irradiance gain at unit normal(s); clamped below at 0.

    Accepts a single 3-vector or an (..., 3) array; returns (..., 3) gains.
    """
    n = np.asarray(normal, dtype=np.float64)
    norms = np.linalg.norm(n, axis=-1)
    if np.any(norms < 1e-12):
        raise ValueError("zero normal")
    if not np.allclose(norms, 1.0, atol=1e-6):
        raise ValueError("normals must be unit length")
    basis = sh_basis(n) * _A_PER_COEFF
    return np.maximum(basis @ sh.coeffs, 0.0)
