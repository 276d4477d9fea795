"""Writer for the FeatPack wire format (version byte '1' in the magic).

Layout, all little-endian:

    0   8  magic b"FEATPAK1"
    8   4  flags u32: bit 0 = class labels, bit 1 = theta present
    12  8  n u64
    20  8  D u64
    28  8  K u64 (class count here; labels are stored, not one-hot rows)
    36  8  Z u64 (0 without theta)
    44  .  F float64 row-major, then n int64 labels, then optional theta
           (n x Z float64)

This is the only coupling to the scoring engine: packs written here must
pass its reader's validation byte for byte.
"""

import struct

import numpy as np

from .errors import ExtractionError

MAGIC = b"FEATPAK1"
FLAG_CLASS_LABELS = 0x1
FLAG_THETA = 0x2
_HEADER = struct.Struct("<8sIQQQQ")

THETA_ROW_SUM_TOL = 1e-6


def write_featpack(path, features, labels, num_classes, theta=None):
    """Write features (n x D float64) and integer labels, plus optional theta."""
    F = np.ascontiguousarray(np.asarray(features, dtype=np.float64))
    if F.ndim != 2 or F.shape[0] < 1 or F.shape[1] < 1:
        raise ExtractionError(f"features must be an n x D matrix, got shape {F.shape}")
    n, D = F.shape
    y = np.ascontiguousarray(np.asarray(labels, dtype=np.int64))
    if y.shape != (n,):
        raise ExtractionError(f"labels shape {y.shape} does not match n={n}")
    K = int(num_classes)
    if y.min() < 0 or y.max() >= K:
        raise ExtractionError(f"labels must lie in [0, {K})")

    flags = FLAG_CLASS_LABELS
    Z = 0
    theta_bytes = b""
    if theta is not None:
        T = np.ascontiguousarray(np.asarray(theta, dtype=np.float64))
        if T.ndim != 2 or T.shape[0] != n or T.shape[1] < 1:
            raise ExtractionError(f"theta shape {T.shape} does not match n={n}")
        if np.any(np.abs(T.sum(axis=1) - 1.0) > THETA_ROW_SUM_TOL):
            raise ExtractionError("theta rows must sum to 1 within 1e-6")
        flags |= FLAG_THETA
        Z = T.shape[1]
        theta_bytes = T.tobytes()

    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, flags, n, D, K, Z))
        fh.write(F.tobytes())
        fh.write(y.tobytes())
        fh.write(theta_bytes)
