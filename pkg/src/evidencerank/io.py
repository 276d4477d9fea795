"""FeatPack binary container, CSV ingestion, and one-hot encoding.

FeatPack layout (all integers little-endian, version frozen in the magic):

    offset  size  field
    0       8     magic b"FEATPAK1"
    8       4     flags u32: bit 0 = targets are class labels,
                             bit 1 = theta block present
    12      8     n  u64   samples
    20      8     D  u64   feature dimension
    28      8     K  u64   target columns (class count when bit 0 is set)
    36      8     Z  u64   source label-space size (0 when no theta)
    44      -     F       n*D float64, row-major
    .       -     targets n*K float64, or n int64 class labels (bit 0)
    .       -     theta   n*Z float64 (bit 1)

float64 everywhere: extractors upcast, which keeps byte-level round-trips
and cross-language score comparisons exact.
"""

import csv
import struct

import numpy as np

from .errors import FeatPackError, InvalidInputError

MAGIC = b"FEATPAK1"
FLAG_CLASS_LABELS = 0x1
FLAG_THETA = 0x2
_HEADER = struct.Struct("<8sIQQQQ")
HEADER_SIZE = _HEADER.size  # 44
THETA_ROW_SUM_TOL = 1e-6

_OFF_FLAGS = 8
_OFF_N = 12
_OFF_Z = 36


def write_featpack(path, F, targets, theta=None, num_classes=None) -> None:
    """Serialize features, targets and an optional theta block.

    targets may be an n x K float matrix or an integer vector of class
    labels; labels are stored as int64 with the class count in the K field
    (num_classes overrides the max(labels)+1 default). Round-trips through
    read_featpack bitwise.
    """
    F = np.ascontiguousarray(np.asarray(F, dtype=np.float64))
    if F.ndim != 2 or F.shape[0] < 1 or F.shape[1] < 1:
        raise InvalidInputError(f"F must be an n x D matrix, got shape {F.shape}")
    n, D = F.shape

    targets = np.asarray(targets)
    flags = 0
    if targets.ndim == 1 and np.issubdtype(targets.dtype, np.integer):
        labels = np.ascontiguousarray(targets, dtype=np.int64)
        if labels.shape[0] != n:
            raise InvalidInputError(f"labels length {labels.shape[0]} does not match n={n}")
        K = int(labels.max()) + 1 if num_classes is None else int(num_classes)
        if labels.min() < 0 or labels.max() >= K:
            raise InvalidInputError(f"labels must lie in [0, {K})")
        flags |= FLAG_CLASS_LABELS
        target_bytes = labels.tobytes()
    else:
        Y = np.ascontiguousarray(targets, dtype=np.float64)
        if Y.ndim == 1:
            Y = Y.reshape(-1, 1)
        if Y.ndim != 2 or Y.shape[0] != n:
            raise InvalidInputError(f"targets shape {Y.shape} does not match n={n}")
        K = Y.shape[1]
        target_bytes = Y.tobytes()

    Z = 0
    theta_bytes = b""
    if theta is not None:
        theta = np.ascontiguousarray(np.asarray(theta, dtype=np.float64))
        if theta.ndim != 2 or theta.shape[0] != n or theta.shape[1] < 1:
            raise InvalidInputError(f"theta shape {theta.shape} does not match n={n}")
        if np.any(np.abs(theta.sum(axis=1) - 1.0) > THETA_ROW_SUM_TOL):
            raise InvalidInputError("theta rows must sum to 1 within 1e-6")
        Z = theta.shape[1]
        flags |= FLAG_THETA
        theta_bytes = theta.tobytes()

    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, flags, n, D, K, Z))
        fh.write(F.tobytes())
        fh.write(target_bytes)
        fh.write(theta_bytes)


def inspect_featpack(path) -> dict:
    """Read just the header: sizes and flags, without loading the payload.

    Consumers need the declared K to one-hot encode labels correctly even
    when some class happens to be absent from the sample.
    """
    with open(path, "rb") as fh:
        head = fh.read(HEADER_SIZE)
    if len(head) < HEADER_SIZE:
        raise FeatPackError(f"truncated header: expected {HEADER_SIZE} bytes, got {len(head)}", offset=len(head))
    magic, flags, n, D, K, Z = _HEADER.unpack(head)
    if magic != MAGIC:
        raise FeatPackError(f"bad magic {magic!r}, expected {MAGIC!r}", offset=0)
    if flags & ~(FLAG_CLASS_LABELS | FLAG_THETA):
        raise FeatPackError(f"unknown flag bits 0x{flags:x}", offset=_OFF_FLAGS)
    return {
        "n": n, "D": D, "K": K, "Z": Z,
        "class_labels": bool(flags & FLAG_CLASS_LABELS),
        "has_theta": bool(flags & FLAG_THETA),
    }


def read_featpack(path):
    """Parse and validate a FeatPack file.

    Returns (F, targets_or_labels, theta_or_None); labels come back as an
    int64 vector when the class-label flag is set, targets as an n x K
    float64 matrix otherwise. Every invariant of the format is checked and
    violations raise FeatPackError naming the byte offset.
    """
    with open(path, "rb") as fh:
        buf = fh.read()

    if len(buf) < HEADER_SIZE:
        raise FeatPackError(f"truncated header: expected {HEADER_SIZE} bytes, got {len(buf)}", offset=len(buf))
    magic, flags, n, D, K, Z = _HEADER.unpack_from(buf, 0)
    if magic != MAGIC:
        raise FeatPackError(f"bad magic {magic!r}, expected {MAGIC!r}", offset=0)
    if flags & ~(FLAG_CLASS_LABELS | FLAG_THETA):
        raise FeatPackError(f"unknown flag bits 0x{flags:x}", offset=_OFF_FLAGS)
    if n < 1 or D < 1 or K < 1:
        raise FeatPackError(f"invalid dimensions n={n} D={D} K={K}", offset=_OFF_N)
    has_theta = bool(flags & FLAG_THETA)
    if has_theta != (Z > 0):
        raise FeatPackError(f"theta flag is {has_theta} but Z={Z}", offset=_OFF_Z)

    labels_mode = bool(flags & FLAG_CLASS_LABELS)
    f_size = n * D * 8
    t_size = n * 8 if labels_mode else n * K * 8
    z_size = n * Z * 8
    expected = HEADER_SIZE + f_size + t_size + z_size
    if len(buf) != expected:
        raise FeatPackError(
            f"payload size mismatch: expected {expected} bytes, got {len(buf)}",
            offset=min(len(buf), expected),
        )

    off = HEADER_SIZE
    F = np.frombuffer(buf, dtype="<f8", count=n * D, offset=off).reshape(n, D).copy()
    t_off = off + f_size
    if labels_mode:
        targets = np.frombuffer(buf, dtype="<i8", count=n, offset=t_off).copy()
        if targets.min() < 0 or targets.max() >= K:
            raise FeatPackError(f"class label out of range [0, {K})", offset=t_off)
    else:
        targets = np.frombuffer(buf, dtype="<f8", count=n * K, offset=t_off).reshape(n, K).copy()

    theta = None
    if has_theta:
        z_off = t_off + t_size
        theta = np.frombuffer(buf, dtype="<f8", count=n * Z, offset=z_off).reshape(n, Z).copy()
        if np.any(np.abs(theta.sum(axis=1) - 1.0) > THETA_ROW_SUM_TOL):
            raise FeatPackError("theta rows must sum to 1 within 1e-6", offset=z_off)
    return F, targets, theta


def one_hot(labels, C: int) -> np.ndarray:
    """Encode integer labels into an n x C 0/1 float matrix."""
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise InvalidInputError(f"labels must be a vector, got shape {labels.shape}")
    if not np.issubdtype(labels.dtype, np.integer):
        li = labels.astype(np.int64)
        if not np.array_equal(li, labels):
            raise InvalidInputError("labels must be integers")
        labels = li
    if labels.size and (labels.min() < 0 or labels.max() >= C):
        raise InvalidInputError(f"labels must lie in [0, {C})")
    out = np.zeros((labels.shape[0], C), dtype=np.float64)
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def read_csv_features(path, has_header: bool = True, label_column=None):
    """Load a rectangular numeric CSV into (F, y).

    label_column selects the target column by header name or 0-based index;
    the remaining columns become F in file order. Ragged rows and
    non-numeric cells raise InvalidInputError naming the row and column.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise InvalidInputError(f"{path}: empty CSV")

    header = None
    if has_header:
        header = rows[0]
        rows = rows[1:]
        if not rows:
            raise InvalidInputError(f"{path}: no data rows after header")

    ncol = len(rows[0])
    if label_column is None:
        raise InvalidInputError("label_column is required")
    if isinstance(label_column, str):
        if header is None:
            raise InvalidInputError("named label_column requires has_header=True")
        if label_column not in header:
            raise InvalidInputError(f"label column {label_column!r} not found in header {header}")
        li = header.index(label_column)
    else:
        li = int(label_column)
        if not (0 <= li < ncol):
            raise InvalidInputError(f"label column index {li} out of range for {ncol} columns")

    data = np.empty((len(rows), ncol), dtype=np.float64)
    for r, row in enumerate(rows):
        if len(row) != ncol:
            raise InvalidInputError(f"{path}: row {r + 1} has {len(row)} fields, expected {ncol}")
        for c, cell in enumerate(row):
            try:
                data[r, c] = float(cell)
            except ValueError:
                colname = header[c] if header else str(c)
                raise InvalidInputError(
                    f"{path}: row {r + 1}, column {colname!r}: cannot parse {cell!r} as a number"
                ) from None

    y = data[:, li]
    F = np.delete(data, li, axis=1)
    return F, y
