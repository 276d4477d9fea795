"""Dataset discovery: image folders (one subdirectory per class) and
tab-separated text files. Sample order is the sorted path / line order so
repeated runs see the data identically."""

import os

from .errors import ExtractionError

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp", ".gif", ".webp")


def load_image_folder(root):
    """Return (paths, labels, class_names) from a class-per-subdirectory tree."""
    if not os.path.isdir(root):
        raise ExtractionError(f"not a directory: {root}")
    class_names = sorted(
        d for d in os.listdir(root) if os.path.isdir(os.path.join(root, d))
    )
    if not class_names:
        raise ExtractionError(f"no class subdirectories under {root}")
    paths, labels = [], []
    for ci, cname in enumerate(class_names):
        cdir = os.path.join(root, cname)
        files = sorted(
            f for f in os.listdir(cdir)
            if f.lower().endswith(IMAGE_EXTENSIONS)
        )
        for f in files:
            paths.append(os.path.join(cdir, f))
            labels.append(ci)
    if not paths:
        raise ExtractionError(f"no images found under {root}")
    return paths, labels, class_names


def load_text_file(path):
    """Return (texts, labels, class_names) from text<TAB>label lines."""
    if not os.path.isfile(path):
        raise ExtractionError(f"not a file: {path}")
    texts, raw_labels = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise ExtractionError(f"{path}:{lineno}: expected text<TAB>label")
            text, label = line.rsplit("\t", 1)
            texts.append(text)
            raw_labels.append(label.strip())
    if not texts:
        raise ExtractionError(f"{path}: no samples")
    class_names = sorted(set(raw_labels))
    index = {c: i for i, c in enumerate(class_names)}
    return texts, [index[l] for l in raw_labels], class_names
