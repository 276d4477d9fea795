"""Run a model as a fixed feature extractor and write a FeatPack file.

Forward passes only, eval mode, no gradients. Features are upcast to
float64 before writing. Batches stream through the model but the file is
written in one pass at the end, preserving the sorted sample order.
"""

import os
from dataclasses import dataclass

import numpy as np
import torch
from PIL import Image

from .datasets import load_image_folder, load_text_file
from .errors import ExtractionError
from .format import write_featpack
from .models import LanguageModel, VisionModel, image_transform, softmax_probabilities


@dataclass(frozen=True)
class ExtractionJob:
    model_id: str
    input_path: str
    output_path: str
    layer: str = "penultimate"          # "pooled" selects language-model pooling
    batch_size: int = 32
    emit_theta: bool = False
    weights: str = "pretrained"         # "none" = seeded random init (offline use)

    def __post_init__(self):
        if self.batch_size < 1:
            raise ExtractionError("batch_size must be >= 1")
        if self.layer not in ("penultimate", "pooled"):
            raise ExtractionError(f"unknown layer {self.layer!r}")
        if self.weights not in ("pretrained", "none"):
            raise ExtractionError(f"unknown weights mode {self.weights!r}")
        parent = os.path.dirname(os.path.abspath(self.output_path))
        if not os.path.isdir(parent):
            raise ExtractionError(f"output directory does not exist: {parent}")


def extract(job: ExtractionJob) -> str:
    """Extract features for the dataset at job.input_path; returns the pack path."""
    if os.path.isdir(job.input_path):
        return _extract_images(job)
    return _extract_text(job)


def _batches(items, size):
    for i in range(0, len(items), size):
        yield items[i:i + size]


def _extract_images(job: ExtractionJob) -> str:
    paths, labels, class_names = load_image_folder(job.input_path)
    if job.emit_theta and len(class_names) < 2:
        raise ExtractionError("theta requested but the dataset has a single class")
    if job.layer == "pooled":
        raise ExtractionError("layer 'pooled' applies to language models; "
                              "vision models use 'penultimate'")

    model = VisionModel(job.model_id, job.weights)
    transform = image_transform()

    feature_blocks = []
    theta_blocks = []
    for chunk in _batches(paths, job.batch_size):
        imgs = []
        for p in chunk:
            try:
                with Image.open(p) as im:
                    imgs.append(transform(im.convert("RGB")))
            except OSError as exc:
                raise ExtractionError(f"cannot read image {p}: {exc}") from exc
        feats, logits = model.forward(torch.stack(imgs))
        feature_blocks.append(feats.double().cpu().numpy())
        if job.emit_theta:
            theta_blocks.append(softmax_probabilities(logits))

    F = np.concatenate(feature_blocks, axis=0)
    theta = np.concatenate(theta_blocks, axis=0) if job.emit_theta else None
    write_featpack(job.output_path, F, np.asarray(labels, dtype=np.int64),
                   num_classes=len(class_names), theta=theta)
    return job.output_path


def _extract_text(job: ExtractionJob) -> str:
    texts, labels, class_names = load_text_file(job.input_path)
    if job.emit_theta:
        raise ExtractionError("theta requires a classification head; plain language "
                              "models expose only representations")
    model = LanguageModel(job.model_id)
    feature_blocks = [
        model.forward(chunk).double().cpu().numpy()
        for chunk in _batches(texts, job.batch_size)
    ]
    F = np.concatenate(feature_blocks, axis=0)
    write_featpack(job.output_path, F, np.asarray(labels, dtype=np.int64),
                   num_classes=len(class_names))
    return job.output_path
