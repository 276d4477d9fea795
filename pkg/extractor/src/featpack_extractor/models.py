"""Model resolution and feature taps.

Vision models come from the torchvision registry. The penultimate
representation is the input of the network's final Linear layer (the tensor
the classification head consumes), captured with a forward hook, so one
code path covers resnet/densenet/mobilenet/vit-style families. Language
models come from the HuggingFace hub via transformers (lazy import); their
feature is the attention-masked mean of the last hidden state.
"""

import numpy as np
import torch

from .errors import ExtractionError

WEIGHT_INIT_SEED = 0  # fixed init for --weights none keeps runs bit-identical


class VisionModel:
    def __init__(self, model_id: str, weights: str):
        from torchvision.models import get_model

        torch.manual_seed(WEIGHT_INIT_SEED)
        try:
            self.net = get_model(model_id, weights="DEFAULT" if weights == "pretrained" else None)
        except ValueError as exc:
            raise ExtractionError(f"unknown model id {model_id!r}: {exc}") from exc
        self.net.eval()

        linears = [m for m in self.net.modules() if isinstance(m, torch.nn.Linear)]
        if not linears:
            raise ExtractionError(
                f"{model_id!r} has no Linear classification head to tap features from"
            )
        self._grab = {}
        linears[-1].register_forward_hook(self._hook)

    def _hook(self, module, inputs, output):
        self._grab["features"] = inputs[0].detach()

    @torch.no_grad()
    def forward(self, batch):
        """Return (features, logits) for a preprocessed image batch."""
        logits = self.net(batch)
        return self._grab.pop("features"), logits


def image_transform():
    from torchvision import transforms

    return transforms.Compose([
        transforms.Resize(256),
        transforms.CenterCrop(224),
        transforms.ToTensor(),
        transforms.Normalize(mean=[0.485, 0.456, 0.406], std=[0.229, 0.224, 0.225]),
    ])


class LanguageModel:
    def __init__(self, model_id: str):
        try:
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:
            raise ExtractionError(
                "language extraction needs the 'transformers' extra installed"
            ) from exc
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(model_id)
            self.net = AutoModel.from_pretrained(model_id)
        except Exception as exc:
            raise ExtractionError(f"cannot load language model {model_id!r}: {exc}") from exc
        self.net.eval()

    @torch.no_grad()
    def forward(self, texts):
        """Mean-pooled last hidden state per input text."""
        enc = self.tokenizer(texts, padding=True, truncation=True, return_tensors="pt")
        hidden = self.net(**enc).last_hidden_state
        mask = enc["attention_mask"].unsqueeze(-1).to(hidden.dtype)
        pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1)
        return pooled


def softmax_probabilities(logits) -> np.ndarray:
    return torch.softmax(logits, dim=1).double().cpu().numpy()
