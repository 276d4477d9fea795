"""featpack-extractor: run a pre-trained model as a fixed feature extractor
over a labeled dataset and write the results as a FeatPack file for the
scoring engine."""

from .errors import ExtractionError
from .extract import ExtractionJob, extract
from .format import write_featpack

__version__ = "0.1.0"

__all__ = ["ExtractionError", "ExtractionJob", "extract", "write_featpack"]
