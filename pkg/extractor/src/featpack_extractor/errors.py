class ExtractionError(ValueError):
    """Bad job parameters, unresolvable model, or unusable dataset."""
