"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: InvalidInputError (and its
subclass FeatPackError) exit with 2, NumericFailureError with 3.
"""


class InvalidInputError(ValueError):
    """Caller handed us data that violates a documented precondition."""


class NumericFailureError(RuntimeError):
    """A numerical routine failed (e.g. eigensolver did not converge)."""


class FeatPackError(InvalidInputError):
    """Malformed feature-pack file. Carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset
