"""Exception types shared across the package."""


class CursorHmmError(Exception):
    """Base class for all domain errors raised by this package."""


class AlphabetMismatchError(CursorHmmError):
    """A sequence refers to symbols outside a model's alphabet, or two
    models that must share an alphabet do not."""


class InvalidModelError(CursorHmmError):
    """A model failed validation; carries the list of violations."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid model: " + "; ".join(self.violations))


class DegeneratePosteriorError(CursorHmmError):
    """Posteriors requested for a sequence that is impossible under the model."""


class TrainingDegeneracyError(CursorHmmError):
    """A training sequence has zero probability under the current model and
    no smoothing floor is in effect."""


class NoDecisionError(CursorHmmError):
    """Every model in the registry scored the sequence at -inf."""


class ModelFormatError(CursorHmmError):
    """A serialized file is malformed, fails validation, or has an
    unsupported format version."""


class ParameterError(CursorHmmError):
    """An operation parameter (e.g. the resampling interval) is out of range."""
