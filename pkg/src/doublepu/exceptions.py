"""Exception types shared across the package."""


class DataError(ValueError):
    """Invalid dataset, file content, or dimensionality."""


class PriorError(ValueError):
    """Class priors outside their admissible range."""


class LossDomainError(ValueError):
    """A loss was evaluated outside its domain, or an unknown loss was named."""


class NotTrainableError(ValueError):
    """The selected loss has no usable gradient for training."""


class TrainingDivergedError(RuntimeError):
    """Optimization produced non-finite parameters or a non-finite risk."""
