"""Training failures."""


class TrainingError(RuntimeError):
    """Training cannot start or diverged."""


class ConvergenceError(RuntimeError):
    """The SMO solver hit its iteration cap before meeting the KKT tolerance."""
