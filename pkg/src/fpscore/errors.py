"""Exception and warning types shared across the package."""


class FpscoreError(Exception):
    """Base class for errors raised by this package."""


class InvalidInput(FpscoreError):
    """Input data violates a precondition (non-finite values, empty mass, ...)."""


class GridTooSmall(InvalidInput):
    """Lattice smaller than 3x3; the five-point stencil has no interior."""


class FormatError(FpscoreError):
    """Unsupported or malformed file format."""


class ShapeError(FpscoreError):
    """Operands have mismatched dimensions."""


class AssemblyError(FpscoreError):
    """A non-finite coefficient appeared while building the linear system."""


class SingularSystem(FpscoreError):
    """Banded elimination hit a zero pivot."""

    def __init__(self, pivot_index: int, pivot_value: float):
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value
        super().__init__(
            f"zero pivot at row {pivot_index} (value {pivot_value:.3e})"
        )


class DivergedTrajectory(FpscoreError):
    """Transport integration produced non-finite pixel values."""

    def __init__(self, step: int):
        self.step = step
        super().__init__(f"non-finite state at timestep {step}")


class NumericalError(FpscoreError):
    """Non-finite value inside network evaluation or training."""


class NotConvergedWarning(UserWarning):
    """Fixed-point sweep hit the iteration cap; result is still usable."""

    def __init__(self, final_error: float, iterations: int):
        self.final_error = final_error
        self.iterations = iterations
        super().__init__(
            f"stopped after {iterations} iterations with error {final_error:.3e}"
        )
