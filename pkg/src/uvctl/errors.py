"""Exception types shared across the package."""


class GeometryError(ValueError):
    """Invalid or degenerate geometric input (hull, mesh, chart point)."""


class CompatibilityError(ValueError):
    """Neumann data violates the zero-flux solvability constraint."""


class AssemblyError(RuntimeError):
    """Assembled coupling matrices fail a structural sanity check."""


class NumericsError(RuntimeError):
    """A numerical procedure failed to reach its tolerance or diverged."""


class ScenarioError(ValueError):
    """Scenario file is malformed or violates a schema constraint."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
