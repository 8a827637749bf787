"""Exception hierarchy shared across the package.

Every failure mode that callers are expected to branch on gets its own
class; anything that merely indicates a bug stays a bare ValueError.
"""


class SimulationError(Exception):
    """Base class for all package-specific errors."""


class InvalidDimensionError(SimulationError):
    """Fock-space dimension is not an integer >= 2."""


class DimensionMismatchError(SimulationError):
    """Operands live in Fock spaces of different dimension."""


class TruncationError(SimulationError):
    """Requested state does not fit in the truncated Fock space."""

    def __init__(self, alpha_abs: float, dim: int):
        self.alpha_abs = alpha_abs
        self.dim = dim
        super().__init__(
            f"|alpha| = {alpha_abs:.6g} needs more than dim = {dim} Fock "
            f"levels (require |alpha|^2 <= dim / 4)"
        )


class DegenerateCatError(SimulationError):
    """Cat state undefined: the requested superposition has zero norm."""


class RegimeError(SimulationError):
    """Analytic steady amplitude undefined for these loss rates."""


class ModelMismatchError(SimulationError):
    """Closed-form expression does not apply to this model variant."""


class UndefinedAmplitudeError(SimulationError):
    """Steady amplitude formula degenerates (no restoring nonlinearity)."""


class SteadyStateAmbiguityError(SimulationError):
    """Steady state is not unique (parity-degenerate manifold)."""


class IntegrationDivergedError(SimulationError):
    """Evolved state violated trace or positivity bounds."""


class StiffnessError(SimulationError):
    """Adaptive step size underflowed; the problem is too stiff."""


class NonHermitianOperatorError(SimulationError):
    """Operator expected to be Hermitian is not."""


class NegativeEigenvalueError(SimulationError):
    """Density matrix has an eigenvalue below the tolerated floor."""


class NumericalError(SimulationError):
    """A dense linear-algebra kernel failed to converge."""


class GridTooCoarseError(SimulationError):
    """Phase-space grid spacing would alias the truncated state."""


class ConfigError(SimulationError):
    """Run configuration file is malformed or inconsistent."""
