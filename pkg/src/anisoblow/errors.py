"""Exception taxonomy for the laboratory.

Every failure mode that a caller may want to branch on gets its own class;
they all derive from LabError so a pipeline can catch everything numerical
in one clause while letting genuine bugs (TypeError etc.) propagate.
"""


class LabError(Exception):
    """Base class for all anticipated numerical/validation failures."""


class InvalidDimensionError(LabError):
    """Dimension argument outside the admissible range (n < 2)."""


class SubcriticalError(LabError):
    """(d, p) below the Joseph-Lundgren threshold: the discriminant is <= 0."""


class ModeTooLowError(LabError):
    """Mode index ell does not satisfy ell > alpha/2."""


class UnsupportedParityError(LabError):
    """Odd Gaussian-Hermite mode requested; only even modes are defined here."""


class SingularEvaluationError(LabError):
    """Evaluation of an r**(-gamma)-type profile requested at r = 0."""


class SignChangeError(LabError):
    """Soliton integration crossed zero before reaching r_max."""


class StiffnessError(LabError):
    """Adaptive ODE integration underflowed its step size."""


class WindowError(LabError):
    """Tail-fit window too narrow or residual non-monotone."""


class IntegrabilityError(LabError):
    """Inner integral of an explicit Green's-function inverse diverges."""


class AccuracyError(LabError):
    """A fitted quantity deviates from its closed form beyond tolerance."""


class GridSpecError(LabError):
    """Eigensolver grid specification produced a non-positive weight."""


class ResolutionError(LabError):
    """Richardson eigenvalue error estimate exceeds the requested accuracy."""


class BranchContaminationError(LabError):
    """Inward exterior integration polluted by the Gaussian-growing branch."""


class NoRootError(LabError):
    """Matching function has no sign change on the eigenvalue bracket."""


class DomainTooSmallError(LabError):
    """Gaussian-weighted quadrature domain truncates non-negligible mass."""


class ProfileDegenerateError(LabError):
    """1 + a*P(z) dropped below 1/2: anisotropic profile not defined."""


class IdentityViolationError(LabError):
    """Algebraic-identity residual far above the discretization estimate."""


class SchemeBlowupError(LabError):
    """NaN/overflow in the time stepper (numerical, not physical, blow-up)."""


class DecompositionError(LabError):
    """Newton iteration for the geometric decomposition did not converge."""


class InsufficientWindowError(LabError):
    """Trajectory left the trapped diagnostics before enough output points."""


class PerturbationError(LabError):
    """Initial-data perturbation amplitudes outside the admissible box."""


class ConfigError(LabError):
    """Missing or malformed key in a run configuration file."""
