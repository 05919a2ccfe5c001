"""Exception and warning types raised across fluxlab."""


class FluxlabError(Exception):
    """Base class for all fluxlab errors."""


class ParameterError(FluxlabError, ValueError):
    """An argument lies outside its admissible domain."""


class DegenerateWellError(FluxlabError):
    """A potential minimum has non-positive curvature."""


class ValidationError(FluxlabError):
    """A potential failed the double-well admissibility checks."""

    def __init__(self, report):
        self.report = report
        failed = [c.name for c in report.checks if not c.ok]
        super().__init__(f"potential {report.name!r} failed checks: {', '.join(failed)}")


class QuadratureError(FluxlabError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        self.achieved = achieved
        super().__init__(message if achieved is None else f"{message} (achieved {achieved:.3g})")


class PrecisionError(FluxlabError):
    """A requested quantity lies below the attainable floating-point accuracy."""


class RefinementError(FluxlabError):
    """Log-domain tail integration met a node of the wavefunction."""


class DegeneracyError(FluxlabError):
    """A ground state expected to be simple came out degenerate."""


class ConfigError(FluxlabError, ValueError):
    """A sweep configuration is malformed."""


class ResolutionWarning(UserWarning):
    """A discretization is probably too coarse for the requested accuracy."""


class RouteDisagreementWarning(UserWarning):
    """Independent gap routes disagree beyond their tolerance."""
