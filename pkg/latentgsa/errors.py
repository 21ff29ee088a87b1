"""
Exception hierarchy shared by the estimators, the simulators and the CLI.
"""


class GSAError(Exception):
    """Base class for every error raised by latentgsa."""


class DomainError(GSAError, ValueError):
    """A parameter lies outside the domain of the operation."""


class PartitionError(DomainError):
    """Factor groups are empty, overlapping or do not cover all factors."""


class DegenerateOutputError(GSAError):
    """The model output has zero variance, indices are undefined."""


class IntegrationError(GSAError):
    """The ODE integrator could not produce a trajectory."""


class StepSizeUnderflowError(IntegrationError):
    pass


class NonFiniteDerivativeError(IntegrationError):
    pass


class ModelStructureError(GSAError):
    """The organ table does not describe the expected compartment set."""


class ConfigError(GSAError):
    """The run configuration is invalid."""
