"""Error hierarchy. Each class carries a machine-readable category and an exit code."""


class HRungeError(Exception):
    category = "error"
    exit_code = 1

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DomainError(HRungeError, ValueError):
    """Input outside the unit disk or otherwise outside an operation's domain."""

    category = "domain"
    exit_code = 2


class ConfigError(HRungeError):
    """Malformed or inconsistent scenario configuration."""

    category = "parse_error"
    exit_code = 2


class InvariantViolation(HRungeError):
    category = "invariant"
    exit_code = 1


class MarginError(InvariantViolation):
    category = "margin"


class ChainCoarsenessError(InvariantViolation):
    category = "chain_coarseness"


class SplitOverflowError(InvariantViolation):
    category = "split_overflow"


class PerturbationBoundError(InvariantViolation):
    """A perturbed point system would fall below the required separation."""

    category = "perturbation_bound"


class HullError(InvariantViolation):
    category = "hull"


class EmptyRegionError(InvariantViolation):
    category = "empty_region"


class NumericalFault(HRungeError):
    category = "numerical"
    exit_code = 3


class CoarseGridError(NumericalFault):
    category = "coarse_grid"
