"""Exception hierarchy shared by all mcdwin modules.

``ConfigError`` marks bad user input (CLI exit code 2), ``DomainError`` and
its subclasses mark well-formed inputs for which the requested quantity does
not exist (exit code 3).
"""


class McdwinError(Exception):
    """Base class for all mcdwin errors."""


class ConfigError(McdwinError):
    """Invalid configuration or command usage."""


class DomainError(McdwinError):
    """A quantity is undefined for the supplied (otherwise valid) inputs."""


class SymbolTooShort(DomainError):
    """Closed-form interval denominator is non-positive; symbol period too short."""


class DegenerateWindow(DomainError):
    """Search or closed form produced an empty/inverted detection window."""


class NoFiniteQhat(DomainError):
    """mSINAR cannot reach 1 at this window, so no finite regime threshold exists."""


class GFactorPole(DomainError):
    """Molecule count at or below the noise-inflation pole 2*alpha1**2."""


class InfiniteSir(DomainError):
    """All interference fractions are zero; SIR is unbounded."""


class InfiniteSinar(DomainError):
    """SINAR denominator is zero; value is unbounded."""


class EnumerationTooLarge(DomainError):
    """ISI length too large for exact 2**L enumeration; use Monte Carlo instead."""
