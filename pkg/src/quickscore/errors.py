"""Exception types shared across the package."""


class QuickscoreError(Exception):
    """Base class for every error this package raises on purpose."""


class ValidationError(QuickscoreError):
    """A network or evidence set violates a structural invariant.

    Carries the full list of violation messages so callers can report
    every problem at once instead of the first one found.
    """

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("; ".join(self.violations))


class ParseError(QuickscoreError):
    """A knowledge-base, case, or result file is malformed."""


class CapExceeded(QuickscoreError):
    """A requested computation is larger than the configured cap allows."""


class InfeasibleEvidence(QuickscoreError):
    """The observed evidence has probability zero under the model."""


class DuplicateFinding(QuickscoreError):
    """A session was asked to incorporate a finding it already holds."""


class InvalidConfig(QuickscoreError):
    """A generator configuration violates its own constraints."""
