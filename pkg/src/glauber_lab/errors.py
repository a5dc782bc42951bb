"""Exception taxonomy shared by all modules.

The CLI maps these onto distinct exit codes (config=2, size=3, numeric=4),
so library code should raise the most specific class that applies.
"""


class GlauberError(Exception):
    """Base class for all library errors."""


class ConfigError(GlauberError):
    """Bad experiment configuration; carries file location when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SizeError(GlauberError):
    """An enumeration, matrix, or graph exceeds the configured limits."""


class NumericError(GlauberError):
    """An eigensolve or fit failed to reach the required residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class FrozenSiteError(GlauberError):
    """A hard-constraint site has no legal value under the current boundary."""


class NonErgodicError(GlauberError):
    """Single-site moves do not connect the legal configurations."""


class EmptyLegalSetError(GlauberError):
    """No configuration has positive Gibbs weight."""
