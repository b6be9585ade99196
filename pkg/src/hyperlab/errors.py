"""Exception hierarchy shared by every module."""


class HyperlabError(Exception):
    pass


class DomainError(HyperlabError, ValueError):
    """An operation was asked for a value outside its mathematical domain."""


class ConfigurationError(HyperlabError, ValueError):
    """Bad parameters: mode mismatch, caps exceeded, malformed schedules."""


class PreconditionError(HyperlabError, ValueError):
    """Inputs violate a documented precondition (e.g. support outside L_m)."""


class ConfigParseError(ConfigurationError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
