"""Package-level exception hierarchy mapped to CLI exit codes."""

from __future__ import annotations


class CorrsurfError(Exception):
    """Base class; carries the process exit code for the CLI."""

    exit_code = 1


class ConfigError(CorrsurfError):
    """Bad user input: unknown family, malformed config, invalid range."""

    exit_code = 1


class InfeasibleDecodeError(CorrsurfError):
    """Decoding or estimation cannot be carried out on the given inputs."""

    exit_code = 2


class InvariantViolation(CorrsurfError):
    """An internal consistency check failed; results are untrustworthy."""

    exit_code = 3
