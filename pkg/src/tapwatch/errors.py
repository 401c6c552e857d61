"""Exception hierarchy shared by the library and the CLI."""


class TapwatchError(Exception):
    """Base class for all package errors."""


class ConfigError(TapwatchError, ValueError):
    """Invalid link configuration or malformed configuration file."""


class DataFormatError(TapwatchError, ValueError):
    """A dataset or report file does not follow the canonical CSV format."""


class IndivisibleClusterError(TapwatchError, ValueError):
    """A cluster cannot be bisected because all of its rows are identical."""
