"""Exception hierarchy shared by all uwbsync modules."""


class UwbSyncError(Exception):
    """Base class for every error raised by this package."""


class InvalidSignal(UwbSyncError, ValueError):
    pass


class BandwidthExceedsGrid(UwbSyncError, ValueError):
    pass


class TimeOutOfRange(UwbSyncError, ValueError):
    pass


class GridMismatch(UwbSyncError, ValueError):
    pass


class OffsetOutOfRange(UwbSyncError, ValueError):
    pass


class EmptyWindow(UwbSyncError, ValueError):
    pass


class DegenerateParams(UwbSyncError, ValueError):
    pass


class ConfigError(UwbSyncError, ValueError):
    pass


class SizeGuardExceeded(UwbSyncError, ValueError):
    pass


class ZeroEnergyInput(UwbSyncError, ValueError):
    pass


class UnsupportedVersion(UwbSyncError):
    pass


class ParseError(UwbSyncError):
    """Malformed CIR file. ``line`` and ``column`` are 1-based."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
