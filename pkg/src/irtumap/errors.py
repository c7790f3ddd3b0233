"""Exception hierarchy. Each class carries the CLI exit status it maps to."""


class UMapError(Exception):
    exit_code = 1


class ValidationError(UMapError, ValueError):
    """Input outside the domain of an operation."""


class PropertyRangeError(ValidationError):
    """Film temperature outside the air-property table."""


class DegenerateDenominatorError(ValidationError):
    """Zero temperature difference in a U-value ratio."""


class ConfigurationError(UMapError):
    """Incompatible combination of settings, inputs or flags."""


class SceneGenerationError(UMapError):
    """Synthetic wall spec that cannot produce a plausible scene."""


class EmptyMapError(UMapError):
    exit_code = 3


class RasterParseError(UMapError):
    """Malformed grid or key-value file; carries the 1-based line and column."""

    exit_code = 2

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class HeaderError(RasterParseError):
    pass


class RowLengthError(RasterParseError):
    pass


class TokenError(RasterParseError):
    pass


class NonPhysicalTemperatureError(RasterParseError):
    pass
