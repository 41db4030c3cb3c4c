class FairLatticeError(Exception):
    """ base error of the audit engine, carries the process exit code """
    exit_code = 1


class ConfigError(FairLatticeError):
    """ missing or invalid configuration """
    exit_code = 3


class DataError(FairLatticeError):
    """ input data that cannot be audited """
    exit_code = 4


class CapacityError(FairLatticeError):
    """ lattice or oracle work above the configured guard """
    exit_code = 5


class LevelBoundsError(ConfigError):
    """ level or attribute count out of range """
    pass


class ModeError(ConfigError):
    """ confusion statistic requested without predictions """
    pass


class InvalidSplitError(FairLatticeError, ValueError):
    """ split requested at a position that does not hold a star """
    pass


class MalformedRowError(DataError):
    def __init__(self, row: int, message: str):
        self.row = row
        super().__init__(f"row {row}: {message}")


class MappingError(DataError):
    def __init__(self, row: int, column: str, value):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"row {row}: cannot map value {value!r} of column {column!r}")


class EmptyLevelError(DataError):
    def __init__(self, level: int):
        self.level = level
        super().__init__(f"every subgroup at level {level} has an undefined rate")


class DegenerateVarianceError(DataError):
    """ fewer than two defined rates """
    pass


class BenchmarkError(DataError):
    """ ISP benchmark variance is not positive """
    pass


class UnderPopulatedVertexError(DataError):
    def __init__(self, vertex: str, count: int, required: int):
        self.vertex = vertex
        self.count = count
        self.required = required
        super().__init__(f"vertex {vertex} holds {count} rows, {required} required")
