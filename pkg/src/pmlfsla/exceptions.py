from typing import Optional


class PmlFslaError(Exception):
    """
    Base class for every error raised by the library. `exit_code` is the process
    exit status the command-line surface maps the error to
    """

    exit_code = 1


class ConfigError(PmlFslaError):
    exit_code = 1


class DataError(PmlFslaError):
    exit_code = 2

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[int] = None):
        location = ""
        if row is not None and column is not None:
            location = f" (row {row}, column {column})"
        elif row is not None:
            location = f" (row {row})"
        super().__init__(f"{message}{location}")
        self.row = row
        self.column = column


class DatasetNotFound(DataError):
    def __init__(self, path):
        super().__init__(f"File not found: {path}")
        self.path = path


class ShapeError(DataError):
    pass


class NumericFailure(PmlFslaError):
    exit_code = 3

    def __init__(self, iteration: int, matrix: str):
        super().__init__(f"Non-finite values in {matrix} at iteration {iteration}")
        self.iteration = iteration
        self.matrix = matrix
