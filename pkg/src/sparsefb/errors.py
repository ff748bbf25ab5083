"""Exception hierarchy shared by all modules."""


class SparseFBError(Exception):
    """Base class for every error raised by sparsefb."""


class DimensionError(SparseFBError, ValueError):
    """Matrix shapes are inconsistent."""


class StabilityError(SparseFBError):
    """A closed-loop matrix that must be Hurwitz is not."""


class DefinitenessError(SparseFBError, ValueError):
    """A matrix that must be (semi)definite is not."""


class SynthesisError(SparseFBError):
    """The Riccati solve failed or did not produce a stabilizing gain."""


class StructureError(SparseFBError, ValueError):
    """A gain does not respect the prescribed sparsity structure."""


class NumericalError(SparseFBError):
    """An underlying numerical routine failed to converge."""


class PlantFileError(SparseFBError, ValueError):
    """A plant file could not be parsed.

    Carries the 1-based line and column of the offending token when known.
    """

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
