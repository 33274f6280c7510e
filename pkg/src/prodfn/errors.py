"""Exception hierarchy.

Every error raised by the library derives from :class:`ProdFnError`.  The four
intermediate classes map one-to-one onto the command-line exit codes.
"""

from __future__ import annotations


class ProdFnError(Exception):
    exit_code = 1


class ConfigError(ProdFnError, ValueError):
    exit_code = 2


class DataError(ProdFnError, ValueError):
    exit_code = 3


class NumericalError(ProdFnError, ArithmeticError):
    exit_code = 4


class ReportIOError(ProdFnError, OSError):
    exit_code = 5


# -- data errors -------------------------------------------------------------


class NonPositiveValue(DataError):
    def __init__(self, year: int | None = None, name: str = ""):
        self.year = year
        where = f" in {name!r}" if name else ""
        at = f" at year {year}" if year is not None else ""
        super().__init__(f"non-positive value{where}{at}")


class SeriesTooShort(DataError):
    pass


class EmptyIntersection(DataError):
    pass


class EmptyDataset(DataError):
    pass


class MissingInvestment(DataError):
    def __init__(self, year: int):
        self.year = year
        super().__init__(f"no investment observation for year {year}")


class DiscontinuousSpan(DataError):
    pass


class TooFewBenchmarks(DataError):
    pass


class SchemaMismatch(DataError):
    pass


class NoTrendTerm(DataError):
    pass


class MissingColumn(DataError):
    pass


class DuplicateYear(DataError):
    def __init__(self, year: int, line: int):
        self.year = year
        self.line = line
        super().__init__(f"year {year} repeated on line {line}")


class ParseError(DataError):
    def __init__(self, message: str, line: int, column: str | None = None):
        self.line = line
        self.column = column
        col = f", column {column!r}" if column else ""
        super().__init__(f"line {line}{col}: {message}")


class NonNumericCell(ParseError):
    pass


# -- numerical errors --------------------------------------------------------


class SingularDesign(NumericalError):
    pass


class RankDeficient(SingularDesign):
    def __init__(self, columns: list[str] | tuple[str, ...] = ()):
        self.columns = tuple(columns)
        names = ", ".join(self.columns) if self.columns else "unknown columns"
        super().__init__(f"design matrix is rank deficient ({names})")


class InsufficientObservations(NumericalError):
    pass


class NonPositiveLongRunVariance(NumericalError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, iterations: int, last_step: float):
        self.iterations = iterations
        self.last_step = last_step
        super().__init__(
            f"no convergence after {iterations} iterations (last step {last_step:.3g})"
        )


class RhoOutOfRange(NumericalError):
    def __init__(self, rho: float, iteration: int):
        self.rho = rho
        self.iteration = iteration
        super().__init__(f"|rho| >= 1 (rho={rho:.6g}) at iteration {iteration}")


class Inconclusive(NumericalError):
    pass


class ZeroVariance(NumericalError):
    pass


class AllZeroResiduals(NumericalError):
    pass


class UnsupportedSampleSize(NumericalError):
    pass


class InvalidParams(ConfigError):
    pass
