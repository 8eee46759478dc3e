"""
Error types for pentalab

Every failure raised by the library is a PentalabError, which is a ValueError
so existing `except ValueError` handlers keep working. Each class carries the
process exit code the CLI uses when the error escapes a command:

    2  invalid input or configuration
    3  genericity failure (a denominator vanished) or resource limit
"""

from typing import Optional


class PentalabError(ValueError):
    """Base class for all pentalab errors"""
    exit_code = 2

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index  # 1-based position of the offending entry, if any


# --- invalid input (exit 2) -------------------------------------------------

class InvalidState(PentalabError):
    """A state, polygon or lattice violates one of its invariants"""


class BadSpan(PentalabError):
    """k and n do not satisfy 2 <= k <= n"""


class WrongSpan(PentalabError):
    """Operation is only defined for one particular span k"""


class UnsupportedSpan(PentalabError):
    """Operation has no construction for this span"""


class OutsideStableRange(PentalabError):
    """The xy bracket is only known for n >= 2k - 1"""

    def __init__(self, k: int, n: int):
        super().__init__(f"outside stable range n ≥ 2k−1 = {2 * k - 1} (got n = {n})")
        self.k = k
        self.n = n


class NotOnCasimirLevel(PentalabError):
    """prod p_i q_i != 1, so the x-sequence cannot be n-periodic"""


class BackendMismatch(PentalabError):
    """Operation needs a different scalar backend"""


class UnknownSuite(PentalabError):
    """Verification suite name not recognised"""


class StateFileError(PentalabError):
    """State document missing or unreadable"""


# --- genericity / singular orbits (exit 3) ------------------------------------

class GenericityError(PentalabError):
    """A generic-position assumption failed"""
    exit_code = 3


class DivisionByZero(GenericityError):
    """Field division by zero"""


class PoleEncountered(GenericityError):
    """A rational function was evaluated at one of its poles"""


class SigmaVanishes(GenericityError):
    """sigma_j = x_j + y_j is zero"""

    def __init__(self, j: int):
        super().__init__(f"sigma_{j} = x_{j} + y_{j} vanishes", index=j)


class PDenominatorVanishes(GenericityError):
    """1 + p_i is zero"""

    def __init__(self, i: int):
        super().__init__(f"1 + p_{i} vanishes", index=i)


class CornerDenominatorVanishes(GenericityError):
    """1 - X_j Y_j is zero"""

    def __init__(self, j: int):
        super().__init__(f"1 - X_{j} Y_{j} vanishes", index=j)


class DegenerateSeed(GenericityError):
    """Seed vectors (or a square system) are linearly dependent"""


class GenericityLost(GenericityError):
    """A polygon window failed its rank condition"""

    def __init__(self, i: int, detail: str = ""):
        message = f"genericity lost at window {i}"
        if detail:
            message += f": {detail}"
        super().__init__(message, index=i)


class NonPeriodicCoefficients(GenericityError):
    """Lifts cannot be normalised to n-periodic recurrence coefficients"""


class DegenerateIntersection(GenericityError):
    """Two diagonals do not meet in a single point"""

    def __init__(self, i: int):
        super().__init__(f"diagonals at window {i} do not meet in a point", index=i)


class DegenerateHyperplane(GenericityError):
    """Consecutive vertices do not span a hyperplane"""

    def __init__(self, i: int):
        super().__init__(f"vertices starting at {i} do not span a hyperplane", index=i)


class DegenerateQuadruple(GenericityError):
    """Cross-ratio undefined for this quadruple"""


class DegenerateConfiguration(GenericityError):
    """Points of an S-pair collide where a formula divides by their difference"""

    def __init__(self, message: str, i: Optional[int] = None):
        super().__init__(message, index=i)


class InconsistentSeed(GenericityError):
    """Lattice seed does not satisfy the sublattice equation"""


class NoRationalSection(GenericityError):
    """No 3-dimensional monodromy-invariant quotient is defined over the rationals"""


class SizeLimitExceeded(GenericityError):
    """A rational value outgrew PENTALAB_MAX_BITS"""


# --- internal consistency (exit 1) --------------------------------------------

class NonHomogeneous(PentalabError):
    """An integral failed its homogeneity check"""
    exit_code = 1

    def __init__(self, i: int, j: int):
        super().__init__(f"integral I_{i},{j} is not homogeneous")
        self.i = i
        self.j = j


def exit_code_for(error: Exception) -> int:
    """Exit code the CLI uses for an escaped exception"""
    if isinstance(error, PentalabError):
        return error.exit_code
    if isinstance(error, ArithmeticError):
        return 3
    return 2
