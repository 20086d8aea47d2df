"""Exception hierarchy shared by every module of the package."""


class HomspecError(Exception):
    """Base class for all errors raised by this package."""


class MalformedWord(HomspecError, ValueError):
    """A cylinder word contains characters other than 0 and 1."""


class NotAPartition(HomspecError, ValueError):
    """Parts overlap, are empty or fail to cover the stated clopen."""


class SystemMismatch(HomspecError, TypeError):
    """Elements or handles from different coefficient systems were combined."""


class NotAGroup(HomspecError, TypeError):
    """Negation was requested in a system without inverses."""


class NotOrdered(HomspecError, TypeError):
    """An order-based operation was requested in an unordered system."""


class EmptyInterval(HomspecError, ValueError):
    """No element lies strictly between the given bounds."""


class NotDivisible(HomspecError, ArithmeticError):
    """The equation n*y = x has no solution."""


class NotUnique(HomspecError, ArithmeticError):
    """The equation n*y = x has several solutions."""


class NoWitnessUpToBound(HomspecError, LookupError):
    """A bounded witness search was exhausted without success."""


class PremiseViolated(HomspecError, ValueError):
    """An axiom instance does not satisfy the axiom's hypotheses."""


class NotNullSequence(HomspecError, ValueError):
    """The tail factor of a direct product lacks the zero triple."""


class BadRestriction(HomspecError, ValueError):
    """The restriction data does not add up to the base total."""


class ZeroInLambdaPrime(HomspecError, ValueError):
    """The zero element occurs among first coordinates of a binary spectrum."""


class TooLarge(HomspecError, ValueError):
    """The input exceeds the size an exhaustive routine accepts."""


class BadIndex(HomspecError, IndexError):
    """A coordinate index is out of range."""


class NotInDomain(HomspecError, ValueError):
    """A clopen is not a join of atoms of the measure's domain."""


class PreconditionViolated(HomspecError, ValueError):
    """A construction was called with data violating its hypotheses."""


class NoWitness(HomspecError, LookupError):
    """A witness required by a construction does not exist."""


class NotASpectrum(HomspecError, ValueError):
    """The handle is not a spectrum: a required witness is missing."""


class NonUnique(HomspecError, ValueError):
    """Several common values are realizable where one was expected."""


class NoPartition(HomspecError, LookupError):
    """No equi-measured partition could be realized."""


class DomainMismatch(HomspecError, ValueError):
    """Measures that should share atoms do not."""


class NoRepresentation(HomspecError, ValueError):
    """One measure cannot be written as a function of another."""


class DuplicateVectors(HomspecError, ValueError):
    """The input set contains repeated vectors."""


class NotInvertible(HomspecError, ArithmeticError):
    """The total value has no multiplicative inverse."""


class IncompatibleInput(HomspecError, ValueError):
    """An input matrix or polycycle is not compatible."""


class NotCyclic(HomspecError, ValueError):
    """A matrix lacks a unique non-empty entry in some row or column."""


class FiberJointFailed(HomspecError, LookupError):
    """A joint target could not be found for some fiber of an amalgamation."""


class UnknownSystem(HomspecError, ValueError):
    """The coefficient system is outside the built-in catalogue."""
