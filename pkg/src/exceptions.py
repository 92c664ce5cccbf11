"""
Exception hierarchy for the congruence engine.

Every error raised on bad mathematical input derives from CongruenceError, so the
CLI can map the whole family to exit code 2 while BudgetExceeded maps to 3.
"""


class CongruenceError(ValueError):
    """Base class for invalid inputs to the congruence engine"""


# modarith
class InvalidModulus(CongruenceError):
    """p is not a prime below 2^63 or the exponent is not positive"""


class ZeroInverse(CongruenceError):
    """Inverse of zero requested"""


class DenominatorDivisible(CongruenceError):
    """Rational with denominator divisible by p"""


class EvenModulus(CongruenceError):
    """Jacobi symbol with an even modulus"""


class EvenPrime(CongruenceError):
    """Operation needs an odd prime"""


class InvalidRational(CongruenceError):
    """Text that does not parse as a rational number"""


# linrec
class DRange(CongruenceError):
    """Offset d outside -h < d <= h*p^a"""


class SingularDiscriminant(CongruenceError):
    """Discriminant vanishes mod p"""


class RepeatedRoot(CongruenceError):
    """Two roots coincide in Sylvester's formula"""


class ZeroRoot(CongruenceError):
    """Zero root passed to Sylvester's formula"""


# lucas
class SingularDelta(CongruenceError):
    """A^2 - 4B vanishes mod p"""


class IdentityViolation(CongruenceError):
    """An exact integer identity failed to hold"""


# cubicres
class DivisionByZero(CongruenceError):
    """Division by the zero Eisenstein integer"""


class NotCoprimeToThree(CongruenceError):
    """Modulus norm divisible by 3"""


class UndefinedClass(CongruenceError):
    """p divides c^2 + 3 so the cubic class is undefined"""


class DegenerateC(CongruenceError):
    """p divides c(c^2 + 3)"""


class NoSquareRoot(CongruenceError):
    """Discriminant is a quadratic non-residue"""


class SingularD(CongruenceError):
    """Cubic discriminant vanishes mod p"""


class PreconditionViolated(CongruenceError):
    """A stated hypothesis does not hold for the given inputs"""


# polyfield
class DegreeTooSmall(CongruenceError):
    """Discriminant requested for a polynomial of degree below 2"""


class ZeroPolynomial(CongruenceError):
    """Operation undefined on the zero polynomial"""


# theorems
class UnknownTheorem(CongruenceError):
    """Theorem id outside the supported enumeration"""


class MissingParam(CongruenceError):
    """A predictor needs a parameter that was not supplied"""


class NoRepresentation(CongruenceError):
    """p is not of the form x^2 + 3y^2"""


# harness
class ConfigFileError(CongruenceError):
    """Malformed line in a sweep configuration file"""


# oracle
class BudgetExceeded(CongruenceError):
    """Enumeration larger than the configured term budget"""
