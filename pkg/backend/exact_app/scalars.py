"""
Scalar rings for the exact engines.

Three kinds are supported: arbitrary-precision integers, rationals (sympy's
QQ, gmpy-backed when available) and prime fields. Prime-field elements are
plain Python ints in [0, p) so the hot loops of the group code stay cheap;
every arithmetic operation goes through the ScalarField that owns the value.
"""
from functools import lru_cache
from typing import Any, Iterator, Union

from sympy import QQ, ZZ
from sympy.ntheory import isprime

from .errors import InvalidInput, NonIntegralDividedPower

Rational = Any  # QQ domain element (PythonMPQ or gmpy2.mpq)
Scalar = Union[int, Rational]


def qq(numerator: int, denominator: int = 1) -> Rational:
    return QQ(numerator, denominator)


class ScalarField:
    """Coefficient ring for Lie and enveloping computations."""

    INTEGER = "integer"
    RATIONAL = "rational"
    PRIME = "prime"

    def __init__(self, kind: str, characteristic: int = 0):
        if kind == self.PRIME:
            if characteristic < 2 or not isprime(characteristic):
                raise InvalidInput(
                    "Prime-field modulus must be prime",
                    details={"char": characteristic},
                )
        elif characteristic != 0:
            raise InvalidInput("Only prime fields have positive characteristic",
                               details={"kind": kind, "char": characteristic})
        self.kind = kind
        self.p = characteristic
        self.zero = 0 if kind != self.RATIONAL else QQ(0)
        self.one = 1 if kind != self.RATIONAL else QQ(1)

    # ---------- construction ----------

    @classmethod
    def integers(cls) -> "ScalarField":
        return _cached_field(cls.INTEGER, 0)

    @classmethod
    def rationals(cls) -> "ScalarField":
        return _cached_field(cls.RATIONAL, 0)

    @classmethod
    def prime(cls, p: int) -> "ScalarField":
        return _cached_field(cls.PRIME, int(p))

    @classmethod
    def from_char(cls, char: int) -> "ScalarField":
        """``{"char": 0}`` means the rationals, a prime means that prime field."""
        return cls.rationals() if int(char) == 0 else cls.prime(int(char))

    # ---------- conversions ----------

    def __call__(self, value: int) -> Scalar:
        if self.kind == self.PRIME:
            return int(value) % self.p
        if self.kind == self.RATIONAL:
            return QQ(int(value))
        return int(value)

    def from_rational(self, value: Rational, **context: Any) -> Scalar:
        """Map an exact rational into the ring; raise when it is not integral there."""
        if isinstance(value, int):
            return self(value)
        num, den = int(value.numerator), int(value.denominator)
        if self.kind == self.RATIONAL:
            return QQ(num, den)
        if self.kind == self.INTEGER:
            if den != 1:
                raise NonIntegralDividedPower(
                    "Exact division left the integral lattice",
                    details={"value": f"{num}/{den}", **context},
                )
            return num
        if den % self.p == 0:
            raise NonIntegralDividedPower(
                f"Value is not {self.p}-integral",
                details={"value": f"{num}/{den}", "char": self.p, **context},
            )
        return num * pow(den, -1, self.p) % self.p

    def lift(self, value: Scalar) -> Rational:
        """Canonical rational representative (prime fields lift to [0, p))."""
        if self.kind == self.RATIONAL:
            return value
        return QQ(int(value))

    def to_json(self, value: Scalar) -> Any:
        if self.kind == self.RATIONAL:
            num, den = int(value.numerator), int(value.denominator)
            return num if den == 1 else f"{num}/{den}"
        return int(value)

    # ---------- arithmetic ----------

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        if self.p:
            return (a + b) % self.p
        return a + b

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        if self.p:
            return (a - b) % self.p
        return a - b

    def neg(self, a: Scalar) -> Scalar:
        if self.p:
            return (-a) % self.p
        return -a

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        if self.p:
            return (a * b) % self.p
        return a * b

    def pow(self, a: Scalar, n: int) -> Scalar:
        if self.p:
            return pow(a, n, self.p)
        return a ** n

    def inv(self, a: Scalar) -> Scalar:
        if self.kind == self.INTEGER:
            if a not in (1, -1):
                raise ZeroDivisionError(f"{a} is not a unit in ZZ")
            return a
        if self.p:
            return pow(a, -1, self.p)
        return 1 / a

    def is_zero(self, a: Scalar) -> bool:
        return a == 0

    # ---------- metadata ----------

    @property
    def is_field(self) -> bool:
        return self.kind != self.INTEGER

    @property
    def characteristic(self) -> int:
        return self.p

    def elements(self) -> Iterator[int]:
        if not self.p:
            raise InvalidInput("Only prime fields are finite", details={"kind": self.kind})
        return iter(range(self.p))

    def describe(self) -> dict:
        return {"kind": self.kind, "char": self.p}

    def __repr__(self) -> str:
        if self.p:
            return f"GF({self.p})"
        return "QQ" if self.kind == self.RATIONAL else "ZZ"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ScalarField) and (self.kind, self.p) == (other.kind, other.p)

    def __hash__(self) -> int:
        return hash((self.kind, self.p))


@lru_cache(maxsize=None)
def _cached_field(kind: str, characteristic: int) -> ScalarField:
    return ScalarField(kind, characteristic)


__all__ = ["ScalarField", "Scalar", "Rational", "qq", "QQ", "ZZ"]
