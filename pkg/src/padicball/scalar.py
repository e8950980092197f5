"""Truncated p-adic scalars: elements of Q_p known to N significant digits.

A nonzero scalar is stored in canonical form (valuation v, unit u) with
u in [1, p^N) coprime to p, and denotes the exact rational p^v * u.
Arithmetic is exact on these canonical representatives followed by
canonical reduction of the unit mod p^N; a result whose valuation
reaches N is reported as the zero-to-working-precision element (v =
+infinity).  Operations that would need digits beyond N raise
PrecisionExhausted instead of silently truncating.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import PrecisionExhausted
from .session import SessionParams


def vp(a: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if a == 0:
        raise ValueError("vp(0) is infinite")
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


@dataclass(frozen=True)
class TruncatedScalar:
    """A p-adic number known modulo p^N, stored as (valuation, unit residue).

    ``valuation is None`` encodes +infinity: exact zero, or zero to
    working precision.
    """

    session: SessionParams
    valuation: int | None
    unit: int

    def __post_init__(self) -> None:
        p, N = self.session.p, self.session.N
        if self.valuation is None:
            if self.unit != 0:
                raise ValueError("zero scalar must have unit 0")
            return
        if not (1 <= self.unit < p**N) or self.unit % p == 0:
            raise ValueError(f"unit {self.unit} not canonical mod {p}^{N}")

    # ---------------------------------------------------------------- builders

    @classmethod
    def zero(cls, session: SessionParams) -> "TruncatedScalar":
        return cls(session, None, 0)

    @classmethod
    def from_unit(cls, session: SessionParams, v: int, u: int) -> "TruncatedScalar":
        """Canonicalize p^v * u (u any integer, possibly divisible by p)."""
        p, N = session.p, session.N
        u %= p**N
        if u == 0:
            return cls.zero(session)
        s = vp(u, p)
        v += s
        if v >= N:
            return cls.zero(session)
        return cls(session, v, (u // p**s) % p**N)

    @classmethod
    def from_int(cls, session: SessionParams, a: int) -> "TruncatedScalar":
        return cls.from_unit(session, 0, a)

    @classmethod
    def from_rational(cls, session: SessionParams, num: int, den: int) -> "TruncatedScalar":
        """Exact image of num/den in Q_p, reduced to working precision."""
        if den == 0:
            raise ZeroDivisionError("denominator is zero")
        if num == 0:
            return cls.zero(session)
        p, N = session.p, session.N
        v = vp(num, p) - vp(den, p)
        nu = num // p ** vp(num, p)
        du = den // p ** vp(den, p)
        if v >= N:
            return cls.zero(session)
        u = nu * pow(du, -1, p**N) % p**N
        return cls(session, v, u)

    @classmethod
    def from_fraction(cls, session: SessionParams, x: Fraction) -> "TruncatedScalar":
        return cls.from_rational(session, x.numerator, x.denominator)

    # ------------------------------------------------------------------- state

    @property
    def is_zero(self) -> bool:
        return self.valuation is None

    def as_fraction(self) -> Fraction:
        """The exact rational denoted by the canonical representative."""
        if self.is_zero:
            return Fraction(0)
        v = self.valuation
        assert v is not None
        if v >= 0:
            return Fraction(self.unit * self.session.p**v)
        return Fraction(self.unit, self.session.p ** (-v))

    def residue_mod_integers(self) -> tuple[int, int]:
        """Pair (k, a) with the scalar congruent to a / p^k modulo Z_p.

        Returns (0, 0) for elements of Z_p (including zero).
        """
        if self.is_zero or self.valuation >= 0:  # type: ignore[operator]
            return 0, 0
        k = -self.valuation  # type: ignore[operator]
        return k, self.unit % self.session.p**k

    # -------------------------------------------------------------- arithmetic

    def _check(self, other: "TruncatedScalar") -> None:
        if self.session != other.session:
            raise ValueError("scalars from different sessions")

    def __add__(self, other: "TruncatedScalar") -> "TruncatedScalar":
        self._check(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        a, b = self.valuation, other.valuation
        assert a is not None and b is not None
        v = min(a, b)
        s = self.unit * self.session.p ** (a - v) + other.unit * self.session.p ** (b - v)
        return TruncatedScalar.from_unit(self.session, v, s)

    def __neg__(self) -> "TruncatedScalar":
        if self.is_zero:
            return self
        pN = self.session.pN
        return TruncatedScalar(self.session, self.valuation, pN - self.unit)

    def __sub__(self, other: "TruncatedScalar") -> "TruncatedScalar":
        return self + (-other)

    def __mul__(self, other: "TruncatedScalar") -> "TruncatedScalar":
        self._check(other)
        if self.is_zero or other.is_zero:
            return TruncatedScalar.zero(self.session)
        v = self.valuation + other.valuation  # type: ignore[operator]
        if v >= self.session.N:
            return TruncatedScalar.zero(self.session)
        return TruncatedScalar(
            self.session, v, self.unit * other.unit % self.session.pN
        )

    def inverse(self) -> "TruncatedScalar":
        if self.is_zero:
            raise PrecisionExhausted("cannot invert zero at working precision")
        v = -self.valuation  # type: ignore[operator]
        if v >= self.session.N:
            return TruncatedScalar.zero(self.session)
        return TruncatedScalar(self.session, v, pow(self.unit, -1, self.session.pN))

    # ------------------------------------------------------------------ output

    def to_json(self) -> dict:
        if self.is_zero:
            return {"v": "inf", "u": 0}
        return {"v": self.valuation, "u": self.unit}

    @classmethod
    def from_json(cls, session: SessionParams, obj: dict) -> "TruncatedScalar":
        if obj["v"] == "inf":
            return cls.zero(session)
        return cls(session, int(obj["v"]), int(obj["u"]))

    def __str__(self) -> str:
        if self.is_zero:
            return "O(p^inf)"
        return f"{self.session.p}^{self.valuation} * {self.unit}"
