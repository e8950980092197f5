"""Session parameters for exact computations over Q_p.

A session fixes the base field Q_p (uniformizer p, residue cardinality
q = p), the matrix size n of gl_n, the lattice depth exponent e (the
integral lattice is L = p^e*gl_n(Z_p)), the quotient level m, and the
working precision N in p-adic digits.

The depth e is chosen so that the exponential power series converges on
L: term k of Exp has valuation at least k*e - (k-1)/(p-1), which grows
whenever e > 1/(p-1).  Hence e >= 1 suffices for p >= 3 and e >= 2 for
p = 2.

All pairings occurring at level m take values in p^-m * Z_p, so every
additive-character value lies in the cyclotomic ring of order p^m; the
session therefore fixes the cyclotomic order exponent K = m.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SessionError


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def default_depth(p: int) -> int:
    """Least lattice depth e making the exponential series converge on L."""
    return 2 if p == 2 else 1


def default_precision(m: int, e: int) -> int:
    """Precision guard: N >= 2m + 2e + 2 keeps every desk-scale identity exact."""
    return 2 * m + 2 * e + 2


@dataclass(frozen=True)
class SessionParams:
    """Immutable description of one computation session.

    Fields
    ------
    p : prime >= 2
    n : matrix size >= 1
    e : lattice depth exponent (L = p^e * gl_n(Z_p))
    m : quotient level >= 1
    N : working precision in p-adic digits
    q : residue cardinality (= p, the field is Q_p throughout)
    """

    p: int
    n: int
    e: int
    m: int
    N: int
    q: int = field(init=False)

    def __post_init__(self) -> None:
        if not _is_prime(self.p):
            raise SessionError(f"p = {self.p} is not prime")
        if self.n < 1:
            raise SessionError(f"matrix size n = {self.n} must be >= 1")
        if self.m < 1:
            raise SessionError(f"quotient level m = {self.m} must be >= 1")
        min_e = default_depth(self.p)
        if self.e < min_e:
            raise SessionError(
                f"depth e = {self.e} too small for p = {self.p}: "
                f"need e >= {min_e} for the exponential series to converge"
            )
        guard = default_precision(self.m, self.e)
        if self.N < guard:
            raise SessionError(
                f"precision N = {self.N} below the guard 2m + 2e + 2 = {guard}"
            )
        object.__setattr__(self, "q", self.p)

    @classmethod
    def create(
        cls,
        p: int,
        n: int,
        m: int,
        e: int | None = None,
        N: int | None = None,
    ) -> "SessionParams":
        """Build a session, defaulting depth and precision from p and m."""
        if e is None:
            e = default_depth(p)
        if N is None:
            N = default_precision(m, e)
        return cls(p=p, n=n, e=e, m=m, N=N)

    @property
    def cyclo_order_exp(self) -> int:
        """K with zeta of order p^K: the deepest character depth at level m."""
        return self.m

    @property
    def pN(self) -> int:
        return self.p**self.N

    def label(self) -> str:
        return f"gl_{self.n}(Q_{self.p}), e={self.e}, m={self.m}, N={self.N}"
