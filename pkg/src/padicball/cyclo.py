"""Exact arithmetic in the cyclotomic ring Q(zeta) with zeta of order p^K.

This is the value ring for all characters and measures: every identity
checked by the library is an exact algebraic identity here, so all
comparisons are exact equality of canonical forms (zero tolerance).

An element is stored as an integer coefficient vector of length p^K
indexing powers of zeta, plus a positive denominator.  Canonical form is
reduced modulo the p^K-th cyclotomic polynomial
Phi(x) = sum_{j<p} x^(j*p^(K-1)) (so all coefficients of index >=
phi(p^K) vanish) with gcd(coefficients, denominator) = 1.

The additive character psi of Q_p is realized here through the
normalization psi(a/p^k) = zeta_{p^k}^a; it is trivial on Z_p and
nontrivial on p^-1 * Z_p, which pins it down up to a unit rescaling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import DenominatorTooDeep
from .scalar import TruncatedScalar
from .session import SessionParams


def reduce_mod_cyclotomic(coeffs: list[int], p: int, K: int) -> tuple[int, ...]:
    """Reduce a length-p^K power vector modulo Phi_{p^K}.

    Uses zeta^(phi+s) = -sum_{j=0}^{p-2} zeta^(s + j*p^(K-1)) for
    0 <= s < p^(K-1); one pass suffices since the removed block has
    exactly the width p^(K-1).
    """
    order = p**K
    block = order // p  # p^(K-1)
    phi = order - block
    if len(coeffs) != order:
        raise ValueError(f"expected {order} coefficients, got {len(coeffs)}")
    out = list(coeffs)
    for t in range(phi, order):
        c = out[t]
        if c:
            s = t - phi
            for j in range(p - 1):
                out[s + j * block] -= c
            out[t] = 0
    return tuple(out)


@dataclass(frozen=True)
class CycloRational:
    """Exact element of Q(zeta_{p^K}) in canonical form."""

    session: SessionParams
    coeffs: tuple[int, ...]
    den: int

    # ---------------------------------------------------------------- builders

    @classmethod
    def make(
        cls, session: SessionParams, coeffs: list[int] | tuple[int, ...], den: int = 1
    ) -> "CycloRational":
        """Canonicalize an arbitrary power vector with denominator."""
        p, K = session.p, session.cyclo_order_exp
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        red = list(reduce_mod_cyclotomic(list(coeffs), p, K))
        if den < 0:
            den = -den
            red = [-c for c in red]
        g = den
        for c in red:
            g = gcd(g, c)
            if g == 1:
                break
        if g > 1:
            den //= g
            red = [c // g for c in red]
        return cls(session, tuple(red), den)

    @classmethod
    def zero(cls, session: SessionParams) -> "CycloRational":
        order = session.p**session.cyclo_order_exp
        return cls(session, (0,) * order, 1)

    @classmethod
    def one(cls, session: SessionParams) -> "CycloRational":
        return cls.from_rational(session, Fraction(1))

    @classmethod
    def from_rational(cls, session: SessionParams, x: Fraction | int) -> "CycloRational":
        x = Fraction(x)
        order = session.p**session.cyclo_order_exp
        coeffs = [0] * order
        coeffs[0] = x.numerator
        return cls.make(session, coeffs, x.denominator)

    @classmethod
    def zeta_power(cls, session: SessionParams, t: int) -> "CycloRational":
        """zeta^t for the session root zeta of order p^K."""
        order = session.p**session.cyclo_order_exp
        coeffs = [0] * order
        coeffs[t % order] = 1
        return cls.make(session, coeffs, 1)

    @classmethod
    def root_of_unity(cls, session: SessionParams, order_exp: int, power: int) -> "CycloRational":
        """zeta_{p^j}^a realized inside the session ring (needs j <= K)."""
        K = session.cyclo_order_exp
        if order_exp > K:
            raise DenominatorTooDeep(
                f"root of unity of order p^{order_exp} exceeds session order p^{K}"
            )
        return cls.zeta_power(session, power * session.p ** (K - order_exp))

    # ------------------------------------------------------------------- state

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    @property
    def is_one(self) -> bool:
        return self.den == 1 and self.coeffs[0] == 1 and not any(self.coeffs[1:])

    # -------------------------------------------------------------- arithmetic

    def _check(self, other: "CycloRational") -> None:
        if self.session != other.session:
            raise ValueError("cyclotomic values from different sessions")

    def __add__(self, other: "CycloRational") -> "CycloRational":
        self._check(other)
        da, db = self.den, other.den
        coeffs = [a * db + b * da for a, b in zip(self.coeffs, other.coeffs)]
        return CycloRational.make(self.session, coeffs, da * db)

    def __neg__(self) -> "CycloRational":
        return CycloRational(self.session, tuple(-c for c in self.coeffs), self.den)

    def __sub__(self, other: "CycloRational") -> "CycloRational":
        return self + (-other)

    def __mul__(self, other: "CycloRational") -> "CycloRational":
        self._check(other)
        order = len(self.coeffs)
        out = [0] * order
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    k = i + j
                    if k >= order:
                        k -= order
                    out[k] += a * b
        return CycloRational.make(self.session, out, self.den * other.den)

    def scale(self, x: Fraction | int) -> "CycloRational":
        x = Fraction(x)
        coeffs = [c * x.numerator for c in self.coeffs]
        return CycloRational.make(self.session, coeffs, self.den * x.denominator)

    def inverse(self) -> "CycloRational":
        """Field inverse via extended gcd with the cyclotomic polynomial."""
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero in Q(zeta)")
        p, K = self.session.p, self.session.cyclo_order_exp
        order = p**K
        block = order // p
        phi_deg = order - block
        phi = [Fraction(0)] * (phi_deg + 1)
        for j in range(p):
            phi[j * block] = Fraction(1)
        a = [Fraction(c, self.den) for c in self.coeffs[:phi_deg]]
        inv = _poly_modinv(a, phi)
        lcm = 1
        for c in inv:
            lcm = lcm * c.denominator // gcd(lcm, c.denominator)
        coeffs = [int(c * lcm) for c in inv] + [0] * (order - phi_deg)
        return CycloRational.make(self.session, coeffs, lcm)

    # ------------------------------------------------------------------ output

    def to_json(self) -> dict:
        return {"coeffs": list(self.coeffs), "den": self.den}

    @classmethod
    def from_json(cls, session: SessionParams, obj: dict) -> "CycloRational":
        return cls.make(session, [int(c) for c in obj["coeffs"]], int(obj["den"]))

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = [
            (f"{c}" if t == 0 else f"{c}*z^{t}")
            for t, c in enumerate(self.coeffs)
            if c
        ]
        s = " + ".join(terms)
        return s if self.den == 1 else f"({s})/{self.den}"


def _poly_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    q = [Fraction(0)] * max(len(a) - db, 1)
    for i in range(len(a) - db - 1, -1, -1):
        c = a[i + db] / lb
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return q, a


def _poly_modinv(a: list[Fraction], mod: list[Fraction]) -> list[Fraction]:
    """Inverse of a modulo the (irreducible) polynomial mod, over Q."""
    while len(a) > 1 and a[-1] == 0:
        a = a[:-1]
    old_r, r = list(mod), list(a)
    old_t: list[Fraction] = [Fraction(0)]
    t: list[Fraction] = [Fraction(1)]
    while any(c != 0 for c in r):
        q, rem = _poly_divmod(old_r, r)
        old_r, r = r, rem
        prod = [Fraction(0)] * (len(q) + len(t) - 1)
        for i, qi in enumerate(q):
            if qi:
                for j, tj in enumerate(t):
                    prod[i + j] += qi * tj
        new_t = [Fraction(0)] * max(len(old_t), len(prod))
        for i, c in enumerate(old_t):
            new_t[i] += c
        for i, c in enumerate(prod):
            new_t[i] -= c
        old_t, t = t, new_t
    # old_r is the gcd, a nonzero constant since mod is irreducible
    if len(old_r) != 1:
        raise ZeroDivisionError("element shares a factor with the modulus")
    c = old_r[0]
    return [ti / c for ti in old_t]


# Spec-level operation aliases -------------------------------------------------


def cyclo_add(a: CycloRational, b: CycloRational) -> CycloRational:
    return a + b


def cyclo_mul(a: CycloRational, b: CycloRational) -> CycloRational:
    return a * b


def cyclo_neg(a: CycloRational) -> CycloRational:
    return -a


def cyclo_scale_rational(a: CycloRational, x: Fraction | int) -> CycloRational:
    return a.scale(x)


def cyclo_eq(a: CycloRational, b: CycloRational) -> bool:
    return a == b


def psi_of(x: TruncatedScalar) -> CycloRational:
    """Additive character of Q_p, trivial on Z_p: psi(a/p^k) = zeta_{p^k}^a.

    Raises DenominatorTooDeep when the argument has valuation below -K.
    """
    session = x.session
    K = session.cyclo_order_exp
    if not x.is_zero and x.valuation < -K:  # type: ignore[operator]
        raise DenominatorTooDeep(
            f"psi argument has valuation {x.valuation} < -{K}"
        )
    k, a = x.residue_mod_integers()
    if k == 0:
        return CycloRational.one(session)
    return CycloRational.root_of_unity(session, k, a)


def psi_exponent(x: TruncatedScalar) -> int:
    """Exponent t with psi(x) = zeta^t for the session root of order p^K."""
    session = x.session
    K = session.cyclo_order_exp
    if not x.is_zero and x.valuation < -K:  # type: ignore[operator]
        raise DenominatorTooDeep(
            f"psi argument has valuation {x.valuation} < -{K}"
        )
    k, a = x.residue_mod_integers()
    return a * session.p ** (K - k) % session.p**K
