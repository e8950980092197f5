"""Truncated exponential and logarithm between L and K_0 inside GL_n.

On L = p^e gl_n(Z_p) the series Exp(X) = sum X^k / k! converges because
term k has valuation at least k*e - v_p(k!) >= k*e - (k-1)/(p-1), which
tends to infinity for the session depths (e >= 1 when p >= 3, e >= 2
when p = 2).  Summation is truncated at the least T beyond which every
term vanishes modulo the target precision, and is carried out in exact
rational arithmetic on integer representatives, so the reported digits
are exact.  Log(g) = sum (-1)^(k-1) (g-1)^k / k is handled the same way.

K_a := exp(L_a); as a set K_a = Id + p^(a+e) gl_n(Z_p), since Exp and
Log are mutually inverse between L_a and that set.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from . import intmat
from .errors import PrecisionExhausted
from .intmat import Matrix
from .lie import LieElement
from .scalar import vp
from .session import SessionParams


@dataclass(frozen=True)
class GroupElement:
    """Element of K_0 = exp(L): integer matrix mod p^N congruent to Id mod p^e."""

    session: SessionParams
    mat: Matrix

    def __post_init__(self) -> None:
        s = self.session
        mat = intmat.mat_mod(self.mat, s.pN)
        object.__setattr__(self, "mat", mat)
        diff = intmat.mat_sub(mat, intmat.identity(s.n), s.pN)
        if intmat.mat_min_val(diff, s.p, s.N) < min(s.e, s.N):
            raise ValueError("matrix is not congruent to Id mod p^e")

    @classmethod
    def identity(cls, session: SessionParams) -> "GroupElement":
        return cls(session, intmat.identity(session.n))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if self.session != other.session:
            raise ValueError("group elements from different sessions")
        return GroupElement(
            self.session, intmat.mat_mul(self.mat, other.mat, self.session.pN)
        )

    def inverse(self) -> "GroupElement":
        s = self.session
        return GroupElement(s, intmat.mat_inv_mod(self.mat, s.p, s.N))

    def level_in_k(self) -> int:
        """Largest a (capped by precision) with the element in K_a."""
        s = self.session
        diff = intmat.mat_sub(self.mat, intmat.identity(s.n), s.pN)
        return max(intmat.mat_min_val(diff, s.p, s.N) - s.e, 0)

    def to_json(self) -> dict:
        return {"mat": [list(r) for r in self.mat]}

    @classmethod
    def from_json(cls, session: SessionParams, obj: dict) -> "GroupElement":
        return cls(session, intmat.freeze(obj["mat"]))


# ------------------------------------------------------------------ truncation


def exp_truncation_order(p: int, e: int, target: int) -> int:
    """Least T with k*e - v_p(k!) >= target for every k > T."""
    margin = Fraction(e) - Fraction(1, p - 1)
    if margin <= 0:
        raise PrecisionExhausted("exponential series does not converge at this depth")
    k_max = int(Fraction(target) / margin) + 2
    t = 0
    vfact = 0
    for k in range(1, k_max + 1):
        vfact += vp(k, p)
        if k * e - vfact < target:
            t = k
    return t


def log_truncation_order(p: int, e: int, target: int) -> int:
    """Least T with k*e - v_p(k) >= target for every k > T."""
    k_max = 2 * target // e + p + 4
    t = 0
    for k in range(1, k_max + 1):
        if k * e - vp(k, p) < target:
            t = k
    return t


def _frac_mod(x: Fraction, p: int, modulus: int) -> int:
    if x.denominator % p == 0:
        raise PrecisionExhausted("series sum is not p-integral")
    return x.numerator * pow(x.denominator, -1, modulus) % modulus


def _exp_series(mat: Matrix, n: int, p: int, e: int, target: int) -> Matrix:
    """Exact Exp of an integral matrix divisible by p^e, reduced mod p^target."""
    t_ord = exp_truncation_order(p, e, target)
    acc = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    power: Matrix = intmat.identity(n)
    fact = 1
    for k in range(1, t_ord + 1):
        power = intmat.mat_mul(power, mat)
        fact *= k
        for i in range(n):
            for j in range(n):
                acc[i][j] += Fraction(power[i][j], fact)
    modulus = p**target
    return tuple(
        tuple(_frac_mod(acc[i][j], p, modulus) for j in range(n)) for i in range(n)
    )


def _log_series(mat: Matrix, n: int, p: int, e: int, target: int) -> Matrix:
    """Exact Log of Id + u with u divisible by p^e, reduced mod p^target."""
    t_ord = log_truncation_order(p, e, target)
    u = intmat.mat_sub(mat, intmat.identity(n))
    acc = [[Fraction(0) for _ in range(n)] for _ in range(n)]
    power: Matrix = intmat.identity(n)
    for k in range(1, t_ord + 1):
        power = intmat.mat_mul(power, u)
        sign = 1 if k % 2 == 1 else -1
        for i in range(n):
            for j in range(n):
                acc[i][j] += Fraction(sign * power[i][j], k)
    modulus = p**target
    return tuple(
        tuple(_frac_mod(acc[i][j], p, modulus) for j in range(n)) for i in range(n)
    )


# ------------------------------------------------------------------ operations


def exp_trunc(x: LieElement) -> GroupElement:
    """exp(x) for x in L, exact mod p^N; maps L_a into K_a."""
    s = x.session
    return GroupElement(s, _exp_series(x.mat, s.n, s.p, s.e, s.N))


def log_trunc(g: GroupElement) -> LieElement:
    """log(g) for g in K_0, exact mod p^N; inverse of exp_trunc."""
    s = g.session
    mat = _log_series(g.mat, s.n, s.p, s.e, s.N)
    lvl = max(intmat.mat_min_val(mat, s.p, s.N) - s.e, 0)
    return LieElement(s, mat, lvl)


def bch_defect(x: LieElement, y: LieElement) -> LieElement:
    """log(exp(x) exp(y)) - x - y.

    For x in L_a, y in L_b the defect lies in L_(a+b); commuting inputs
    give exactly zero.
    """
    g = exp_trunc(x) * exp_trunc(y)
    z = log_trunc(g)
    s = x.session
    mat = intmat.mat_sub(intmat.mat_sub(z.mat, x.mat, s.pN), y.mat, s.pN)
    lvl = max(intmat.mat_min_val(mat, s.p, s.N) - s.e, 0)
    return LieElement(s, mat, lvl)


# --------------------------------------------------- finite-quotient exp table


@lru_cache(maxsize=None)
def expbar_table(session: SessionParams, m: int) -> dict[tuple[int, ...], tuple[int, ...]]:
    """The reduced bijection L/L_m -> K_0/K_m.

    Keys are normalized Lie coordinates (entries of x / p^e mod p^m, row
    major); values are flattened group matrices mod p^(m+e).  exp(x) mod
    K_m depends only on x mod L_m, so one exact series evaluation per
    class suffices.
    """
    p, n, e = session.p, session.n, session.e
    table: dict[tuple[int, ...], tuple[int, ...]] = {}
    pm = p**m
    target = m + e
    for coords in product(range(pm), repeat=n * n):
        mat = tuple(
            tuple(coords[i * n + j] * p**e for j in range(n)) for i in range(n)
        )
        img = _exp_series(mat, n, p, e, target)
        table[coords] = tuple(x for row in img for x in row)
    return table


@lru_cache(maxsize=None)
def logbar_table(session: SessionParams, m: int) -> dict[tuple[int, ...], tuple[int, ...]]:
    """Inverse of expbar_table: flattened group matrix -> Lie coordinates."""
    fwd = expbar_table(session, m)
    inv = {v: k for k, v in fwd.items()}
    if len(inv) != len(fwd):
        raise PrecisionExhausted("exp is not injective on the quotient")
    return inv


@dataclass(frozen=True)
class CosetWitness:
    """Outcome of an exp(x + L_k) = exp(x) K_k set comparison."""

    equal: bool
    level: int
    classes: int


def exp_coset(x: LieElement, k: int, m: int) -> CosetWitness:
    """Verify exp(x + L_k) = exp(x) exp(L_k) on the level-m quotient."""
    s = x.session
    if not 0 <= k <= m:
        raise ValueError("need 0 <= k <= m")
    p, n, e = s.p, s.n, s.e
    pm, pme = p**m, p ** (m + e)
    table = expbar_table(s, m)
    x_coords = tuple((x.mat[i][j] // p**e) % pm for i in range(n) for j in range(n))
    lhs = set()
    rhs = set()
    gx = tuple(
        tuple(table[x_coords][i * n + j] for j in range(n)) for i in range(n)
    )
    for coords in product(range(0, pm, p**k), repeat=n * n):
        shifted = tuple(
            (a + b) % pm for a, b in zip(x_coords, coords)
        )
        lhs.add(table[shifted])
        kk = tuple(
            tuple((1 if i == j else 0) + coords[i * n + j] * p**e for j in range(n))
            for i in range(n)
        )
        prod_mat = intmat.mat_mul(gx, kk, pme)
        rhs.add(tuple(v for row in prod_mat for v in row))
    return CosetWitness(equal=lhs == rhs, level=k, classes=len(lhs))
