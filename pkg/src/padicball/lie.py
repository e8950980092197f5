"""The Lie algebra gl_n over truncated p-adics and its dual lattice chain.

The integral lattice is L = p^e * gl_n(Z_p) with the chain L_k = p^k L.
The dual space is identified with gl_n via the trace pairing
<X, Y> = tr(XY); under this identification the dual lattice is
L^perp = p^-e * gl_n(Z_p) and p^-k L^perp = (L_k)^perp.

A dual element is stored as p^-(k+e) * mat with mat integral, k >= 0.
In canonical form either mat is not divisible by p (then the element has
norm exactly q^k, the norm being the least |alpha| with y in
alpha*L^perp), or k = 0 and the element lies in L^perp.  The norm of the
zero class is reported as 0 (the infimum; the minimum is not attained).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import intmat
from .errors import PrecisionExhausted
from .intmat import Matrix
from .scalar import TruncatedScalar
from .session import SessionParams


@dataclass(frozen=True)
class LieElement:
    """Element of L_level inside gl_n(Q_p), entries known mod p^N."""

    session: SessionParams
    mat: Matrix
    level: int = 0

    def __post_init__(self) -> None:
        s = self.session
        if len(self.mat) != s.n or any(len(r) != s.n for r in self.mat):
            raise ValueError("matrix size does not match session")
        mat = intmat.mat_mod(self.mat, s.pN)
        object.__setattr__(self, "mat", mat)
        if self.level < 0:
            raise ValueError("level must be >= 0")
        need = s.e + self.level
        if intmat.mat_min_val(mat, s.p, s.N) < min(need, s.N):
            raise ValueError(
                f"entries must have valuation >= {need} (element of L_{self.level})"
            )

    @classmethod
    def zero(cls, session: SessionParams, level: int = 0) -> "LieElement":
        return cls(session, intmat.zero(session.n), level)

    def entry(self, i: int, j: int) -> TruncatedScalar:
        return TruncatedScalar.from_int(self.session, self.mat[i][j])

    @property
    def entries(self) -> tuple[tuple[TruncatedScalar, ...], ...]:
        return tuple(
            tuple(self.entry(i, j) for j in range(self.session.n))
            for i in range(self.session.n)
        )

    def min_level(self) -> int:
        """Largest k <= N - e with the element in L_k (at working precision)."""
        s = self.session
        return max(intmat.mat_min_val(self.mat, s.p, s.N) - s.e, 0)

    def at_level(self, level: int) -> "LieElement":
        return LieElement(self.session, self.mat, level)

    def __add__(self, other: "LieElement") -> "LieElement":
        lvl = min(self.level, other.level)
        return LieElement(
            self.session, intmat.mat_add(self.mat, other.mat, self.session.pN), lvl
        )

    def __sub__(self, other: "LieElement") -> "LieElement":
        lvl = min(self.level, other.level)
        return LieElement(
            self.session, intmat.mat_sub(self.mat, other.mat, self.session.pN), lvl
        )

    def __neg__(self) -> "LieElement":
        return LieElement(
            self.session, intmat.mat_neg(self.mat, self.session.pN), self.level
        )

    def to_json(self) -> dict:
        return {"level": self.level, "mat": [list(r) for r in self.mat]}

    @classmethod
    def from_json(cls, session: SessionParams, obj: dict) -> "LieElement":
        return cls(session, intmat.freeze(obj["mat"]), int(obj.get("level", 0)))


@dataclass(frozen=True)
class DualElement:
    """Element p^-(denom_exp+e) * mat of the dual chain, canonicalized."""

    session: SessionParams
    denom_exp: int
    mat: Matrix

    def __post_init__(self) -> None:
        s = self.session
        if len(self.mat) != s.n or any(len(r) != s.n for r in self.mat):
            raise ValueError("matrix size does not match session")
        if self.denom_exp < 0:
            raise ValueError("denom_exp must be >= 0")
        k = self.denom_exp
        mat = intmat.mat_mod(self.mat, s.pN)
        while k > 0 and intmat.mat_min_val(mat, s.p, 1) >= 1:
            mat = tuple(tuple(x // s.p for x in row) for row in mat)
            # re-reduce: dividing the representative keeps it within p^N
            k -= 1
        object.__setattr__(self, "denom_exp", k)
        object.__setattr__(self, "mat", mat)

    # ---------------------------------------------------------------- builders

    @classmethod
    def zero(cls, session: SessionParams) -> "DualElement":
        return cls(session, 0, intmat.zero(session.n))

    @classmethod
    def from_scaled_integral(
        cls, session: SessionParams, denom_exp: int, mat
    ) -> "DualElement":
        return cls(session, denom_exp, intmat.freeze(mat))

    # ------------------------------------------------------------------- state

    @property
    def is_zero_class(self) -> bool:
        """True when indistinguishable from 0 at working precision."""
        return intmat.mat_min_val(self.mat, self.session.p, self.session.N) >= self.session.N

    def norm_exp(self) -> int | None:
        """v with |y| = q^v, or None for the zero class (norm 0)."""
        if self.is_zero_class:
            return None
        if self.denom_exp > 0:
            return self.denom_exp
        return -intmat.mat_min_val(self.mat, self.session.p, self.session.N)

    def in_dual_lattice(self, j: int) -> bool:
        """Membership y in p^-j * L^perp (norm at most q^j)."""
        v = self.norm_exp()
        return v is None or v <= j

    # -------------------------------------------------------------- arithmetic

    def _check(self, other: "DualElement") -> None:
        if self.session != other.session:
            raise ValueError("dual elements from different sessions")

    def __add__(self, other: "DualElement") -> "DualElement":
        self._check(other)
        p = self.session.p
        k = max(self.denom_exp, other.denom_exp)
        a = intmat.mat_scale(self.mat, p ** (k - self.denom_exp))
        b = intmat.mat_scale(other.mat, p ** (k - other.denom_exp))
        return DualElement(self.session, k, intmat.mat_add(a, b, self.session.pN))

    def __neg__(self) -> "DualElement":
        return DualElement(
            self.session, self.denom_exp, intmat.mat_neg(self.mat, self.session.pN)
        )

    def __sub__(self, other: "DualElement") -> "DualElement":
        return self + (-other)

    def scale_by_uniformizer(self, j: int) -> "DualElement":
        """Multiply by p^j (j may be negative, deepening the denominator)."""
        k = self.denom_exp - j
        if k >= 0:
            return DualElement(self.session, k, self.mat)
        return DualElement(
            self.session, 0, intmat.mat_scale(self.mat, self.session.p ** (-k), self.session.pN)
        )

    # ------------------------------------------------------------------ output

    def class_mat(self, level: int) -> Matrix:
        """Representative matrix of the class mod L^perp inside
        p^-level * L^perp, as mat' mod p^level with y = p^-(level+e) * mat'."""
        if not self.in_dual_lattice(level):
            raise ValueError(f"element is not in p^-{level} L^perp")
        p = self.session.p
        scaled = intmat.mat_scale(self.mat, p ** (level - self.denom_exp))
        return intmat.mat_mod(scaled, p**level)

    def to_json(self) -> dict:
        return {"k": self.denom_exp, "mat": [list(r) for r in self.mat]}

    @classmethod
    def from_json(cls, session: SessionParams, obj: dict) -> "DualElement":
        return cls(session, int(obj["k"]), intmat.freeze(obj["mat"]))


# ----------------------------------------------------------------- operations


def trace_pairing(x: LieElement, y: DualElement) -> TruncatedScalar:
    """<X, Y> = tr(XY), exact at working precision.

    The result carries N digits of tr(x.mat * y.mat); the denominator
    shift k + e must leave at least one significant digit.
    """
    if x.session != y.session:
        raise ValueError("pairing across sessions")
    s = x.session
    shift = y.denom_exp + s.e
    if shift >= s.N:
        raise PrecisionExhausted(
            f"pairing denominator p^{shift} exhausts precision N={s.N}"
        )
    t = intmat.mat_trace(intmat.mat_mul(x.mat, y.mat, s.pN)) % s.pN
    return TruncatedScalar.from_unit(s, -shift, t)


def norm_star(y: DualElement) -> int | None:
    """Exponent v of the dual norm |y| = q^v; None encodes |0| = 0."""
    return y.norm_exp()


def coadjoint(g, y: DualElement) -> DualElement:
    """Coadjoint action via the trace-form identification: y -> g y g^-1.

    ``g`` may be a GroupElement or a raw integral matrix invertible mod p;
    any such g preserves every lattice p^-k L^perp, so norms are preserved.
    """
    mat_g = g.mat if hasattr(g, "mat") else intmat.freeze(g)
    s = y.session
    inv = intmat.mat_inv_mod(mat_g, s.p, s.N)
    conj = intmat.mat_mul(intmat.mat_mul(mat_g, y.mat, s.pN), inv, s.pN)
    return DualElement(s, y.denom_exp, conj)


def coset_intersects(
    c1: DualElement, level1: int, c2: DualElement, level2: int
) -> bool:
    """Whether the cosets c_i + p^-level_i L^perp meet.

    Two such cosets meet iff c1 - c2 lies in the larger lattice
    p^-max(level1, level2) L^perp.
    """
    return (c1 - c2).in_dual_lattice(max(level1, level2))
