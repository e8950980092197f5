"""Special balls in the dual space and their Hecke idempotents.

A special ball of radius r = q^j is a coset c + p^-j L^perp whose
center norm is r^2 or q*r^2.  The canonical partition rule: an element
of norm q^v (norm < 1 treated as v = 0) lies in the ball of radius
exponent floor(v/2) centered at itself; the base ball L^perp (radius 1,
zero center class) absorbs everything of norm <= 1.  These balls
partition the dual space, which the partition suite verifies
exhaustively at desk scale.

To a ball B belong the group K_B = exp((p^-j L^perp)^perp) = K_j and
the function eta_B(exp x) = psi(<c, x>) on it.  B is admissible at
level m when eta_B is a well-defined character of K_j/K_m; this is
decided exhaustively by pairing the center against every group
commutation defect log(xy) - log(x) - log(y).  The Hecke idempotent
e_B at level m is the measure eta_B / |K_j/K_m| on K_j/K_m, with the
convention that a ball whose character is nontrivial on K_m (center
outside p^-m L^perp) has the zero measure at this level: that is how it
acts on K_m-invariant vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from . import intmat
from .cyclo import CycloRational, psi_of
from .errors import LevelMismatch
from .expmap import GroupElement, log_trunc
from .lie import DualElement, coset_intersects, trace_pairing
from .nilpotent import NilpotencyOutcome, nilpotent_in_coset
from .quotient import GROUP, Measure, QuotientDescriptor
from .session import SessionParams
from .tables import get_tables


@dataclass(frozen=True)
class Ball:
    """A special ball: canonical center class + radius exponent."""

    session: SessionParams
    r_exp: int
    center: DualElement

    def __post_init__(self) -> None:
        if self.r_exp < 0:
            raise ValueError("radius exponent must be >= 0")
        v = self.center.norm_exp()
        if v is None or v <= 0:
            if self.r_exp != 0:
                raise ValueError("zero-class center only allowed for the base ball")
            object.__setattr__(self, "center", DualElement.zero(self.session))
            return
        if v not in (2 * self.r_exp, 2 * self.r_exp + 1):
            raise ValueError(
                f"center norm q^{v} violates the radius condition for r_exp={self.r_exp}"
            )
        # canonical center: lexicographically least representative of the
        # class mod p^-r_exp L^perp, i.e. the matrix reduced mod p^(v - r_exp)
        width = self.session.p ** (v - self.r_exp)
        reduced = intmat.mat_mod(self.center.mat, width)
        object.__setattr__(self, "center", DualElement(self.session, v, reduced))

    @property
    def is_base(self) -> bool:
        return self.r_exp == 0 and self.center.is_zero_class

    def radius_str(self) -> str:
        return f"q^{self.r_exp}"

    def key(self) -> tuple:
        flat = tuple(x for row in self.center.mat for x in row)
        return (self.r_exp, self.center.denom_exp, flat)

    def contains(self, y: DualElement) -> bool:
        return (y - self.center).in_dual_lattice(self.r_exp)

    def intersects(self, other: "Ball") -> bool:
        return coset_intersects(
            self.center, self.r_exp, other.center, other.r_exp
        )

    def character_trivial_at_level(self, m: int) -> bool:
        """Whether eta_B is trivial on K_m (center inside p^-m L^perp)."""
        return self.center.in_dual_lattice(m)

    def to_json(self) -> dict:
        return {"center": self.center.to_json(), "r_exp": self.r_exp}

    @classmethod
    def from_json(cls, session: SessionParams, obj: dict) -> "Ball":
        return cls(
            session, int(obj["r_exp"]), DualElement.from_json(session, obj["center"])
        )


def ball_of(y: DualElement) -> Ball:
    """The unique special ball containing y (canonical partition rule)."""
    v = y.norm_exp()
    veff = 0 if v is None or v < 0 else v
    r = veff // 2
    if veff == 0:
        return Ball(y.session, 0, DualElement.zero(y.session))
    return Ball(y.session, r, y)


def enumerate_balls(session: SessionParams, level: int | None = None) -> list[Ball]:
    """All special balls with center inside p^-level L^perp.

    Exactly one ball per center class: the base ball plus, for each norm
    1 <= q^v <= q^level, the classes of norm-q^v centers modulo
    p^-floor(v/2) L^perp.  Output is sorted by (radius, canonical center).
    """
    if level is None:
        level = session.m
    if level < 0:
        raise ValueError("level must be >= 0")
    if level + session.e >= session.N:
        raise LevelMismatch("enumeration level exceeds working precision")
    p, n = session.p, session.n
    balls = [Ball(session, 0, DualElement.zero(session))]
    for v in range(1, level + 1):
        r = v // 2
        width = p ** (v - r)
        for flat in product(range(width), repeat=n * n):
            if all(x % p == 0 for x in flat):
                continue
            mat = tuple(tuple(flat[i * n + j] for j in range(n)) for i in range(n))
            balls.append(Ball(session, r, DualElement(session, v, mat)))
    balls.sort(key=Ball.key)
    return balls


def ball_count(session: SessionParams, level: int) -> int:
    """Closed-form coset count matching enumerate_balls (oracle for tests)."""
    nn = session.n**2
    total = 1
    for v in range(1, level + 1):
        r = v // 2
        total += session.p ** ((v - r) * nn) - session.p ** ((v - r - 1) * nn)
    return total


def is_admissible(center: DualElement, r_exp: int, level: int) -> bool:
    """Exhaustive character test for the coset center + p^-r_exp L^perp.

    True iff eta(exp x) = psi(<center, x>) descends to a character of
    K_r/K_level: the center must pair L_level into Z_p (well-definedness)
    and must annihilate every commutation defect of K_r/K_level
    (multiplicativity, checked against the exhaustive defect set).
    """
    session = center.session
    if level != session.m:
        raise LevelMismatch("admissibility level must equal the session level")
    if not center.in_dual_lattice(level):
        return False
    tab = get_tables(session)
    c_flat = np.array(
        [x for row in center.class_mat(level) for x in row], dtype=np.int64
    )
    defects = tab.defect_classes(r_exp)
    dcoords = tab.coords[defects]
    t = (dcoords[:, tab.transp] @ c_flat) % tab.pm
    return not t.any()


@dataclass(frozen=True)
class BallCharacter:
    """eta_B realized on K_B at full working precision.

    Evaluation never goes through the quotient tables: the logarithm and
    the trace pairing are computed exactly, making this the independent
    reference for the table-driven exponent arrays.
    """

    ball: Ball
    level: int
    check: bool = False

    def __post_init__(self) -> None:
        if self.check and not is_admissible(
            self.ball.center, self.ball.r_exp, self.level
        ):
            raise ValueError("eta_B is not a character at this level")

    def __call__(self, g: GroupElement) -> CycloRational:
        x = log_trunc(g)
        return psi_of(trace_pairing(x, self.ball.center))


def hecke_idempotent(ball: Ball, level: int) -> Measure:
    """The measure eta_B * (normalized Haar on K_B) at the given level.

    Supported on K_r/K_level with value eta_B(k)/|K_r/K_level|; the zero
    measure when eta_B is nontrivial on K_level (the center lies outside
    p^-level L^perp), which keeps the level-m algebra closed.
    """
    session = ball.session
    if level != session.m:
        raise LevelMismatch("idempotents live at the session level")
    q = QuotientDescriptor(session, GROUP)
    if not ball.character_trivial_at_level(level):
        return Measure.zero(q)
    if ball.r_exp > level:
        raise LevelMismatch(
            f"radius exponent {ball.r_exp} exceeds the level {level}"
        )
    tab = get_tables(session)
    sub = tab.subgroup(ball.r_exp)
    exps = eta_exponents(ball)
    mass = Fraction(1, len(sub))
    entries = {}
    for pos, gidx in enumerate(sub):
        key = tuple(int(c) for c in tab.coords[gidx])
        entries[key] = CycloRational.zeta_power(session, int(exps[pos])).scale(mass)
    return Measure(q, entries)


def eta_exponents(ball: Ball) -> np.ndarray:
    """Character exponents of eta_B over K_r/K_m (psi-exponents mod p^K).

    Requires the center inside p^-m L^perp.
    """
    session = ball.session
    tab = get_tables(session)
    sub = tab.subgroup(ball.r_exp)
    c_flat = np.array(
        [x for row in ball.center.class_mat(session.m) for x in row], dtype=np.int64
    )
    scale = session.p ** (session.cyclo_order_exp - session.m)  # 1 when K = m
    t = (tab.log_coords[sub][:, tab.transp] @ c_flat) % tab.pm
    return t * scale % (session.p**session.cyclo_order_exp)


def classify_nilpotent(ball: Ball, depth: int | None = None) -> NilpotencyOutcome:
    """Whether the ball meets the nilpotent cone (delegates to the coset test)."""
    return nilpotent_in_coset(ball.center, ball.r_exp, depth)
