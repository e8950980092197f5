"""Deciding whether a dual coset meets the nilpotent cone.

The cone is scaling-invariant, so a coset center + p^-level L^perp is
first rescaled to an integral coset mat + p^D gl_n(Z_p) with
D = denom_exp(center) - level.  For D <= 0 the coset contains 0.

For n = 2 the decision is exact: a nilpotent 2x2 matrix is exactly one
with zero trace and determinant.  Cancelling the trace is possible iff
v_p(tr mat) >= D, and the trace-zero slice of the coset is
(a0, b0, c0) + p^D Z_p^3 in the coordinates [[a, b], [c, -a]], on which
det = -(a^2 + bc).  After dividing out the common valuation s of
(a0, b0, c0) (if s >= D the slice contains the zero matrix), the scaled
coset is primitive with depth D' = D - s >= 1, and a^2 + bc = 0 is
solvable in it iff a0'^2 + b0'c0' = 0 mod p^D':

* if b0' (or c0') is a unit, any solution forces c = -a^2/b whose
  residue mod p^D' is determined by (a0', b0'), giving the congruence as
  both necessary and sufficient (the explicit solution is the returned
  certificate);
* if only a0' is a unit, a^2 + bc is a unit on the whole coset and the
  congruence fails, matching the nonexistence of solutions.

For n >= 3 a sound semi-decision runs instead: residues of the coset
mod p^depth are enumerated; "no" is certified when no residue has all
characteristic-polynomial coefficients congruent to zero, "yes" when
some vanishing residue admits a unit Jacobian minor for the coefficient
system (multivariate Hensel lifting then produces an exact nilpotent
element congruent to it, hence inside the coset), and "unknown"
otherwise.

A deliberately dumb brute-force oracle over residues mod p^depth is
provided for n = 2 as an independent cross-check of the exact decision.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from . import intmat
from .errors import PrecisionExhausted
from .intmat import Matrix
from .lie import DualElement
from .scalar import vp
from .session import SessionParams

YES = "yes"
NO = "no"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class NilpotencyOutcome:
    status: str
    certificate: DualElement | None = None
    depth: int | None = None

    @property
    def is_yes(self) -> bool:
        return self.status == YES

    @property
    def is_no(self) -> bool:
        return self.status == NO


def _vp_capped(x: int, p: int, cap: int) -> int:
    x %= p**cap
    if x == 0:
        return cap
    return min(vp(x, p), cap)


def nilpotent_in_coset(
    center: DualElement, level: int, depth: int | None = None
) -> NilpotencyOutcome:
    """Does center + p^-level L^perp contain a nilpotent element?

    Exact for n <= 2.  For n >= 3, ``depth`` bounds the residue search
    (default D + 1) and the outcome may be UNKNOWN.
    """
    s = center.session
    if level < 0:
        raise ValueError("level must be >= 0")
    d_rel = center.denom_exp - level
    if d_rel <= 0:
        return NilpotencyOutcome(YES, certificate=DualElement.zero(s))
    if d_rel > s.N:
        raise PrecisionExhausted("coset depth exceeds working precision")
    mat = center.mat
    if s.n == 1:
        # canonical nonzero center has a unit entry, so 0 is not in the coset
        ok = _vp_capped(mat[0][0], s.p, d_rel) >= d_rel
        if ok:
            return NilpotencyOutcome(YES, certificate=DualElement.zero(s))
        return NilpotencyOutcome(NO)
    if s.n == 2:
        return _decide_gl2(center, level, d_rel)
    return _search_gln(center, level, d_rel, depth)


def _decide_gl2(center: DualElement, level: int, d_rel: int) -> NilpotencyOutcome:
    s = center.session
    p, pN = s.p, s.pN
    mat = center.mat
    t = intmat.mat_trace(mat) % pN
    if _vp_capped(t, p, d_rel) < d_rel:
        return NilpotencyOutcome(NO)
    # trace-zero slice representative, still congruent to mat modulo p^d_rel
    a0 = (mat[0][0] - t) % pN
    b0 = mat[0][1] % pN
    c0 = mat[1][0] % pN
    sh = min(
        _vp_capped(a0, p, d_rel), _vp_capped(b0, p, d_rel), _vp_capped(c0, p, d_rel)
    )
    if sh >= d_rel:
        witness = _slice_witness(s, center, level, 0, 0, 0, 0)
        return NilpotencyOutcome(YES, certificate=witness)
    dd = d_rel - sh
    a1, b1, c1 = a0 // p**sh, b0 // p**sh, c0 // p**sh
    f = (a1 * a1 + b1 * c1) % pN
    if _vp_capped(f, p, dd) < dd:
        return NilpotencyOutcome(NO)
    # build an exact witness on the slice (b1 or c1 must be a unit here)
    if b1 % p != 0:
        a2, b2 = a1, b1
        c2 = (-a1 * a1 * pow(b1, -1, pN)) % pN
    else:
        if c1 % p == 0:
            raise AssertionError("criterion held with no unit off-diagonal")
        a2, c2 = a1, c1
        b2 = (-a1 * a1 * pow(c1, -1, pN)) % pN
    witness = _slice_witness(s, center, level, sh, a2, b2, c2)
    return NilpotencyOutcome(YES, certificate=witness)


def _slice_witness(
    s: SessionParams, center: DualElement, level: int, sh: int, a: int, b: int, c: int
) -> DualElement:
    """Assemble p^sh * [[a, b], [c, -a]] as a dual element in the coset."""
    pN = s.pN
    w = (
        (a * p_pow(s, sh) % pN, b * p_pow(s, sh) % pN),
        (c * p_pow(s, sh) % pN, (-a * p_pow(s, sh)) % pN),
    )
    return DualElement(s, center.denom_exp, w)


def p_pow(s: SessionParams, k: int) -> int:
    return s.p**k


def _search_gln(
    center: DualElement, level: int, d_rel: int, depth: int | None
) -> NilpotencyOutcome:
    s = center.session
    p, n = s.p, s.n
    if depth is None:
        depth = d_rel + 1
    depth = max(depth, d_rel)
    mod = p**depth
    step = p**d_rel
    candidates: list[Matrix] = []
    base = intmat.mat_mod(center.mat, mod)
    for offsets in product(range(0, mod, step), repeat=n * n):
        cand = tuple(
            tuple((base[i][j] + offsets[i * n + j]) % mod for j in range(n))
            for i in range(n)
        )
        coeffs = intmat.char_poly(cand)
        if all(int(c) % mod == 0 for c in coeffs[:n]):
            candidates.append(cand)
    if not candidates:
        return NilpotencyOutcome(NO, depth=depth)
    for cand in candidates:
        if _char_jacobian_full_rank(cand, p):
            return NilpotencyOutcome(
                YES, certificate=DualElement(s, center.denom_exp, cand), depth=depth
            )
    return NilpotencyOutcome(UNKNOWN, depth=depth)


def _char_jacobian_full_rank(mat: Matrix, p: int) -> bool:
    """Rank over F_p of the Jacobian of the char-poly coefficient system.

    det(xI - M) is affine-linear in each single entry, so a difference
    quotient with step 1 gives the exact partial derivative.
    """
    n = len(mat)
    base = intmat.char_poly(mat)
    rows: list[list[int]] = [[] for _ in range(n)]
    for u in range(n):
        for v in range(n):
            bumped = tuple(
                tuple(mat[i][j] + (1 if (i, j) == (u, v) else 0) for j in range(n))
                for i in range(n)
            )
            d = intmat.char_poly(bumped)
            for k in range(n):
                rows[k].append(int(d[k] - base[k]) % p)
    # Gaussian elimination over F_p on the n x n^2 matrix
    rank = 0
    cols = n * n
    r = [row[:] for row in rows]
    col = 0
    for row_i in range(n):
        while col < cols:
            piv = next((i for i in range(row_i, n) if r[i][col] % p), None)
            if piv is None:
                col += 1
                continue
            r[row_i], r[piv] = r[piv], r[row_i]
            inv = pow(r[row_i][col], -1, p)
            r[row_i] = [x * inv % p for x in r[row_i]]
            for i in range(n):
                if i != row_i and r[i][col]:
                    c = r[i][col]
                    r[i] = [(x - c * y) % p for x, y in zip(r[i], r[row_i])]
            rank += 1
            col += 1
            break
    return rank == n


def nilpotent_brute_force(
    center: DualElement, level: int, depth: int = 3
) -> NilpotencyOutcome:
    """Independent residue-enumeration oracle for n = 2.

    Enumerates the full coset mod p^depth; certifies "no" when no
    residue kills both trace and determinant mod p^depth, "yes" when the
    coset contains 0 exactly or some vanishing residue has b, c or a - d
    a unit (a unit Jacobian minor for (tr, det), so Hensel lifting gives
    an exact nilpotent matrix congruent to the residue mod p^depth,
    which therefore stays inside the coset).
    """
    s = center.session
    if s.n != 2:
        raise ValueError("brute-force oracle is for gl_2 only")
    p = s.p
    d_rel = center.denom_exp - level
    if d_rel <= 0 or all(x % p**d_rel == 0 for row in center.mat for x in row):
        return NilpotencyOutcome(YES, depth=depth)
    if depth < d_rel:
        raise ValueError("search depth below coset depth")
    mod = p**depth
    step = p**d_rel
    base = intmat.mat_mod(center.mat, mod)
    found_candidate = False
    for oa, ob, oc, od in product(range(0, mod, step), repeat=4):
        a = (base[0][0] + oa) % mod
        b = (base[0][1] + ob) % mod
        c = (base[1][0] + oc) % mod
        d = (base[1][1] + od) % mod
        if (a + d) % mod or (a * d - b * c) % mod:
            continue
        found_candidate = True
        if b % p or c % p or (a - d) % p:
            return NilpotencyOutcome(YES, depth=depth)
    if not found_candidate:
        return NilpotencyOutcome(NO, depth=depth)
    return NilpotencyOutcome(UNKNOWN, depth=depth)
