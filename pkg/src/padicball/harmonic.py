"""Idempotent convolution kernels and the verification identities.

The reference convolution (quotient.convolve) costs |supp a| * |supp b|
cyclotomic products.  Convolving with a Hecke idempotent has far more
structure: writing every group element uniquely as g = k * rep with k in
K_B, and using that eta_B is a character of K_B/K_m (verified
exhaustively beforehand via the commutation-defect sets),

    (e_B * mu)(rep)     = |K_B/K_m|^-1 sum_k eta_B(k)^-1 mu(k * rep)
    (e_B * mu)(k * rep) = eta_B(k) * (e_B * mu)(rep)

so one pass over the quotient computes the whole product.  The kernel
is used only with character data whose multiplicativity holds: Hecke
idempotents of admissible balls and plain subgroup averaging (trivial
character).  Tests cross-check it against the reference convolution.

Values are carried as dense integer coefficient arrays over the
cyclotomic power basis with a common denominator; multiplying by a root
of unity is an index shift, and results are reduced modulo the
cyclotomic polynomial only at comparison/canonicalization points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .balls import (
    Ball,
    enumerate_balls,
    eta_exponents,
    hecke_idempotent,
    is_admissible,
)
from .errors import HypothesisViolated, LevelMismatch, QuotientMismatch
from .expmap import GroupElement
from .lie import coadjoint, coset_intersects
from .quotient import (
    GROUP,
    LIE,
    Measure,
    QuotientDescriptor,
    convolve,
    exp_pullback,
    phi_reduce_array,
)
from .session import SessionParams
from .tables import get_tables

Dense = tuple[np.ndarray, int]


def group_quotient(session: SessionParams) -> QuotientDescriptor:
    return QuotientDescriptor(session, GROUP)


def lie_quotient(session: SessionParams) -> QuotientDescriptor:
    return QuotientDescriptor(session, LIE)


# ---------------------------------------------------------------- dense helpers


def dense_zero(session: SessionParams) -> Dense:
    tab = get_tables(session)
    order = session.p**session.cyclo_order_exp
    return np.zeros((tab.size, order), dtype=np.int64), 1


def dense_is_zero(session: SessionParams, dense: Dense) -> bool:
    arr, _ = dense
    return not phi_reduce_array(arr, session.p, session.cyclo_order_exp).any()


def dense_equal(session: SessionParams, a: Dense, b: Dense) -> bool:
    diff = a[0] * b[1] - b[0] * a[1]
    return not phi_reduce_array(diff, session.p, session.cyclo_order_exp).any()


def dense_measure(session: SessionParams, dense: Dense, side: str = GROUP) -> Measure:
    return Measure.from_dense(QuotientDescriptor(session, side), dense[0], dense[1])


def idempotent_dense(ball: Ball) -> Dense:
    """Dense form of the level-m Hecke idempotent of a ball."""
    session = ball.session
    tab = get_tables(session)
    arr, _ = dense_zero(session)
    if not ball.character_trivial_at_level(session.m):
        return arr, 1
    if ball.r_exp > session.m:
        raise LevelMismatch("radius exponent exceeds the level")
    sub = tab.subgroup(ball.r_exp)
    exps = eta_exponents(ball)
    arr[sub, exps] = 1
    return arr, len(sub)


def averaging_dense(session: SessionParams, r: int) -> Dense:
    """Dense form of e_{K_r}: normalized Haar averaging over K_r/K_m."""
    tab = get_tables(session)
    arr, _ = dense_zero(session)
    sub = tab.subgroup(r)
    arr[sub, 0] = 1
    return arr, len(sub)


# ------------------------------------------------------------ structured kernel


def _twisted_average_convolve(
    session: SessionParams, r: int, exps: np.ndarray, mu: Dense
) -> Dense:
    """Convolution of (1/M) sum_k zeta^exps(k) delta_k over K_r with mu.

    Sound only when the exponents are additive on K_r/K_m (a character);
    admissibility supplies exactly that for ball characters, and the
    trivial character is always additive.
    """
    tab = get_tables(session)
    arr, den = mu
    fac = tab.factorization(r)
    a = exps.astype(np.int64)
    order = arr.shape[1]
    cols = np.arange(order, dtype=np.int64)
    gather = arr[fac.fac_idx]  # (M, R, order)
    idx_minus = (cols[None, :] + a[:, None]) % order  # zeta^-a(k) shift
    rolled = np.take_along_axis(gather, idx_minus[:, None, :], axis=2)
    f_rep = rolled.sum(axis=0)  # (R, order)
    idx_plus = (cols[None, :] - a[:, None]) % order  # zeta^+a(k) shift
    block = np.take_along_axis(
        np.broadcast_to(f_rep[None, :, :], gather.shape), idx_plus[:, None, :], axis=2
    )
    out = np.empty_like(arr)
    out[fac.fac_idx] = block
    return out, den * len(fac.sub)


def idempotent_convolve(ball: Ball, mu: Dense) -> Dense:
    """e_B * mu through the coset factorization (see module docstring).

    Returns the zero measure when eta_B is nontrivial on K_m.
    """
    session = ball.session
    if not ball.character_trivial_at_level(session.m):
        return dense_zero(session)
    return _twisted_average_convolve(session, ball.r_exp, eta_exponents(ball), mu)


def averaging_convolve(session: SessionParams, r: int, mu: Dense) -> Dense:
    """e_{K_r} * mu (plain normalized averaging, trivial character)."""
    tab = get_tables(session)
    exps = np.zeros(len(tab.subgroup(r)), dtype=np.int64)
    return _twisted_average_convolve(session, r, exps, mu)


def left_translate_dense(session: SessionParams, gidx: int, mu: Dense) -> Dense:
    """delta_g * mu on dense arrays: out(g x) = mu(x)."""
    tab = get_tables(session)
    arr, den = mu
    perm = tab.mul_many(
        np.full(tab.size, gidx, dtype=np.int64), np.arange(tab.size, dtype=np.int64)
    )
    out = np.empty_like(arr)
    out[perm] = arr
    return out, den


def lie_convolve_dense(session: SessionParams, a: Dense, b: Dense) -> Dense:
    """Additive convolution on the Lie side, (a*b)(x) = sum_h a(h) b(x-h)."""
    tab = get_tables(session)
    arr_a, den_a = a
    arr_b, den_b = b
    supp_a = np.nonzero(arr_a.any(axis=1))[0]
    supp_b = np.nonzero(arr_b.any(axis=1))[0]
    if len(supp_b) < len(supp_a):  # additive convolution is commutative
        arr_a, arr_b = arr_b, arr_a
        supp_a = supp_b
    order = arr_a.shape[1]
    cols = np.arange(order, dtype=np.int64)
    out = np.zeros_like(arr_a)
    all_coords = tab.coords
    for h in supp_a:
        targets = tab.encode(all_coords + all_coords[int(h)])
        row = arr_a[int(h)]
        conv = np.zeros_like(arr_b)
        for s in range(order):
            c = int(row[s])
            if c:
                conv += c * np.take(arr_b, (cols - s) % order, axis=1)
        out[targets] += conv
    return out, den_a * den_b


# --------------------------------------------------------------- equivariance


def equivariance_holds(ball: Ball, mu: Dense, sub_positions=None) -> bool:
    """delta_k * (e_B * mu) = eta_B(k)^-1 (e_B * mu) for k in K_B/K_m.

    ``sub_positions`` restricts which k are tested (default: all of
    K_B/K_m).  A generating set already implies the full statement since
    delta_{kk'} * f = delta_k * (delta_{k'} * f).
    """
    session = ball.session
    tab = get_tables(session)
    f = idempotent_convolve(ball, mu)
    sub = tab.subgroup(ball.r_exp)
    exps = eta_exponents(ball)
    order = f[0].shape[1]
    cols = np.arange(order, dtype=np.int64)
    positions = range(len(sub)) if sub_positions is None else sub_positions
    for pos in positions:
        translated = left_translate_dense(session, int(sub[pos]), f)
        a = int(exps[pos])
        scaled = np.take(f[0], (cols + a) % order, axis=1)  # zeta^-a(k) * f
        if not dense_equal(session, translated, (scaled, f[1])):
            return False
    return True


# ------------------------------------------------------------ projector family


@dataclass
class ProjectorReport:
    idempotence_failures: list
    orthogonality_failures: list
    completeness_residual: Measure
    rank_total: int
    checks: int


def projector_family_check(
    session: SessionParams,
    orth_pairs: list[tuple[int, int]] | None = None,
) -> ProjectorReport:
    """Idempotence, orthogonality, completeness and rank accounting.

    ``orth_pairs``: index pairs of distinct balls to test (None = all
    ordered pairs).  Completeness compares sum_B e_B against delta_e
    exactly.  The rank of e_B acting by convolution is the number of
    right K_B-cosets: translates e_B * delta_g supported on distinct
    cosets are independent, and within one coset they are proportional
    by the (pre-verified) character property, so rank = [K_0 : K_B];
    admissibility of every ball is asserted before the formula is used.
    """
    tab = get_tables(session)
    balls = enumerate_balls(session)
    denses = [idempotent_dense(b) for b in balls]
    checks = 0
    idem_failures = []
    for b, d in zip(balls, denses):
        checks += 1
        if not is_admissible(b.center, b.r_exp, session.m):
            idem_failures.append({"ball": str(b.key()), "reason": "not admissible"})
            continue
        res = idempotent_convolve(b, d)
        if not dense_equal(session, res, d):
            idem_failures.append({"ball": str(b.key()), "reason": "e_B*e_B != e_B"})
    orth_failures = []
    if orth_pairs is None:
        orth_pairs = [
            (i, j) for i in range(len(balls)) for j in range(len(balls)) if i != j
        ]
    for i, j in orth_pairs:
        res = idempotent_convolve(balls[i], denses[j])
        checks += 1
        if not dense_is_zero(session, res):
            orth_failures.append(
                {"pair": (str(balls[i].key()), str(balls[j].key()))}
            )
    total = np.zeros_like(denses[0][0])
    size = tab.size
    for arr, den in denses:
        total += arr * (size // den)
    delta = np.zeros_like(total)
    delta[0, 0] = size
    residual = dense_measure(session, (total - delta, size))
    checks += 1
    rank_total = sum(idempotent_rank(b) for b in balls)
    checks += len(balls)
    return ProjectorReport(
        idempotence_failures=idem_failures,
        orthogonality_failures=orth_failures,
        completeness_residual=residual,
        rank_total=rank_total,
        checks=checks,
    )


def idempotent_rank(ball: Ball) -> int:
    """Rank of e_B acting by convolution on the level-m group algebra.

    Zero for the zero measure; otherwise [K_0 : K_B] by the coset
    argument in projector_family_check (requires admissibility).
    """
    session = ball.session
    if not ball.character_trivial_at_level(session.m):
        return 0
    if not is_admissible(ball.center, ball.r_exp, session.m):
        raise HypothesisViolated("rank formula needs an admissible ball")
    tab = get_tables(session)
    return tab.size // len(tab.subgroup(ball.r_exp))


def operator_rank_exact(ball: Ball) -> int:
    """Brute-force rank over the cyclotomic field (small quotients only).

    Builds the full matrix of mu -> e_B * mu via the reference
    convolution and row-reduces it with exact field arithmetic;
    independent of both the kernel and the coset rank formula.
    """
    session = ball.session
    tab = get_tables(session)
    if tab.size > 100:
        raise ValueError("exact operator rank is for small quotients only")
    q = group_quotient(session)
    e_b = hecke_idempotent(ball, session.m)
    keys = [tuple(int(c) for c in tab.coords[i]) for i in range(tab.size)]
    columns = []
    for g in range(tab.size):
        col = convolve(e_b, Measure.delta(q, keys[g]))
        columns.append([col.value(keys[x]) for x in range(tab.size)])
    rows = [[columns[j][i] for j in range(tab.size)] for i in range(tab.size)]
    rank = 0
    pivot_col = 0
    n_rows = len(rows)
    while pivot_col < tab.size and rank < n_rows:
        piv = next(
            (r for r in range(rank, n_rows) if not rows[r][pivot_col].is_zero), None
        )
        if piv is None:
            pivot_col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][pivot_col].inverse()
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(n_rows):
            if r != rank and not rows[r][pivot_col].is_zero:
                c = rows[r][pivot_col]
                rows[r] = [x - c * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
        pivot_col += 1
    return rank


# ----------------------------------------------------------------- ball spectra


def spectrum(xi: Measure, session: SessionParams) -> list[Ball]:
    """All special balls B at the session level with e_B * xi != 0."""
    if xi.quotient != group_quotient(session):
        raise QuotientMismatch("spectrum needs a group-side measure")
    dense = xi.dense()
    out = []
    for ball in enumerate_balls(session):
        res = idempotent_convolve(ball, dense)
        if not dense_is_zero(session, res):
            out.append(ball)
    return out


def coadjoint_ball(g: GroupElement, ball: Ball) -> Ball:
    """Image of a ball under the coadjoint action (center conjugated)."""
    if ball.is_base:
        return ball
    return Ball(ball.session, ball.r_exp, coadjoint(g, ball.center))


@dataclass(frozen=True)
class AdjointReport:
    nonzero: bool
    intersects: bool

    @property
    def ok(self) -> bool:
        return (not self.nonzero) or self.intersects


def check_adjoint_constraint(
    g: GroupElement, s_ball: Ball, t_ball: Ball, session: SessionParams
) -> AdjointReport:
    """e_T * delta_g * e_S nonzero should force ad(g)S to meet T."""
    tab = get_tables(session)
    gidx = int(tab.index_of_mats(np.array(g.mat, dtype=np.int64) % tab.pme))
    shifted = left_translate_dense(session, gidx, idempotent_dense(s_ball))
    res = idempotent_convolve(t_ball, shifted)
    nonzero = not dense_is_zero(session, res)
    moved = coadjoint_ball(g, s_ball)
    meets = coset_intersects(moved.center, moved.r_exp, t_ball.center, t_ball.r_exp)
    return AdjointReport(nonzero=nonzero, intersects=meets)


# ------------------------------------------------------------ vanishing lemmas


def invariant_basis_cosets(session: SessionParams, n_inv: int) -> list[np.ndarray]:
    """Index sets of the K_{n_inv}-cosets: supports of the natural basis
    of left-K_{n_inv}-invariant measures on K_0/K_m."""
    tab = get_tables(session)
    fac = tab.factorization(n_inv)
    return [fac.fac_idx[:, rp] for rp in range(len(fac.reps))]


def big_ball_vanishing_check(ball: Ball, n_inv: int, session: SessionParams) -> bool:
    """e_B annihilates every K_{n_inv}-invariant measure (radius > q^{n_inv}).

    Trivially true (the zero measure) when eta_B is nontrivial on K_m.
    """
    if ball.r_exp <= n_inv and ball.character_trivial_at_level(session.m):
        raise HypothesisViolated("ball radius must exceed the invariance level")
    if not ball.character_trivial_at_level(session.m):
        return True
    order = session.p**session.cyclo_order_exp
    tab = get_tables(session)
    for support in invariant_basis_cosets(session, n_inv):
        arr = np.zeros((tab.size, order), dtype=np.int64)
        arr[support, 0] = 1
        res = idempotent_convolve(ball, (arr, len(support)))
        if not dense_is_zero(session, res):
            return False
    return True


# -------------------------------------------------- exponential-vs-convolution


def check_fouexp(ball: Ball, xi: Measure, n_exp: int, l_exp: int) -> bool:
    """exp^*(e_B * xi) = exp^*(e_B) * exp^*(xi), under the stated hypotheses.

    Requires n_exp, l_exp > 0, a ball of radius q^n_exp whose center has
    norm exactly q^(n_exp + l_exp), the session level equal to
    n_exp + l_exp, and xi supported in K_{l_exp}/K_m.  Outside these the
    identity is not asserted and HypothesisViolated is raised.
    """
    session = ball.session
    if n_exp <= 0 or l_exp <= 0:
        raise HypothesisViolated("need n, l > 0 (the l = 0 case is separate)")
    if session.m != n_exp + l_exp:
        raise HypothesisViolated("session level must equal n + l")
    if ball.r_exp != n_exp:
        raise HypothesisViolated("ball radius must be q^n")
    if ball.center.norm_exp() != n_exp + l_exp:
        raise HypothesisViolated("center norm must be exactly q^(n+l)")
    if not is_admissible(ball.center, ball.r_exp, session.m):
        raise HypothesisViolated("ball must be admissible")
    _require_support_in_subgroup(xi, l_exp)
    lhs = exp_pullback(dense_measure(session, idempotent_convolve(ball, xi.dense())))
    e_b = dense_measure(session, idempotent_dense(ball))
    rhs = convolve(exp_pullback(e_b), exp_pullback(xi))
    return lhs == rhs


def check_fouexp_base(session: SessionParams, n_exp: int, xi: Measure) -> bool:
    """The l = 0 degenerate case: e_B = e_{K_n} plain averaging, xi free.

    exp^*(e_{K_n} * xi) = exp^*(e_{K_n}) * exp^*(xi) for any group-side
    xi at any level >= n.
    """
    if not 0 <= n_exp <= session.m:
        raise HypothesisViolated("need 0 <= n <= level")
    if xi.quotient != group_quotient(session):
        raise QuotientMismatch("xi must live on the group side")
    lhs = exp_pullback(
        dense_measure(session, averaging_convolve(session, n_exp, xi.dense()))
    )
    avg = dense_measure(session, averaging_dense(session, n_exp))
    rhs_dense = lie_convolve_dense(
        session, exp_pullback(avg).dense(), exp_pullback(xi).dense()
    )
    rhs = dense_measure(session, rhs_dense, side=LIE)
    return lhs == rhs


def check_cor_exp_products(
    session: SessionParams, alpha: Measure, beta: Measure, n_exp: int, l_exp: int
) -> bool:
    """Reduced-map compatibility for general measures with subgroup supports.

    For alpha supported in K_{n_exp}/K_m and beta in K_{l_exp}/K_m with
    n_exp + l_exp >= m, checks exp^*(alpha * beta) =
    exp^*(alpha) * exp^*(beta) on the Lie side.
    """
    if n_exp < 0 or l_exp < 0 or n_exp + l_exp < session.m:
        raise HypothesisViolated("need n + l >= level")
    _require_support_in_subgroup(alpha, n_exp)
    _require_support_in_subgroup(beta, l_exp)
    lhs = exp_pullback(convolve(alpha, beta))
    rhs_dense = lie_convolve_dense(
        session, exp_pullback(alpha).dense(), exp_pullback(beta).dense()
    )
    return lhs == dense_measure(session, rhs_dense, side=LIE)


def _require_support_in_subgroup(mu: Measure, r: int) -> None:
    session = mu.quotient.session
    if mu.quotient.side != GROUP:
        raise QuotientMismatch("expected a group-side measure")
    step = session.p**min(r, session.m)
    for key in mu.entries:
        if any(c % step for c in key):
            raise HypothesisViolated(f"support not inside K_{r}/K_m")
