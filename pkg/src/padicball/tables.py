"""Cached dense tables for the finite quotients of one session.

Everything at level m happens on three coordinatized sets of equal size
p^(m*n^2):

* group side  K_0/K_m: matrices Id + p^e*C mod p^(m+e), coordinates C;
* Lie side    L/L_m:   matrices p^e*X mod p^(m+e),      coordinates X;
* dual side   p^-m L^perp / L^perp: elements p^-(m+e)*D, coordinates D;

with all coordinates row-major n^2-vectors of digits mod p^m.  The
pairing <x, y> = tr(xy) becomes the transposed dot product of
coordinates times p^-m, so character exponents are plain integer dot
products mod p^m.

The tables hold the exp/log bijection between the group and Lie sides,
inverse and product indexing, subgroup factorizations K_0 = K_r * reps
used by the convolution kernels, and the exhaustive sets of group
commutation defects log(xy) - log(x) - log(y) against which character
multiplicativity is tested.

All arrays are integer-exact; numpy is used only for bulk indexing and
modular integer arithmetic.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .expmap import expbar_table
from .session import SessionParams


@dataclass(frozen=True)
class SubgroupFactorization:
    """Unique factorization g = k * rep with k in K_r/K_m.

    ``rep_pos_of[g]`` and ``k_pos_of[g]`` locate the factors of g;
    ``fac_idx[kp, rp]`` is the index of sub[kp] * reps[rp] (a bijection
    onto the whole quotient).
    """

    level: int
    sub: np.ndarray
    sub_pos: np.ndarray
    reps: np.ndarray
    rep_pos_of: np.ndarray
    k_pos_of: np.ndarray
    fac_idx: np.ndarray


class QuotientTables:
    """Dense index tables for the level-m quotients of a session."""

    def __init__(self, session: SessionParams):
        self.session = session
        p, n, e, m = session.p, session.n, session.e, session.m
        self.p, self.n, self.e, self.m = p, n, e, m
        self.pm = p**m
        self.pme = p ** (m + e)
        self.nn = n * n
        self.size = self.pm**self.nn
        # big-endian digit weights: flat index == C-order index of the
        # (pm,)*nn coordinate grid, so dense reshapes line up with axes
        self.weights = (
            self.pm ** (self.nn - 1 - np.arange(self.nn))
        ).astype(np.int64)
        self.transp = np.array(
            [(t % n) * n + t // n for t in range(self.nn)], dtype=np.int64
        )
        idx = np.arange(self.size, dtype=np.int64)
        digits = [
            (idx // self.pm ** (self.nn - 1 - i)) % self.pm for i in range(self.nn)
        ]
        self.coords = np.stack(digits, axis=1).astype(np.int64)
        eye = np.eye(n, dtype=np.int64).reshape(-1)
        self.group_mats = (
            eye[None, :] + (p**e) * self.coords
        ).reshape(self.size, n, n) % self.pme
        self._build_exp_log()
        self._fact_cache: dict[int, SubgroupFactorization] = {}
        self._defect_cache: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    # ----------------------------------------------------------- index helpers

    def encode(self, coords: np.ndarray) -> np.ndarray:
        return (coords % self.pm) @ self.weights

    def index_of_mats(self, mats: np.ndarray) -> np.ndarray:
        eye = np.eye(self.n, dtype=np.int64)
        off = (mats - eye) % self.pme
        coords = (off // self.p**self.e).reshape(mats.shape[:-2] + (self.nn,))
        return coords @ self.weights

    def mul_many(self, a_idx: np.ndarray, b_idx: np.ndarray) -> np.ndarray:
        """Indices of products a*b (arrays broadcast elementwise)."""
        prod = np.matmul(self.group_mats[a_idx], self.group_mats[b_idx]) % self.pme
        return self.index_of_mats(prod)

    def mul_outer(self, a_idx: np.ndarray, b_idx: np.ndarray) -> np.ndarray:
        """Indices of all pairwise products, shape (len(a), len(b))."""
        prod = (
            np.einsum(
                "aij,bjk->abik", self.group_mats[a_idx], self.group_mats[b_idx]
            )
            % self.pme
        )
        return self.index_of_mats(prod)

    def _build_exp_log(self) -> None:
        table = expbar_table(self.session, self.m)
        exp_idx = np.empty(self.size, dtype=np.int64)
        pme, pe = self.pme, self.p**self.e
        eye = np.eye(self.n, dtype=np.int64).reshape(-1)
        for i in range(self.size):
            key = tuple(int(c) for c in self.coords[i])
            flat = np.array(table[key], dtype=np.int64)
            off = (flat - eye) % pme
            exp_idx[i] = int((off // pe) @ self.weights)
        self.exp_idx = exp_idx
        log_idx = np.empty(self.size, dtype=np.int64)
        log_idx[exp_idx] = np.arange(self.size, dtype=np.int64)
        self.log_idx = log_idx
        neg = self.encode((-self.coords) % self.pm)
        self.inv_idx = exp_idx[neg[log_idx]]
        # log coordinates of each group element, used by character exponents
        self.log_coords = self.coords[self.log_idx]

    # ------------------------------------------------------------- lie helpers

    def lie_add(self, a_idx: np.ndarray, b_idx: np.ndarray) -> np.ndarray:
        return self.encode(self.coords[a_idx] + self.coords[b_idx])

    def lie_neg(self, a_idx: np.ndarray) -> np.ndarray:
        return self.encode(-self.coords[a_idx])

    def pairing_exponents(self, dual_coords, lie_coords: np.ndarray) -> np.ndarray:
        """tr-pairing character exponents mod p^m.

        ``dual_coords``: length n^2 vector; ``lie_coords``: (..., n^2).
        """
        d = np.asarray(dual_coords, dtype=np.int64)
        return (lie_coords[..., self.transp] @ d) % self.pm

    # --------------------------------------------------------------- subgroups

    def subgroup(self, r: int) -> np.ndarray:
        """Indices of K_r/K_m (group side), sorted."""
        if r <= 0:
            return np.arange(self.size, dtype=np.int64)
        step = self.p**r
        mask = (self.coords % step == 0).all(axis=1)
        return np.nonzero(mask)[0].astype(np.int64)

    def factorization(self, r: int) -> SubgroupFactorization:
        with self._lock:
            fac = self._fact_cache.get(r)
        if fac is not None:
            return fac
        fac = self._build_factorization(r)
        with self._lock:
            self._fact_cache[r] = fac
        return fac

    def _build_factorization(self, r: int) -> SubgroupFactorization:
        step = self.p ** min(r, self.m)
        sub = self.subgroup(r)
        sub_pos = np.full(self.size, -1, dtype=np.int64)
        sub_pos[sub] = np.arange(len(sub))
        rep_idx_of = self.encode(self.coords % step)
        reps = np.unique(rep_idx_of)
        rep_pos = np.full(self.size, -1, dtype=np.int64)
        rep_pos[reps] = np.arange(len(reps))
        rep_pos_of = rep_pos[rep_idx_of]
        k_idx = self.mul_many(
            np.arange(self.size, dtype=np.int64), self.inv_idx[rep_idx_of]
        )
        k_pos_of = sub_pos[k_idx]
        if (k_pos_of < 0).any():
            raise AssertionError("coset factorization left the subgroup")
        fac_idx = np.empty((len(sub), len(reps)), dtype=np.int64)
        fac_idx[k_pos_of, rep_pos_of] = np.arange(self.size, dtype=np.int64)
        return SubgroupFactorization(
            level=r,
            sub=sub,
            sub_pos=sub_pos,
            reps=reps,
            rep_pos_of=rep_pos_of,
            k_pos_of=k_pos_of,
            fac_idx=fac_idx,
        )

    # ------------------------------------------------------------- defect sets

    def defect_classes(self, r: int, chunk: int = 128) -> np.ndarray:
        """Unique Lie classes of log(xy) - log(x) - log(y), x, y in K_r/K_m.

        Returned as sorted encoded Lie indices; exhaustive over all pairs.
        """
        with self._lock:
            cached = self._defect_cache.get(r)
        if cached is not None:
            return cached
        sub = self.subgroup(r)
        log_c = self.log_coords
        uniq = np.empty(0, dtype=np.int64)
        for start in range(0, len(sub), chunk):
            rows = sub[start : start + chunk]
            prod = self.mul_outer(rows, sub)
            d = (
                log_c[prod]
                - log_c[rows][:, None, :]
                - log_c[sub][None, :, :]
            ) % self.pm
            enc = (d @ self.weights).reshape(-1)
            uniq = np.unique(np.concatenate([uniq, np.unique(enc)]))
        with self._lock:
            self._defect_cache[r] = uniq
        return uniq


_TABLE_CACHE: dict[SessionParams, QuotientTables] = {}
_TABLE_LOCK = threading.Lock()


def get_tables(session: SessionParams) -> QuotientTables:
    with _TABLE_LOCK:
        tab = _TABLE_CACHE.get(session)
    if tab is not None:
        return tab
    tab = QuotientTables(session)
    with _TABLE_LOCK:
        return _TABLE_CACHE.setdefault(session, tab)
