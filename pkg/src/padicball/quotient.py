"""Exact measures on the finite quotients, convolution and Fourier analysis.

A measure is a finitely supported function on one of the three level-m
quotients (group K_0/K_m, Lie L/L_m, dual p^-m L^perp / L^perp) with
values in the exact cyclotomic ring.  Keys are coordinate tuples (see
tables.py); the JSON form uses base-p digit strings of the canonical
matrix representatives.

Convolution follows (a*b)(g) = sum_h a(h) b(h^-1 g), matching the left
translation action delta_k * mu; on the commutative Lie/dual sides
h^-1 g becomes g - h.

The Fourier transform between the dual and Lie sides uses the pairing
character psi(<x, y>):

    dual -> lie:  F(f)(x) = |L/L_m|^-1 * sum_y f(y) psi(<x,y>)
    lie -> dual:  F(g)(y) =              sum_x g(x) psi(<x,y>)

With these normalizations F(F(f)) = f(-argument) in both directions and
F(delta_0 on the dual side) is the uniform probability measure on the
Lie side.  Dense inputs go through an exact separable DFT (index shifts
of integer coefficient vectors); sparse inputs are summed directly; the
two paths agree coefficient for coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import intmat
from .cyclo import CycloRational, reduce_mod_cyclotomic
from .errors import QuotientMismatch
from .session import SessionParams
from .tables import QuotientTables, get_tables

GROUP = "group"
LIE = "lie"
DUAL = "dual"
SIDES = (GROUP, LIE, DUAL)

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"

# magnitude guard for the int64 dense kernels
_DENSE_LIMIT = 1 << 44

Key = tuple[int, ...]


@dataclass(frozen=True)
class QuotientDescriptor:
    """One finite quotient of a session: side plus level (= session.m)."""

    session: SessionParams
    side: str

    def __post_init__(self) -> None:
        if self.side not in SIDES:
            raise ValueError(f"unknown side {self.side!r}")

    @property
    def level(self) -> int:
        return self.session.m

    @property
    def size(self) -> int:
        s = self.session
        return s.p ** (s.m * s.n * s.n)

    def tables(self) -> QuotientTables:
        return get_tables(self.session)

    # ------------------------------------------------------------- key helpers

    def zero_key(self) -> Key:
        return (0,) * (self.session.n ** 2)

    def check_key(self, key: Key) -> Key:
        s = self.session
        key = tuple(int(v) for v in key)
        if len(key) != s.n * s.n or any(not 0 <= v < s.p**s.m for v in key):
            raise ValueError(f"bad element key {key!r}")
        return key

    def op(self, a: Key, b: Key) -> Key:
        """Group product (group side) or sum (lie/dual sides) of two keys."""
        s = self.session
        pm = s.p**s.m
        if self.side != GROUP:
            return tuple((x + y) % pm for x, y in zip(a, b))
        pme = s.p ** (s.m + s.e)
        ma = self._key_matrix(a)
        mb = self._key_matrix(b)
        prod = intmat.mat_mul(ma, mb, pme)
        return self._matrix_key(prod)

    def inv(self, a: Key) -> Key:
        s = self.session
        pm = s.p**s.m
        if self.side != GROUP:
            return tuple((-x) % pm for x in a)
        pme = s.p ** (s.m + s.e)
        return self._matrix_key(intmat.mat_inv_mod(self._key_matrix(a), s.p, s.m + s.e))

    def _key_matrix(self, key: Key) -> intmat.Matrix:
        s = self.session
        pme = s.p ** (s.m + s.e)
        pe = s.p**s.e
        return tuple(
            tuple(
                ((1 if i == j else 0) + pe * key[i * s.n + j]) % pme
                for j in range(s.n)
            )
            for i in range(s.n)
        )

    def _matrix_key(self, mat: intmat.Matrix) -> Key:
        s = self.session
        pme = s.p ** (s.m + s.e)
        pe = s.p**s.e
        return tuple(
            ((mat[i][j] - (1 if i == j else 0)) % pme) // pe
            for i in range(s.n)
            for j in range(s.n)
        )

    # ---------------------------------------------------------- string keying

    def _entry_width_and_value(self, coord: int) -> tuple[int, int]:
        s = self.session
        if self.side == DUAL:
            return s.m, coord
        pme = s.p ** (s.m + s.e)
        base = s.p**s.e * coord
        return s.m + s.e, base % pme

    def key_to_string(self, key: Key) -> str:
        """Base-p digit string (least significant first) of the canonical
        matrix representative, entries joined by '.'."""
        s = self.session
        parts = []
        for t, coord in enumerate(key):
            width, value = self._entry_width_and_value(coord)
            if self.side == GROUP and t % (s.n + 1) == 0:
                value = (value + 1) % s.p ** (s.m + s.e)
            digits = []
            for _ in range(width):
                digits.append(value % s.p)
                value //= s.p
            if s.p <= len(_DIGITS):
                parts.append("".join(_DIGITS[d] for d in digits))
            else:
                parts.append(",".join(str(d) for d in digits))
        return ".".join(parts)

    def key_from_string(self, text: str) -> Key:
        s = self.session
        parts = text.split(".")
        if len(parts) != s.n * s.n:
            raise ValueError(f"expected {s.n * s.n} entries in key {text!r}")
        key = []
        for t, part in enumerate(parts):
            if s.p <= len(_DIGITS):
                digits = [_DIGITS.index(ch) for ch in part]
            else:
                digits = [int(d) for d in part.split(",")]
            value = 0
            for d in reversed(digits):
                value = value * s.p + d
            if self.side == DUAL:
                coord = value % s.p**s.m
            else:
                if self.side == GROUP and t % (s.n + 1) == 0:
                    value -= 1
                pme = s.p ** (s.m + s.e)
                coord = (value % pme) // s.p**s.e
            key.append(coord)
        return self.check_key(tuple(key))

    def to_json(self) -> dict:
        s = self.session
        return {"p": s.p, "n": s.n, "e": s.e, "m": s.m, "side": self.side}


def phi_reduce_array(arr: np.ndarray, p: int, K: int) -> np.ndarray:
    """Reduce trailing power-vectors (length p^K) modulo Phi_{p^K}."""
    order = p**K
    block = order // p
    phi = order - block
    out = arr.copy()
    top = out[..., phi:].copy()
    for j in range(p - 1):
        out[..., j * block : (j + 1) * block] -= top
    out[..., phi:] = 0
    return out


@dataclass(frozen=True)
class Measure:
    """Exact finitely-supported cyclotomic-valued function on a quotient."""

    quotient: QuotientDescriptor
    entries: dict

    def __post_init__(self) -> None:
        clean = {}
        for key, val in self.entries.items():
            key = self.quotient.check_key(key)
            if not val.is_zero:
                clean[key] = val
        object.__setattr__(self, "entries", clean)

    # ---------------------------------------------------------------- builders

    @classmethod
    def zero(cls, quotient: QuotientDescriptor) -> "Measure":
        return cls(quotient, {})

    @classmethod
    def delta(cls, quotient: QuotientDescriptor, key: Key | None = None) -> "Measure":
        if key is None:
            key = quotient.zero_key()
        return cls(quotient, {key: CycloRational.one(quotient.session)})

    @classmethod
    def uniform(cls, quotient: QuotientDescriptor) -> "Measure":
        w = CycloRational.from_rational(
            quotient.session, Fraction(1, quotient.size)
        )
        tab = quotient.tables()
        return cls(
            quotient,
            {tuple(int(c) for c in tab.coords[i]): w for i in range(quotient.size)},
        )

    # ------------------------------------------------------------------- state

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def mass(self) -> CycloRational:
        total = CycloRational.zero(self.quotient.session)
        for val in self.entries.values():
            total = total + val
        return total

    def value(self, key: Key) -> CycloRational:
        return self.entries.get(
            self.quotient.check_key(key), CycloRational.zero(self.quotient.session)
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Measure):
            return NotImplemented
        return self.quotient == other.quotient and self.entries == other.entries

    def __hash__(self) -> int:  # entries dict is frozen after init
        return hash((self.quotient, tuple(sorted(self.entries))))

    # -------------------------------------------------------------- arithmetic

    def _check(self, other: "Measure") -> None:
        if self.quotient != other.quotient:
            raise QuotientMismatch("measures on different quotients")

    def __add__(self, other: "Measure") -> "Measure":
        self._check(other)
        out = dict(self.entries)
        for key, val in other.entries.items():
            cur = out.get(key)
            out[key] = val if cur is None else cur + val
        return Measure(self.quotient, out)

    def __neg__(self) -> "Measure":
        return Measure(self.quotient, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other: "Measure") -> "Measure":
        return self + (-other)

    def scale(self, c) -> "Measure":
        if isinstance(c, CycloRational):
            return Measure(
                self.quotient, {k: v * c for k, v in self.entries.items()}
            )
        return Measure(
            self.quotient, {k: v.scale(Fraction(c)) for k, v in self.entries.items()}
        )

    def translate_left(self, gkey: Key) -> "Measure":
        """delta_g * mu, i.e. x -> mu(g^-1 x)."""
        q = self.quotient
        return Measure(
            q, {q.op(gkey, key): val for key, val in self.entries.items()}
        )

    # ------------------------------------------------------------- dense forms

    def dense(self) -> tuple[np.ndarray, int]:
        """(coefficients, denominator): int64 array of shape (size, p^K)."""
        q = self.quotient
        s = q.session
        tab = q.tables()
        order = s.p**s.cyclo_order_exp
        den = 1
        for val in self.entries.values():
            den = den * val.den // gcd(den, val.den)
        arr = np.zeros((q.size, order), dtype=np.int64)
        weights = tab.weights
        for key, val in self.entries.items():
            idx = int(np.dot(np.array(key, dtype=np.int64), weights))
            scale = den // val.den
            row = np.array(val.coeffs, dtype=np.int64) * scale
            if np.abs(row).max(initial=0) > _DENSE_LIMIT:
                raise OverflowError("coefficients too large for dense kernels")
            arr[idx] = row
        if den > _DENSE_LIMIT:
            raise OverflowError("denominator too large for dense kernels")
        return arr, den

    @classmethod
    def from_dense(
        cls, quotient: QuotientDescriptor, arr: np.ndarray, den: int
    ) -> "Measure":
        s = quotient.session
        tab = quotient.tables()
        red = phi_reduce_array(arr, s.p, s.cyclo_order_exp)
        entries = {}
        nz = np.nonzero(red.any(axis=1))[0]
        for idx in nz:
            key = tuple(int(c) for c in tab.coords[idx])
            entries[key] = CycloRational.make(
                s, [int(c) for c in red[idx]], den
            )
        return cls(quotient, entries)

    # ------------------------------------------------------------------ output

    def to_json(self) -> dict:
        q = self.quotient
        items = sorted(self.entries.items())
        return {
            "quotient": q.to_json(),
            "entries": [
                {"elem": q.key_to_string(k), "coeff": v.to_json()} for k, v in items
            ],
        }

    @classmethod
    def from_json(cls, obj: dict, session: SessionParams | None = None) -> "Measure":
        meta = obj["quotient"]
        if session is None:
            session = SessionParams.create(
                p=int(meta["p"]), n=int(meta["n"]), m=int(meta["m"]), e=int(meta["e"])
            )
        else:
            got = (int(meta["p"]), int(meta["n"]), int(meta["e"]), int(meta["m"]))
            want = (session.p, session.n, session.e, session.m)
            if got != want:
                raise QuotientMismatch(
                    f"measure quotient {got} does not match session {want}"
                )
        q = QuotientDescriptor(session, str(meta["side"]))
        entries = {}
        for item in obj["entries"]:
            key = q.key_from_string(item["elem"])
            val = CycloRational.from_json(session, item["coeff"])
            if key in entries:
                raise ValueError(f"duplicate element key {item['elem']!r}")
            entries[key] = val
        return cls(q, entries)


# ------------------------------------------------------------------ operations


def convolve(a: Measure, b: Measure) -> Measure:
    """(a*b)(g) = sum_h a(h) b(h^-1 g); the reference implementation.

    Exact and fully generic; cost |supp a| * |supp b|.  The structured
    idempotent kernels in harmonic.py are cross-checked against this.
    """
    if a.quotient != b.quotient:
        raise QuotientMismatch("convolution across quotients")
    q = a.quotient
    out: dict = {}
    for ka, va in a.entries.items():
        for kb, vb in b.entries.items():
            k = q.op(ka, kb)
            prod = va * vb
            cur = out.get(k)
            out[k] = prod if cur is None else cur + prod
    return Measure(q, out)


def pointwise_product(a: Measure, b: Measure) -> Measure:
    if a.quotient != b.quotient:
        raise QuotientMismatch("pointwise product across quotients")
    out = {}
    for key, va in a.entries.items():
        vb = b.entries.get(key)
        if vb is not None:
            out[key] = va * vb
    return Measure(a.quotient, out)


def _other_side(side: str) -> str:
    return LIE if side == DUAL else DUAL


_SPARSE_FOURIER_CUTOFF = 256


def fourier(f: Measure) -> Measure:
    """Fourier transform dual <-> lie.

    The dual -> lie direction carries the 1/|L/L_m| normalization; the
    companion lie -> dual transform carries none.  Composing the two (in
    either order) gives f(-argument).
    """
    q = f.quotient
    if q.side == GROUP:
        raise QuotientMismatch("Fourier transform lives on the lie/dual sides")
    s = q.session
    out_q = QuotientDescriptor(s, _other_side(q.side))
    order = s.p**s.cyclo_order_exp
    tab = q.tables()
    if len(f.entries) <= _SPARSE_FOURIER_CUTOFF:
        arr, den = _fourier_sparse(f, tab, order)
    else:
        arr, den = _fourier_dense(f, tab, order)
    if q.side == DUAL:
        den *= q.size
    return Measure.from_dense(out_q, arr, den)


def _fourier_sparse(f: Measure, tab: QuotientTables, order: int) -> tuple[np.ndarray, int]:
    s = f.quotient.session
    scale = s.p ** (s.cyclo_order_exp - s.m)  # = 1 when K = m
    size = f.quotient.size
    den = 1
    for val in f.entries.values():
        den = den * val.den // gcd(den, val.den)
    out = np.zeros((size, order), dtype=np.int64)
    cols = np.arange(order, dtype=np.int64)
    for key, val in f.entries.items():
        vec = np.array(key, dtype=np.int64)
        t = (tab.coords[:, tab.transp] @ vec) % tab.pm * scale % order
        row = np.array(val.coeffs, dtype=np.int64) * (den // val.den)
        gather = (cols[None, :] - t[:, None]) % order
        out += row[gather]
    return out, den


def _fourier_dense(f: Measure, tab: QuotientTables, order: int) -> tuple[np.ndarray, int]:
    s = f.quotient.session
    scale = s.p ** (s.cyclo_order_exp - s.m)
    arr, den = f.dense()
    pm, nn = tab.pm, tab.nn
    grid = arr.reshape((pm,) * nn + (order,))
    cols = np.arange(order, dtype=np.int64)
    for axis in range(nn):
        moved = np.moveaxis(grid, axis, 0)
        new = np.zeros_like(moved)
        for k in range(pm):
            for j in range(pm):
                t = j * k % pm * scale % order
                new[k] += np.take(moved[j], (cols - t) % order, axis=-1)
        grid = np.moveaxis(new, 0, axis)
    # axis a of the result indexes the coordinate paired against input
    # axis a, i.e. the transposed matrix position: permute back
    perm = [int(t) for t in tab.transp] + [nn]
    grid = np.transpose(grid, axes=perm)
    return grid.reshape(arr.shape).copy(), den


def exp_pullback(mu: Measure) -> Measure:
    """(exp^* mu)(x) = mu(exp(x)): group-side measures pulled to the Lie side."""
    q = mu.quotient
    if q.side != GROUP:
        raise QuotientMismatch("exp pullback applies to group-side measures")
    s = q.session
    tab = q.tables()
    out_q = QuotientDescriptor(s, LIE)
    out = {}
    for key, val in mu.entries.items():
        gidx = int(np.dot(np.array(key, dtype=np.int64), tab.weights))
        lidx = int(tab.log_idx[gidx])
        out[tuple(int(c) for c in tab.coords[lidx])] = val
    return Measure(out_q, out)


def exp_pushforward(nu: Measure) -> Measure:
    """Inverse of exp_pullback: Lie-side measures carried to the group side."""
    q = nu.quotient
    if q.side != LIE:
        raise QuotientMismatch("exp pushforward applies to lie-side measures")
    s = q.session
    tab = q.tables()
    out_q = QuotientDescriptor(s, GROUP)
    out = {}
    for key, val in nu.entries.items():
        lidx = int(np.dot(np.array(key, dtype=np.int64), tab.weights))
        gidx = int(tab.exp_idx[lidx])
        out[tuple(int(c) for c in tab.coords[gidx])] = val
    return Measure(out_q, out)
