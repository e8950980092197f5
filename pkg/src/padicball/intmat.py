"""Small exact matrix helpers over Z, Z/p^N and Q (as Fractions).

Matrices are immutable tuples of row tuples.  Everything here is plain
integer arithmetic; numpy is reserved for the bulk finite-quotient
kernels elsewhere.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NotInvertibleAtPrecision

Matrix = tuple[tuple[int, ...], ...]


def freeze(rows) -> Matrix:
    return tuple(tuple(r) for r in rows)


def identity(n: int, one=1) -> Matrix:
    return tuple(tuple(one if i == j else 0 for j in range(n)) for i in range(n))


def zero(n: int) -> Matrix:
    return tuple((0,) * n for _ in range(n))


def mat_mod(a: Matrix, mod: int) -> Matrix:
    return tuple(tuple(x % mod for x in row) for row in a)


def mat_add(a: Matrix, b: Matrix, mod: int | None = None) -> Matrix:
    out = tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))
    return mat_mod(out, mod) if mod else out


def mat_sub(a: Matrix, b: Matrix, mod: int | None = None) -> Matrix:
    out = tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))
    return mat_mod(out, mod) if mod else out


def mat_neg(a: Matrix, mod: int | None = None) -> Matrix:
    out = tuple(tuple(-x for x in row) for row in a)
    return mat_mod(out, mod) if mod else out


def mat_scale(a: Matrix, c, mod: int | None = None) -> Matrix:
    out = tuple(tuple(c * x for x in row) for row in a)
    return mat_mod(out, mod) if mod else out


def mat_mul(a: Matrix, b: Matrix, mod: int | None = None) -> Matrix:
    n = len(a)
    k = len(b)
    cols = len(b[0])
    out = []
    for i in range(n):
        row = []
        ai = a[i]
        for j in range(cols):
            s = sum(ai[t] * b[t][j] for t in range(k))
            row.append(s % mod if mod else s)
        out.append(tuple(row))
    return tuple(out)


def mat_trace(a: Matrix):
    return sum(a[i][i] for i in range(len(a)))


def mat_min_val(a: Matrix, p: int, cap: int) -> int:
    """Minimum p-adic valuation over entries, capped at ``cap`` (all-zero case)."""
    best = cap
    for row in a:
        for x in row:
            x = x % p**cap
            if x == 0:
                continue
            v = 0
            while x % p == 0 and v < best:
                x //= p
                v += 1
            best = min(best, v)
            if best == 0:
                return 0
    return best


def _inv_mod_p(a: Matrix, p: int) -> Matrix:
    """Inverse of a mod p by Gauss-Jordan over F_p."""
    n = len(a)
    aug = [[x % p for x in row] + [1 if i == j else 0 for j in range(n)]
           for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] % p), None)
        if piv is None:
            raise NotInvertibleAtPrecision("matrix is singular mod p")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], -1, p)
        aug[col] = [x * inv % p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                c = aug[r][col]
                aug[r] = [(x - c * y) % p for x, y in zip(aug[r], aug[col])]
    return freeze(row[n:] for row in aug)


def mat_inv_mod(a: Matrix, p: int, N: int) -> Matrix:
    """Inverse of a modulo p^N (Newton lifting from the mod-p inverse)."""
    n = len(a)
    x = _inv_mod_p(a, p)
    prec = 1
    while prec < N:
        prec = min(2 * prec, N)
        mod = p**prec
        ax = mat_mul(mat_mod(a, mod), x, mod)
        two_i = mat_sub(mat_scale(identity(n), 2), ax, mod)
        x = mat_mul(x, two_i, mod)
    return mat_mod(x, p**N)


def char_poly(a: Matrix) -> list[Fraction]:
    """Characteristic polynomial coefficients [c_0, ..., c_n] of a,
    det(xI - a) = sum c_k x^k, via Faddeev-LeVerrier (exact)."""
    n = len(a)
    af = tuple(tuple(Fraction(x) for x in row) for row in a)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = identity(n, one=Fraction(1))
    mk = m
    for k in range(1, n + 1):
        mk = mat_mul(af, mk)
        c = -mat_trace(mk) / k
        coeffs[n - k] = c
        mk = tuple(
            tuple(mk[i][j] + (c if i == j else 0) for j in range(n))
            for i in range(n)
        )
    return coeffs
