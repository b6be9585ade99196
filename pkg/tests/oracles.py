"""Independent reference computations.

Nothing here imports the enumeration or orbit code of the package: the two
operators are written down from their defining formulas, and dense products
are done with integer matrices carrying a common power-of-two scale, which
keeps them exact.
"""

from fractions import Fraction

import numpy as np


# W e_j = e_{j+2}/2 (j odd), 2 e_{j-2} (j even, j > 2), e_1 (j = 2)
def w_step(j):
    if j % 2 == 1:
        return j + 2, Fraction(1, 2)
    if j == 2:
        return 1, Fraction(1)
    return j - 2, Fraction(2)


def w_inv_step(j):
    if j == 1:
        return 2, Fraction(1)
    if j % 2 == 1:
        return j - 2, Fraction(2)
    return j + 2, Fraction(1, 2)


# zigzag successor: 2z -> 2z+2 on the positive side, 1 -> 2, odd j >= 3 -> j-2
def alpha(j):
    if j % 2 == 0:
        return j + 2
    if j == 1:
        return 2
    return j - 2


def alpha_inv(j):
    if j == 2:
        return 1
    if j % 2 == 0:
        return j - 2
    return j + 2


def w_power(n, j):
    """``W^n e_j`` as ``(index, weight)`` by repeated single steps."""
    w = Fraction(1)
    step = w_step if n >= 0 else w_inv_step
    for _ in range(abs(n)):
        j, c = step(j)
        w *= c
    return j, w


def alpha_power(n, j):
    f = alpha if n >= 0 else alpha_inv
    for _ in range(abs(n)):
        j = f(j)
    return j


def norm_w_power_on(n, indices):
    """``||W^n P_s||`` straight from the definition: largest column weight."""
    return max(abs(w_power(n, j)[1]) for j in indices)


def norm_proj_w_power(indices, n, size=400):
    """``||P_s W^n||``: largest weight of a column landing in ``s``."""
    s = set(indices)
    best = Fraction(0)
    for j in range(1, size + 1):
        i, w = w_power(n, j)
        if i in s:
            best = max(best, abs(w))
    return best


def norm_proj_wstar_power(indices, n, size=400):
    """``||P_s (W*)^n||`` via the transpose: equals ``||W^n P_s||``."""
    return norm_w_power_on(n, indices)


# ---------------------------------------------------------------------------
# exact dense matrices ``A * 2^-e`` with integer A


class ScaledMatrix:
    def __init__(self, ints, exp):
        self.a = ints
        self.e = exp

    @classmethod
    def from_fractions(cls, entries, size):
        dens = [c.denominator for c in entries.values()] or [1]
        e = max(d.bit_length() - 1 for d in dens)
        assert all(d == 1 << (d.bit_length() - 1) for d in dens), "dyadic entries only"
        a = np.zeros((size, size), dtype=object)
        a[:] = 0
        for (i, j), c in entries.items():
            a[i - 1, j - 1] = int(c * (1 << e))
        return cls(a, e)

    def __matmul__(self, other):
        return ScaledMatrix(self.a.dot(other.a), self.e + other.e)

    def __add__(self, other):
        e = max(self.e, other.e)
        return ScaledMatrix(self.a * (1 << (e - self.e)) + other.a * (1 << (e - other.e)), e)

    def scale(self, q):
        q = Fraction(q)
        k = q.denominator.bit_length() - 1
        return ScaledMatrix(self.a * q.numerator, self.e + k)

    def entries(self):
        out = {}
        for i, j in zip(*np.nonzero(self.a)):
            out[(int(i) + 1, int(j) + 1)] = Fraction(int(self.a[i, j]), 1 << self.e)
        return out


def dense_power(step_pos, step_neg, n, size):
    """Truncated matrix of the n-th power built column by column."""
    entries = {}
    for j in range(1, size + 1):
        w = Fraction(1)
        i = j
        step = step_pos if n >= 0 else step_neg
        for _ in range(abs(n)):
            i, c = step(i)
            w *= c
        if i <= size:
            entries[(i, j)] = w
    return ScaledMatrix.from_fractions(entries, size)


def dense_w(n, size=64):
    return dense_power(w_step, w_inv_step, n, size)


def dense_u(n, size=64):
    return dense_power(lambda j: (alpha(j), Fraction(1)), lambda j: (alpha_inv(j), Fraction(1)), n, size)


def dense_t(F_entries, n, size=64):
    """``W^n F U^n`` on the leading ``size x size`` block."""
    F = ScaledMatrix.from_fractions(F_entries, size)
    return (dense_w(n, size) @ F @ dense_u(n, size)).entries()


def dense_adjoint_t(G_entries, n, size=64):
    """``U^n G W^n``."""
    G = ScaledMatrix.from_fractions(G_entries, size)
    return (dense_u(n, size) @ G @ dense_w(n, size)).entries()


def dense_cosine(F_entries, n, size=64):
    F = ScaledMatrix.from_fractions(F_entries, size)
    t = dense_w(n, size) @ F @ dense_u(n, size)
    s = dense_w(-n, size) @ F @ dense_u(-n, size)
    return (t + s).scale(Fraction(1, 2)).entries()


def trace_of_product(A_entries, B_entries):
    """``tr(AB)`` for sparse dictionaries."""
    total = Fraction(0)
    for (i, k), a in A_entries.items():
        b = B_entries.get((k, i))
        if b is not None:
            total += a * b
    return total


# ---------------------------------------------------------------------------


def brute_orthogonality_horizon(k, limit):
    """Smallest N with alpha^n(L_k) disjoint from L_k for all N <= n <= limit."""
    base = set(range(1, k + 1))
    for N in range(1, limit + 1):
        if all(not ({alpha_power(n, j) for j in base} & base) for n in range(N, limit + 1)):
            return N
    return None


def dense_float(entries):
    if not entries:
        return np.zeros((1, 1))
    size = max(max(k) for k in entries)
    a = np.zeros((size, size))
    for (i, j), c in entries.items():
        a[i - 1, j - 1] = float(c)
    return a
