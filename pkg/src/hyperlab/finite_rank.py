"""
Sparse finite-rank operators ``F = sum c_ij <., e_j> e_i``.

Entries are exact dyadics or floats, never mixed.  Norms are computed from
the singular values of the compact support block (non-zero rows x non-zero
columns) and therefore come back as floats; ``exact_operator_norm`` and
``exact_trace_norm`` give dyadic answers when the operator is a weighted
partial permutation, where the singular values are just the entry moduli.
"""

from __future__ import annotations

from types import MappingProxyType

import numpy as np

from . import scalars
from .errors import ConfigurationError
from .scalars import EXACT, SubspaceSpec

DEFAULT_SUPPORT_CAP = 10**5


class FiniteRankOperator:
    __slots__ = ("_entries", "mode", "__weakref__")

    def __init__(self, entries=None, mode=EXACT, support_cap=DEFAULT_SUPPORT_CAP):
        self.mode = scalars.check_mode(mode)
        clean = {}
        for (i, j), c in (entries or {}).items():
            c = scalars.to_mode(c, mode) if scalars_mode(c) != mode else c
            if c != 0:
                clean[(int(i), int(j))] = c
        if support_cap is not None and len(clean) > support_cap:
            raise ConfigurationError(f"support of {len(clean)} entries exceeds the cap {support_cap}")
        self._entries = MappingProxyType(clean)

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, mode=EXACT):
        return cls({}, mode)

    @classmethod
    def rank_one(cls, i, j, c=1, mode=EXACT):
        """``c e_i (x) e_j^*``: maps ``e_j`` to ``c e_i``."""
        return cls({(i, j): c}, mode)

    @classmethod
    def from_dense(cls, array, mode=EXACT):
        a = np.asarray(array)
        return cls({(i + 1, j + 1): a[i, j] for i, j in zip(*np.nonzero(a))}, mode)

    @classmethod
    def from_triplets(cls, triplets, mode=EXACT):
        entries = {}
        for i, j, v in triplets:
            entries[(int(i), int(j))] = scalars.to_mode(v, mode) if isinstance(v, str) else v
        return cls(entries, mode)

    # -- accessors --------------------------------------------------------

    @property
    def entries(self):
        return self._entries

    def __getitem__(self, key):
        return self._entries.get(key, scalars.zero(self.mode))

    def __len__(self):
        return len(self._entries)

    def items(self):
        return sorted(self._entries.items())

    def row_support(self):
        return SubspaceSpec.of(i for i, _ in self._entries)

    def col_support(self):
        return SubspaceSpec.of(j for _, j in self._entries)

    def is_zero(self):
        return not self._entries

    def max_index(self):
        return max((max(k) for k in self._entries), default=0)

    def __repr__(self):
        body = ", ".join(f"({i},{j}): {scalars.scalar_text(c)}" for (i, j), c in self.items()[:6])
        more = "" if len(self) <= 6 else f", ... ({len(self)} entries)"
        return f"FiniteRankOperator({{{body}{more}}}, mode={self.mode!r})"

    def __eq__(self, other):
        if not isinstance(other, FiniteRankOperator):
            return NotImplemented
        return self.mode == other.mode and dict(self._entries) == dict(other._entries)

    def __hash__(self):
        return hash((self.mode, frozenset(self._entries.items())))

    # -- linear structure -------------------------------------------------

    def _check(self, other):
        if self.mode != other.mode:
            raise ConfigurationError(f"mode mismatch: {self.mode} vs {other.mode}")

    def scale(self, a):
        a = scalars.to_mode(a, self.mode)
        return FiniteRankOperator({k: a * c for k, c in self._entries.items()}, self.mode)

    def __add__(self, other):
        return combine(self, other, 1, 1)

    def __sub__(self, other):
        return combine(self, other, 1, -1)

    def __neg__(self):
        return self.scale(-1)

    def __matmul__(self, other):
        return compose(self, other)

    def restrict_rows(self, s):
        """``P_s F``."""
        keep = s.as_set()
        return FiniteRankOperator({k: c for k, c in self._entries.items() if k[0] in keep}, self.mode)

    def restrict_cols(self, s):
        """``F P_s``."""
        keep = s.as_set()
        return FiniteRankOperator({k: c for k, c in self._entries.items() if k[1] in keep}, self.mode)

    def transpose(self):
        return FiniteRankOperator({(j, i): c for (i, j), c in self._entries.items()}, self.mode)

    def trace(self):
        t = scalars.zero(self.mode)
        for (i, j), c in self._entries.items():
            if i == j:
                t = t + c
        return t

    def to_float(self):
        if self.mode == "float":
            return self
        return FiniteRankOperator({k: float(c) for k, c in self._entries.items()}, "float")

    def to_dense(self, size, dtype=float):
        """Leading ``size x size`` block; ``dtype=object`` keeps exact entries."""
        out = np.zeros((size, size), dtype=dtype)
        if dtype is object:
            out[:] = scalars.zero(self.mode)
        for (i, j), c in self._entries.items():
            if i > size or j > size:
                raise ConfigurationError(f"entry ({i},{j}) lies outside the {size}x{size} truncation")
            out[i - 1, j - 1] = c if dtype is object else float(c)
        return out

    def support_block(self):
        """Dense float block on (non-zero rows) x (non-zero columns)."""
        rows = self.row_support().indices
        cols = self.col_support().indices
        ri = {r: a for a, r in enumerate(rows)}
        ci = {c: b for b, c in enumerate(cols)}
        block = np.zeros((len(rows), len(cols)))
        for (i, j), c in self._entries.items():
            block[ri[i], ci[j]] = float(c)
        return block

    def singular_values(self):
        if not self._entries:
            return np.zeros(0)
        return np.linalg.svd(self.support_block(), compute_uv=False)

    def is_partial_permutation(self):
        rows = [i for i, _ in self._entries]
        cols = [j for _, j in self._entries]
        return len(set(rows)) == len(rows) and len(set(cols)) == len(cols)

    def triplets(self):
        """``(row, col, value-text)`` list used in reports and fixtures."""
        return [(i, j, scalars.scalar_text(c)) for (i, j), c in self.items()]


def scalars_mode(c):
    try:
        return scalars.mode_of(c)
    except TypeError:
        return None


# ---------------------------------------------------------------------------


def projection_operator(s, mode=EXACT):
    """Orthogonal projection onto ``span{e_i : i in s}``."""
    one = scalars.one(mode)
    return FiniteRankOperator({(i, i): one for i in s}, mode)


def combine(F, G, a, b):
    """``aF + bG``."""
    F._check(G)
    a = scalars.to_mode(a, F.mode)
    b = scalars.to_mode(b, F.mode)
    out = {k: a * c for k, c in F.entries.items()}
    for k, c in G.entries.items():
        out[k] = out.get(k, scalars.zero(F.mode)) + b * c
    return FiniteRankOperator(out, F.mode)


def compose(F, G):
    """``FG``."""
    F._check(G)
    by_row = {}
    for (k, j), c in G.entries.items():
        by_row.setdefault(k, []).append((j, c))
    out = {}
    for (i, k), a in F.entries.items():
        for j, c in by_row.get(k, ()):
            out[(i, j)] = out.get((i, j), scalars.zero(F.mode)) + a * c
    return FiniteRankOperator(out, F.mode)


def operator_norm(F):
    """Largest singular value (float)."""
    sv = F.singular_values()
    return float(sv[0]) if sv.size else 0.0


def trace_norm(F):
    """Sum of singular values (float)."""
    return float(F.singular_values().sum())


def exact_operator_norm(F):
    """Exact norm of a weighted partial permutation, else ``None``."""
    if not F.is_partial_permutation():
        return None
    return max((abs(c) for c in F.entries.values()), default=scalars.zero(F.mode))


def exact_trace_norm(F):
    if not F.is_partial_permutation():
        return None
    total = scalars.zero(F.mode)
    for c in F.entries.values():
        total = total + abs(c)
    return total


def norm(F, which="operator"):
    if which == "operator":
        return operator_norm(F)
    if which == "trace":
        return trace_norm(F)
    raise ConfigurationError(f"unknown norm {which!r}; expected 'operator' or 'trace'")


def exact_norm(F, which="operator"):
    if which == "operator":
        return exact_operator_norm(F)
    if which == "trace":
        return exact_trace_norm(F)
    raise ConfigurationError(f"unknown norm {which!r}")


def distance(F, G, which="operator"):
    return norm(F - G, which)


def section_residual(F, m, which="operator"):
    """Compress ``F`` to ``P_m F P_m`` and report ``||P_m F P_m - F||``.

    This is the approximation step that turns an arbitrary finite-rank target
    into one supported in ``L_m``; witnesses require supported targets, so
    callers run this first and keep the residual for attribution.
    """
    s = scalars.section(m)
    G = F.restrict_rows(s).restrict_cols(s)
    return G, distance(G, F, which)
