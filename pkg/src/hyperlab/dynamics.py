"""
Elementary operator dynamics on finite-rank operators.

``T(F) = W F U`` with ``U`` unitary and ``W`` invertible; ``S = T^{-1}`` is
reached through negative powers, the cosine family is
``C(n) = (T^n + S^n) / 2``, and on the trace-class side the adjoint maps
are ``T*(G) = U G W`` and ``S*(G) = U^{-1} G W^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import finite_rank as fr
from . import scalars
from .errors import ConfigurationError, DomainError
from .finite_rank import FiniteRankOperator
from .operators import WeightedPermutationOperator, check_same_mode

DEFAULT_HORIZON_CAP = 4096


@dataclass(frozen=True)
class ElementarySystem:
    U: WeightedPermutationOperator
    W: WeightedPermutationOperator
    support_cap: int = fr.DEFAULT_SUPPORT_CAP
    horizon_cap: int = DEFAULT_HORIZON_CAP

    def __post_init__(self):
        check_same_mode(self.U, self.W)
        if not self.U.is_unitary():
            raise DomainError(f"{self.U.name} is not unitary")
        if not self.W.is_invertible():
            raise DomainError(f"{self.W.name} is not invertible")

    @property
    def mode(self):
        return self.W.mode


def _check(sys, F):
    if F.mode != sys.mode:
        raise ConfigurationError(f"operator mode {F.mode} does not match system mode {sys.mode}")


def sandwich(L, m, F, R, n, support_cap=fr.DEFAULT_SUPPORT_CAP):
    """``L^m F R^n`` for weighted permutation operators ``L`` and ``R``.

    An entry ``c`` at ``(a, b)`` moves to ``(sigma_L^m(a), sigma_R^{-n}(b))``
    with value ``lw * c * rw`` where ``L^m e_a = lw e_.`` and
    ``R^n e_{sigma_R^{-n}(b)} = rw e_b``.
    """
    out = {}
    for (a, b), c in F.entries.items():
        left = L.power_step(m, a)
        col = R.rule.step(b, -n)
        rw = R.power_step(n, col).weight
        key = (left.index, col)
        v = left.weight * c * rw
        out[key] = out[key] + v if key in out else v
    return FiniteRankOperator(out, F.mode, support_cap=support_cap)


def t_apply(sys, n, F):
    """``T^n(F) = W^n F U^n`` (negative ``n`` gives ``S^{|n|}``)."""
    _check(sys, F)
    if n == 0:
        return F
    return sandwich(sys.W, n, F, sys.U, n, sys.support_cap)


def s_apply(sys, n, F):
    return t_apply(sys, -n, F)


def cosine_apply(sys, n, F):
    """``C(n) F = (T^n F + S^n F) / 2``."""
    if n < 0:
        raise ConfigurationError("cosine index must be non-negative")
    _check(sys, F)
    if n == 0:
        return F
    h = scalars.half(sys.mode)
    return fr.combine(t_apply(sys, n, F), t_apply(sys, -n, F), h, h)


def adjoint_t_apply(sys, n, G):
    """``(T*)^n G = U^n G W^n``; negative ``n`` gives ``U^{-|n|} G W^{-|n|}``."""
    _check(sys, G)
    if n == 0:
        return G
    return sandwich(sys.U, n, G, sys.W, n, sys.support_cap)


def adjoint_cosine_apply(sys, n, G):
    h = scalars.half(sys.mode)
    return fr.combine(adjoint_t_apply(sys, n, G), adjoint_t_apply(sys, -n, G), h, h)


_DIRECTIONS = ("forward", "backward", "cosine")


def orbit_map(sys, direction, adjoint=False):
    if direction not in _DIRECTIONS:
        raise ConfigurationError(f"unknown direction {direction!r}; expected {_DIRECTIONS}")
    if adjoint:
        if direction == "forward":
            return lambda n, F: adjoint_t_apply(sys, n, F)
        if direction == "backward":
            return lambda n, F: adjoint_t_apply(sys, -n, F)
        return lambda n, F: adjoint_cosine_apply(sys, n, F)
    if direction == "forward":
        return lambda n, F: t_apply(sys, n, F)
    if direction == "backward":
        return lambda n, F: t_apply(sys, -n, F)
    return lambda n, F: cosine_apply(sys, n, F)


def orbit_profile(sys, F, horizon, which="operator", direction="forward"):
    """``[(n, norm, exact_norm_or_None)]`` for ``n = 0..horizon``.

    The exact column is filled whenever the orbit element is a weighted
    partial permutation.
    """
    if horizon < 0:
        raise ConfigurationError("horizon must be non-negative")
    if horizon > sys.horizon_cap:
        raise ConfigurationError(f"horizon {horizon} exceeds the cap {sys.horizon_cap}")
    step = orbit_map(sys, direction)
    rows = []
    for n in range(horizon + 1):
        X = step(n, F)
        exact = fr.exact_norm(X, which) if X.mode == scalars.EXACT else None
        rows.append((n, fr.norm(X, which), exact))
    return rows


def profile_csv_rows(rows):
    """CSV rows ``n, norm-as-decimal, norm-as-dyadic-when-exact``."""
    out = [("n", "norm", "norm_dyadic")]
    for n, val, exact in rows:
        out.append((str(n), repr(val), "" if exact is None else str(exact)))
    return out
