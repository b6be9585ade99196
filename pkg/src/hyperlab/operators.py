"""
Lazy weighted permutation operators ``A e_j = w_j e_{sigma(j)}`` on l2(N).

Two concrete permutation families cover the worked examples: bilateral
shifts read through an enumeration of the integers (the aperiodic zigzag
shift and the parity shift behind the explicit invertible example), and
finite block cycles (periodic unitaries).  Powers are computed by walking
the orbit one step at a time; weight products stay exact in dyadic mode.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Mapping, NamedTuple, Optional

from . import scalars
from .errors import ConfigurationError, DomainError
from .scalars import EXACT, FLOAT, Dyadic, SubspaceSpec

DEFAULT_ORBIT_HORIZON = 2**16
INDEX_CAP = 2**32
DEFAULT_PROBE_HORIZON = 256
_CHECKPOINT = 64


# ---------------------------------------------------------------------------
# enumerations of Z by positive integers


def zigzag_enum(z):
    """0->1, 1->2, -1->3, 2->4, -2->5, ..."""
    return 2 * z if z > 0 else 1 - 2 * z


def zigzag_index(j):
    return j // 2 if j % 2 == 0 else -(j - 1) // 2


def parity_enum(z):
    """0->1, 1->3, 2->5, ... and -1->2, -2->4, ...: odd indices run forward."""
    return 2 * z + 1 if z >= 0 else -2 * z


def parity_index(j):
    return (j - 1) // 2 if j % 2 == 1 else -(j // 2)


_ENUMERATIONS = {
    "zigzag": (zigzag_enum, zigzag_index),
    "parity": (parity_enum, parity_index),
}


def _check_index(j):
    if not isinstance(j, int) or j < 1:
        raise DomainError(f"basis index must be a positive integer, got {j!r}")
    if j > INDEX_CAP:
        raise DomainError(f"basis index {j} exceeds the cap 2^32")
    return j


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PermutationRule:
    """A bijection of the positive integers together with its inverse."""

    forward: Callable[[int], int]
    backward: Callable[[int], int]
    description: str
    kind: str = "custom"
    params: tuple = ()
    # signed position along a single bi-infinite orbit, when there is one
    position: Optional[Callable[[int], int]] = field(default=None, compare=False)
    at_position: Optional[Callable[[int], int]] = field(default=None, compare=False)

    def inverse(self):
        pos = at = None
        if self.position is not None:
            p, a = self.position, self.at_position
            pos = lambda j: -p(j)  # noqa: E731
            at = lambda z: a(-z)  # noqa: E731
        return PermutationRule(self.backward, self.forward, f"inverse({self.description})",
                               kind=self.kind, params=self.params + ("inverse",),
                               position=pos, at_position=at)

    def step(self, j, n):
        """``sigma^n(j)`` by orbit walking (closed form on a bilateral orbit)."""
        _check_index(j)
        if self.position is not None:
            return _check_index(self.at_position(self.position(j) + n))
        f = self.forward if n >= 0 else self.backward
        for _ in range(abs(n)):
            j = f(j)
        return _check_index(j)

    def verify(self, horizon):
        """Check forward/backward are mutually inverse and injective on 1..horizon."""
        seen = set()
        for j in range(1, horizon + 1):
            f = self.forward(j)
            if self.backward(f) != j or self.forward(self.backward(j)) != j:
                return False
            if f in seen:
                return False
            seen.add(f)
        return True


def bilateral_rule(enumeration):
    """Successor map ``j -> phi(phi^{-1}(j) + 1)`` for an enumeration ``phi`` of Z."""
    try:
        enum, index = _ENUMERATIONS[enumeration]
    except KeyError:
        raise ConfigurationError(f"unknown enumeration {enumeration!r}") from None
    return PermutationRule(
        forward=lambda j: enum(index(j) + 1),
        backward=lambda j: enum(index(j) - 1),
        description=f"bilateral shift along the {enumeration} enumeration of Z",
        kind=enumeration,
        position=index,
        at_position=enum,
    )


def identity_rule():
    return PermutationRule(lambda j: j, lambda j: j, "identity", kind="identity")


def block_cycle_rule(period):
    """Cycle each block ``{bp+1, ..., bp+p}`` one place forward; ``sigma^p = id``."""
    if period < 1:
        raise ConfigurationError("block period must be positive")

    def fwd(j):
        b, r = divmod(j - 1, period)
        return b * period + (r + 1) % period + 1

    def bwd(j):
        b, r = divmod(j - 1, period)
        return b * period + (r - 1) % period + 1

    return PermutationRule(fwd, bwd, f"block {period}-cycle", kind="block_cycle",
                           params=(period,))


def rule_from_kind(kind, params=()):
    if kind in _ENUMERATIONS:
        return bilateral_rule(kind)
    if kind == "identity":
        return identity_rule()
    if kind == "block_cycle":
        if len(params) != 1:
            raise ConfigurationError("block_cycle needs exactly one parameter (the period)")
        return block_cycle_rule(int(params[0]))
    raise ConfigurationError(f"unknown permutation rule {kind!r}")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightPattern:
    """Weights constant on residue classes mod ``modulus``, plus finitely many exceptions."""

    modulus: int
    residues: Mapping[int, object]
    exceptions: Mapping[int, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.modulus < 1:
            raise ConfigurationError("weight modulus must be positive")
        missing = set(range(self.modulus)) - set(self.residues)
        if missing:
            raise ConfigurationError(f"weight pattern misses residues {sorted(missing)}")
        extra = set(self.residues) - set(range(self.modulus))
        if extra:
            raise ConfigurationError(f"residues {sorted(extra)} are out of range")
        modes = {scalars.mode_of(v) for v in list(self.residues.values()) + list(self.exceptions.values())}
        if len(modes) > 1:
            raise ConfigurationError("weight pattern mixes exact and float values")

    @classmethod
    def constant(cls, value):
        return cls(1, {0: value})

    @property
    def mode(self):
        return scalars.mode_of(self.residues[0])

    def __call__(self, j):
        w = self.exceptions.get(j)
        if w is None:
            w = self.residues[j % self.modulus]
        return w

    def attained(self):
        """Every value attained by the weight sequence (residue classes are infinite)."""
        return list(self.residues.values()) + list(self.exceptions.values())

    def to_mode(self, mode):
        conv = lambda d: {k: scalars.to_mode(v, mode) for k, v in d.items()}  # noqa: E731
        return WeightPattern(self.modulus, conv(self.residues), conv(self.exceptions))

    def describe(self):
        return {
            "modulus": self.modulus,
            "residues": {str(k): scalars.scalar_text(v) for k, v in sorted(self.residues.items())},
            "exceptions": {str(k): scalars.scalar_text(v) for k, v in sorted(self.exceptions.items())},
        }


class OrbitStep(NamedTuple):
    """``A^n e_j = weight * e_index``."""

    index: int
    weight: object


class WeightedPermutationOperator:
    """``A e_j = weight(j) e_{rule.forward(j)}``.

    The weight is either a ``WeightPattern`` (bounds then exact) or an
    arbitrary callable; callables need a ``probe_horizon`` or explicit
    ``bounds`` before ``min_modulus``/``sup_norm`` can answer.
    """

    def __init__(self, rule, weight, *, mode=None, probe_horizon=None, bounds=None,
                 name="A", description=None, orbit_horizon=DEFAULT_ORBIT_HORIZON):
        self.rule = rule
        self.pattern = weight if isinstance(weight, WeightPattern) else None
        self._weight = weight
        if mode is None:
            if self.pattern is None:
                raise ConfigurationError("mode must be given for callable weights")
            mode = self.pattern.mode
        self.mode = scalars.check_mode(mode)
        self.probe_horizon = probe_horizon
        self._bounds = bounds
        self.name = name
        self._description = description
        self.orbit_horizon = orbit_horizon
        self._lock = threading.Lock()
        self._memo = {}
        self._checkpoints = {}   # (sign, j) -> [(index, weight) after c * _CHECKPOINT steps]

    def __repr__(self):
        return f"WeightedPermutationOperator({self.name!r}, {self.rule.description})"

    def weight(self, j):
        return self._weight(_check_index(j))

    def apply(self, j):
        return OrbitStep(self.rule.step(j, 1), self.weight(j))

    # -- bounds -----------------------------------------------------------

    @property
    def bounds(self):
        """``(inf_j |w_j|, sup_j |w_j|)``."""
        if self._bounds is None:
            if self.pattern is not None:
                vals = [abs(v) for v in self.pattern.attained()]
            elif self.probe_horizon:
                vals = [abs(self.weight(j)) for j in range(1, self.probe_horizon + 1)]
            else:
                raise ConfigurationError(
                    f"{self.name}: weight pattern undeclared and no probe horizon set")
            self._bounds = (min(vals), max(vals))
        return self._bounds

    @property
    def bounds_are_exact(self):
        return self.pattern is not None or self.probe_horizon is None

    def is_invertible(self):
        return self.bounds[0] > 0

    def is_unitary(self):
        lo, hi = self.bounds
        return scalars.close(lo, 1) and scalars.close(hi, 1)

    # -- orbits -----------------------------------------------------------

    def power_step(self, n, j):
        """``A^n e_j`` as an ``OrbitStep``."""
        _check_index(j)
        if n == 0:
            return OrbitStep(j, scalars.one(self.mode))
        if abs(n) > self.orbit_horizon:
            raise ConfigurationError(f"|n|={abs(n)} exceeds the orbit horizon {self.orbit_horizon}")
        key = (n, j)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if n < 0 and not self.is_invertible():
            raise DomainError(f"{self.name} is not invertible; negative powers undefined")
        sign = 1 if n > 0 else -1
        steps = abs(n)
        with self._lock:
            marks = self._checkpoints.setdefault((sign, j), [(j, scalars.one(self.mode))])
            c = min(steps // _CHECKPOINT, len(marks) - 1)
            i, w = marks[c]
        t = c * _CHECKPOINT
        while t < steps:
            if sign > 0:
                w = w * self.weight(i)
                i = self.rule.forward(i)
            else:
                i = self.rule.backward(i)
                w = w * scalars.inverse(self.weight(i))
            t += 1
            if t % _CHECKPOINT == 0:
                with self._lock:
                    if len(marks) == t // _CHECKPOINT:
                        marks.append((i, w))
        step = OrbitStep(_check_index(i), w)
        with self._lock:
            if len(self._memo) < 4 * DEFAULT_ORBIT_HORIZON:
                self._memo[key] = step
        return step

    # -- serialisation ----------------------------------------------------

    def describe(self):
        if self._description is not None:
            return dict(self._description)
        out = {"name": self.name, "rule": self.rule.kind, "params": list(self.rule.params),
               "mode": self.mode}
        if self.pattern is not None:
            out["weights"] = self.pattern.describe()
        return out


# ---------------------------------------------------------------------------
# builders


def build_operator(rule, weights, name="A", mode=None):
    if not isinstance(weights, WeightPattern):
        weights = WeightPattern.constant(weights if mode is None else scalars.to_mode(weights, mode))
    elif mode is not None:
        weights = weights.to_mode(mode)
    return WeightedPermutationOperator(rule, weights, name=name)


def example_weights(mode=EXACT):
    """Residue pattern of the explicit example: odd -> 1/2, even -> 2, except e_2 -> 1."""
    p = WeightPattern(2, {1: scalars.HALF, 0: Dyadic(2)}, {2: scalars.ONE})
    return p if mode == EXACT else p.to_mode(FLOAT)


def build_example_W(mode=EXACT):
    """``W e_j = e_{j+2}/2`` (j odd), ``2 e_{j-2}`` (j even, j > 2), ``e_1`` (j = 2)."""
    return WeightedPermutationOperator(bilateral_rule("parity"), example_weights(mode), name="W_ex")


def build_aperiodic_shift(mode=EXACT):
    """Unitary ``U e_j = e_{alpha(j)}`` with alpha the zigzag successor map."""
    return WeightedPermutationOperator(bilateral_rule("zigzag"),
                                       WeightPattern.constant(scalars.one(mode)), name="U_alpha")


def build_identity(mode=EXACT):
    return WeightedPermutationOperator(identity_rule(), WeightPattern.constant(scalars.one(mode)),
                                       name="I")


def build_block_cycle(period, mode=EXACT, weight=None):
    w = scalars.one(mode) if weight is None else scalars.to_mode(weight, mode)
    return WeightedPermutationOperator(block_cycle_rule(period), WeightPattern.constant(w),
                                       name=f"C_{period}")


# ---------------------------------------------------------------------------
# operations


def apply_power(A, n, j):
    """``A^n e_j``; negative ``n`` requires ``A`` invertible."""
    return A.power_step(n, j)


def inverse(A):
    """``A^{-1} e_{sigma(j)} = w_j^{-1} e_j``."""
    if not A.is_invertible():
        raise DomainError(f"{A.name} is not invertible (inf |w| = 0)")
    lo, hi = A.bounds
    rule = A.rule.inverse()
    weight = lambda i: scalars.inverse(A.weight(A.rule.backward(i)))  # noqa: E731
    desc = {"base": A.describe(), "transform": "inverse"}
    return WeightedPermutationOperator(
        rule, weight, mode=A.mode, bounds=(scalars.inverse(hi), scalars.inverse(lo)),
        name=f"{A.name}^-1", description=desc, orbit_horizon=A.orbit_horizon)


def adjoint(A):
    """``A^* e_{sigma(j)} = w_j e_j`` (weights are real)."""
    rule = A.rule.inverse()
    weight = lambda i: A.weight(A.rule.backward(i))  # noqa: E731
    desc = {"base": A.describe(), "transform": "adjoint"}
    return WeightedPermutationOperator(
        rule, weight, mode=A.mode, bounds=A.bounds, name=f"{A.name}*", description=desc,
        orbit_horizon=A.orbit_horizon)


def power(A, n, probe_horizon=DEFAULT_PROBE_HORIZON):
    """``A^n`` as a new operator; its bounds are probed over ``1..probe_horizon``."""
    if n < 0 and not A.is_invertible():
        raise DomainError(f"{A.name} is not invertible")
    rule = PermutationRule(lambda j: A.rule.step(j, n), lambda j: A.rule.step(j, -n),
                           f"({A.rule.description})^{n}", kind="power", params=(n,))
    weight = lambda j: A.power_step(n, j).weight  # noqa: E731
    desc = {"base": A.describe(), "transform": "power", "n": n, "probe_horizon": probe_horizon}
    return WeightedPermutationOperator(rule, weight, mode=A.mode, probe_horizon=probe_horizon,
                                       name=f"{A.name}^{n}", description=desc,
                                       orbit_horizon=A.orbit_horizon)


def norm_power_proj(A, n, s):
    """``||A^n P_s||`` = max over ``j in s`` of ``|weight of A^n e_j|`` (images are orthogonal)."""
    best = scalars.zero(A.mode)
    for j in s:
        w = abs(A.power_step(n, j).weight)
        if w > best:
            best = w
    return best


def proj_norm_power(s, A, n):
    """``||P_s A^n||``: the columns landing in ``s`` are ``sigma^{-n}(i)``, ``i in s``."""
    best = scalars.zero(A.mode)
    for i in s:
        j = A.rule.step(i, -n)
        w = abs(A.power_step(n, j).weight)
        if w > best:
            best = w
    return best


def min_modulus(A):
    """``m(A) = inf_j |w_j|``."""
    return A.bounds[0]


def sup_norm(A):
    """``||A|| = sup_j |w_j|``."""
    return A.bounds[1]


def power_min_modulus(A, n, probe_horizon=DEFAULT_PROBE_HORIZON):
    """``m(A^n)`` as the least orbit weight over ``j <= probe_horizon``."""
    return min_modulus(power(A, n, probe_horizon))


def subspace_image(A, n, s):
    """Basis indices of ``A^n(span s)``."""
    return SubspaceSpec.of(A.rule.step(j, n) for j in s)


def check_same_mode(*ops):
    modes = {op.mode for op in ops}
    if len(modes) > 1:
        raise ConfigurationError(f"operators mix modes {sorted(modes)}")
    return modes.pop()


def operator_from_description(desc, mode=None, resolve=None):
    """Inverse of ``describe``; ``resolve`` maps a base name to an operator."""
    if "transform" in desc:
        base = desc["base"]
        if isinstance(base, str):
            if resolve is None:
                raise ConfigurationError(f"cannot resolve base operator {base!r}")
            base_op = resolve(base)
        else:
            base_op = operator_from_description(base, mode=mode, resolve=resolve)
        t = desc["transform"]
        if t == "inverse":
            op = inverse(base_op)
        elif t == "adjoint":
            op = adjoint(base_op)
        elif t == "power":
            op = power(base_op, int(desc["n"]), int(desc.get("probe_horizon", DEFAULT_PROBE_HORIZON)))
        else:
            raise ConfigurationError(f"unknown transform {t!r}")
        if "name" in desc:
            op.name = desc["name"]
        return op
    mode = mode or desc.get("mode", EXACT)
    rule = rule_from_kind(desc["rule"], tuple(desc.get("params", ())))
    w = desc.get("weights", {"modulus": 1, "residues": {"0": "1"}})
    pattern = WeightPattern(
        int(w["modulus"]),
        {int(k): scalars.to_mode(v, mode) for k, v in w["residues"].items()},
        {int(k): scalars.to_mode(v, mode) for k, v in w.get("exceptions", {}).items()},
    )
    return WeightedPermutationOperator(rule, pattern, name=desc.get("name", "A"))
