"""
Finite checkers for the transitivity, hypercyclicity and chaos criteria.

Sufficient conditions are phrased through compression norms ``||W^n P_m||``
(right compressions) or ``||P_m W^n||`` (left compressions).  The abstract
approximating sequences in those conditions are always instantiated as
``P_m`` itself, so every check is deterministic.  "Tends to zero" is
decided as: below ``threshold`` at the last scheduled ``k`` and
non-increasing over the final ``window`` entries.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import operators as ops
from . import scalars
from .errors import ConfigurationError, DomainError
from .scalars import Dyadic, SubspaceSpec, section

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

DEFAULT_THRESHOLD = 1e-6
DEFAULT_WINDOW = 3

# criterion id -> the result it decides (statement, not citation)
THEOREM_MAP = {
    "orthogonality_horizon": "orthogonality hypothesis U^n(L_k) ⊥ L_k for all n >= N_k",
    "hypercyclicity": "T_{U,W} hypercyclic on B0(H) <=> ||W^{n_k} G_k||, ||W^{-n_k} D_k|| -> 0 with G_k, D_k -> P_m",
    "zero_transitivity": "T and S 0-transitive <=> ||W^{-m_j} G_j||, ||W^{n_j} D_j|| -> 0 with G_j, D_j -> P_K",
    "necessary_m": "hypercyclic T_{U,W} (or chaotic cosine family) forces m(W) < 1 < ||W||",
    "periodic_min_modulus": "P_K in closure of periodic points of S forces m(W^{-n_k}) -> 0",
    "series": "sum_l ||W^{±l n_k} P_m|| -> 0 implies T, S chaotic and the cosine family chaotic",
    "cosine_split": "||W^{±n_k} P_m|| -> 0 and ||W^{2n_k} P_E||, ||W^{-2n_k} P_R|| -> 0 imply cosine transitivity (also on B1(H))",
    "adjoint_cosine": "||P_m W^{±n_k}|| -> 0 and ||P_E W^{2n_k}||, ||P_R W^{-2n_k}|| -> 0 imply adjoint cosine transitivity",
    "adjoint_power": "||G_k W^{n_k}||, ||D_k W^{-n_k}|| -> 0 with G_k, D_k -> P_m strongly imply T*, S* transitive",
}

NECESSARY_VARIANTS = {
    # variant: (needs m(W) < 1, needs ||W|| > 1)
    "hypercyclic": (True, True),
    "cosine_chaos": (True, True),
    "periodic_T": (True, False),
    "periodic_S": (False, True),
    "cosine_periodic_S_decay": (True, False),
    "cosine_periodic_T_limit": (False, True),
    "adjoint_periodic_T": (True, False),
    "adjoint_periodic_S": (False, True),
}


@dataclass
class CriterionReport:
    criterion: str
    parameters: dict
    decay: list = field(default_factory=list)   # (k, quantity, value)
    verdict: str = INCONCLUSIVE
    witness: Optional[dict] = None
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return self.verdict == PASS

    def quantity(self, name):
        return [v for _, q, v in self.decay if q == name]

    def quantities(self):
        seen = []
        for _, q, _ in self.decay:
            if q not in seen:
                seen.append(q)
        return seen

    def to_dict(self):
        return {
            "criterion": self.criterion,
            "statement": THEOREM_MAP.get(self.criterion, ""),
            "parameters": _jsonable(self.parameters),
            "verdict": self.verdict,
            "decay": [{"k": k, "quantity": q, "value": scalars.scalar_json(v)} for k, q, v in self.decay],
            "witness": _jsonable(self.witness),
            "notes": list(self.notes),
        }

    def to_json(self, **extra):
        d = self.to_dict()
        d.update(extra)
        return json.dumps(d, indent=2, sort_keys=True, ensure_ascii=False)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "quantity", "value", "value_dyadic"])
        for k, q, v in self.decay:
            w.writerow([k, q, repr(float(v)), str(v) if isinstance(v, Dyadic) else ""])
        return buf.getvalue()

    def to_table(self):
        lines = [f"criterion: {self.criterion}   verdict: {self.verdict.upper()}"]
        if self.parameters:
            lines.append("parameters: " + ", ".join(f"{k}={_short(v)}" for k, v in self.parameters.items()))
        names = self.quantities()
        if names:
            ks = sorted({k for k, _, _ in self.decay})
            table = {(k, q): v for k, q, v in self.decay}
            width = max(14, *(len(n) for n in names))
            lines.append("k".rjust(5) + "".join(n.rjust(width + 2) for n in names))
            for k in ks:
                cells = []
                for n in names:
                    v = table.get((k, n))
                    cells.append(("" if v is None else f"{float(v):.6g}").rjust(width + 2))
                lines.append(str(k).rjust(5) + "".join(cells))
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"


def _short(v):
    if isinstance(v, (list, tuple)) and len(v) > 6:
        return f"[{v[0]}, {v[1]}, ..., {v[-1]}] ({len(v)} terms)"
    return v


def _jsonable(obj):
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Dyadic):
        return scalars.scalar_json(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, SubspaceSpec):
        return list(obj.indices)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return str(obj)


# ---------------------------------------------------------------------------
# helpers


def check_schedule(schedule, name="schedule"):
    sched = [int(n) for n in schedule]
    if not sched:
        raise ConfigurationError(f"{name} is empty")
    if sched[0] < 1:
        raise ConfigurationError(f"{name} must consist of positive integers")
    if any(b <= a for a, b in zip(sched, sched[1:])):
        raise ConfigurationError(f"{name} must be strictly increasing")
    return sched


def decays(values, threshold=DEFAULT_THRESHOLD, window=DEFAULT_WINDOW):
    """Final value below ``threshold`` and the last ``window`` values non-increasing."""
    if not values:
        return False
    if not float(values[-1]) < threshold:
        return False
    tail = values[-window:]
    return all(b <= a for a, b in zip(tail, tail[1:]))


def _as_subspace(K):
    if isinstance(K, SubspaceSpec):
        return K
    return section(int(K))


def _require_invertible(W):
    if not W.is_invertible():
        raise DomainError(f"{W.name} is not invertible")


# ---------------------------------------------------------------------------
# orthogonality hypothesis


def orthogonality_horizon(U, k, limit):
    """Least ``N`` with ``U^n(L_k) ⊥ L_k`` for every ``n`` in ``[N, limit]``, or ``None``."""
    if limit < 1:
        raise ConfigurationError("limit must be positive")
    if not U.is_unitary():
        raise DomainError(f"{U.name} is not unitary")
    base = set(range(1, k + 1))
    last_hit = 0
    for n in range(1, limit + 1):
        if any(U.rule.step(j, n) in base for j in base):
            last_hit = n
    N = last_hit + 1
    return N if N <= limit else None


def check_orthogonality(U, ks, limit):
    rows = []
    horizons = {}
    for k in ks:
        N = orthogonality_horizon(U, k, limit)
        horizons[k] = N
        rows.append((k, "N_k", Dyadic(N) if N is not None else Dyadic(-1)))
    verdict = PASS if all(v is not None for v in horizons.values()) else INCONCLUSIVE
    notes = [] if verdict == PASS else ["no horizon survives the sweep for some k (-1 marks it)"]
    return CriterionReport("orthogonality_horizon", {"operator": U.name, "ks": list(ks), "limit": limit},
                           rows, verdict, {"N_k": horizons}, notes)


# ---------------------------------------------------------------------------
# transitivity / hypercyclicity


def check_hypercyclicity_condition(W, m, n_schedule, threshold=DEFAULT_THRESHOLD,
                                   window=DEFAULT_WINDOW):
    """Track ``||W^{n_k} P_m||`` and ``||W^{-n_k} P_m||`` along the schedule."""
    sched = check_schedule(n_schedule)
    _require_invertible(W)
    Lm = section(m)
    rows, fwd, bwd = [], [], []
    for k, n in enumerate(sched, 1):
        f = ops.norm_power_proj(W, n, Lm)
        b = ops.norm_power_proj(W, -n, Lm)
        fwd.append(f)
        bwd.append(b)
        rows += [(k, "||W^n P_m||", f), (k, "||W^-n P_m||", b)]
    ok = decays(fwd, threshold, window) and decays(bwd, threshold, window)
    return CriterionReport(
        "hypercyclicity",
        {"operator": W.name, "m": m, "n_schedule": sched, "threshold": threshold, "window": window},
        rows, PASS if ok else FAIL, {"n_k": sched, "G_k": f"P_{m}", "D_k": f"P_{m}"})


def check_zero_transitivity(W, K, forward_schedule, backward_schedule,
                            threshold=DEFAULT_THRESHOLD, window=DEFAULT_WINDOW):
    """Track ``||W^{n_j} P_K||`` and ``||W^{-m_j} P_K||`` on independent schedules."""
    fs = check_schedule(forward_schedule, "forward schedule")
    bs = check_schedule(backward_schedule, "backward schedule")
    _require_invertible(W)
    K = _as_subspace(K)
    rows, fwd, bwd = [], [], []
    for j in range(1, max(len(fs), len(bs)) + 1):
        if j <= len(fs):
            f = ops.norm_power_proj(W, fs[j - 1], K)
            fwd.append(f)
            rows.append((j, "||W^n_j P_K||", f))
        if j <= len(bs):
            b = ops.norm_power_proj(W, -bs[j - 1], K)
            bwd.append(b)
            rows.append((j, "||W^-m_j P_K||", b))
    ok = decays(fwd, threshold, window) and decays(bwd, threshold, window)
    return CriterionReport(
        "zero_transitivity",
        {"operator": W.name, "K": K, "n_schedule": fs, "m_schedule": bs, "threshold": threshold},
        rows, PASS if ok else FAIL, {"n_j": fs, "m_j": bs, "G_j": "P_K", "D_j": "P_K"})


# ---------------------------------------------------------------------------
# necessary conditions


def check_necessary_m_condition(W, variant="hypercyclic"):
    """Strict comparisons ``m(W) < 1`` and/or ``1 < ||W||`` (exact in exact mode)."""
    if variant not in NECESSARY_VARIANTS:
        raise ConfigurationError(f"unknown variant {variant!r}; expected one of {sorted(NECESSARY_VARIANTS)}")
    need_m, need_norm = NECESSARY_VARIANTS[variant]
    mW = ops.min_modulus(W)
    nW = ops.sup_norm(W)
    one = scalars.one(W.mode)
    rows = [(0, "m(W)", mW), (0, "||W||", nW)]
    notes = []
    if W.is_invertible():
        Winv = ops.inverse(W)
        m_inv, n_inv = ops.min_modulus(Winv), ops.sup_norm(Winv)
        rows += [(0, "m(W^-1)", m_inv), (0, "||W^-1||", n_inv)]
        if not scalars.close(scalars.inverse(m_inv), nW):
            notes.append("duality ||W|| = 1/m(W^-1) violated")
    else:
        notes.append("W is not invertible")
    ok = True
    if need_m:
        ok = ok and scalars.less(mW, one)
    if need_norm:
        ok = ok and scalars.less(one, nW)
    if not W.bounds_are_exact:
        notes.append("bounds come from a finite probe horizon")
    return CriterionReport("necessary_m", {"operator": W.name, "variant": variant}, rows,
                           PASS if ok else FAIL, None, notes)


def check_periodic_min_modulus(W, n_schedule, probe_horizon=ops.DEFAULT_PROBE_HORIZON,
                               threshold=DEFAULT_THRESHOLD, window=DEFAULT_WINDOW):
    """Report ``m(W^{-n_k})`` next to ``m(W^{-1})^{n_k}``.

    The stated condition uses the first quantity while the bound that the
    argument actually produces involves the second; since
    ``m(W^{-n}) >= m(W^{-1})^n`` they can differ, so both are tracked and the
    verdict follows the first.
    """
    sched = check_schedule(n_schedule)
    _require_invertible(W)
    m_inv = ops.min_modulus(ops.inverse(W))
    rows, literal, derived = [], [], []
    for k, n in enumerate(sched, 1):
        a = ops.power_min_modulus(W, -n, probe_horizon)
        b = _power(m_inv, n)
        literal.append(a)
        derived.append(b)
        rows += [(k, "m(W^-n)", a), (k, "m(W^-1)^n", b)]
    ok = decays(literal, threshold, window)
    notes = [f"m(W^-n) probed over basis indices 1..{probe_horizon}"]
    if ok != decays(derived, threshold, window):
        notes.append("the two minimum-modulus quantities disagree on decay")
    return CriterionReport("periodic_min_modulus",
                           {"operator": W.name, "n_schedule": sched, "probe_horizon": probe_horizon},
                           rows, PASS if ok else FAIL, {"n_k": sched}, notes)


def _power(x, n):
    out = scalars.one(scalars.mode_of(x))
    for _ in range(n):
        out = out * x
    return out


# ---------------------------------------------------------------------------
# series condition


@dataclass(frozen=True)
class TailPolicy:
    """Certify geometric decay once ``window`` consecutive ratios are ``<= ratio``.

    The remaining tail after the last computed term ``t`` is then bounded by
    ``t * ratio / (1 - ratio)``.
    """

    window: int = 3
    ratio: float = 0.5
    max_terms: int = 64

    def __post_init__(self):
        if not 0 < self.ratio < 1:
            raise ConfigurationError(f"tail ratio must lie in (0, 1), got {self.ratio}")
        if self.window < 1 or self.max_terms < self.window + 1:
            raise ConfigurationError("tail policy window/max_terms out of range")

    @property
    def ratio_q(self):
        return Fraction(self.ratio)


@dataclass
class SeriesSum:
    terms: list
    partial: object
    tail_bound: Optional[float]

    @property
    def certified(self):
        return self.tail_bound is not None

    @property
    def total(self):
        return None if self.tail_bound is None else float(self.partial) + self.tail_bound


def certified_series(term, policy):
    """Sum ``term(1), term(2), ...`` until the policy certifies the tail."""
    r = policy.ratio_q
    terms = []
    streak = 0
    for l in range(1, policy.max_terms + 1):
        t = term(l)
        terms.append(t)
        if t == 0:
            return SeriesSum(terms, _sum(terms), 0.0)
        if l > 1:
            prev = terms[-2]
            if _frac(t) <= r * _frac(prev):
                streak += 1
            else:
                streak = 0
            if streak >= policy.window:
                tail = _frac(t) * r / (1 - r)
                return SeriesSum(terms, _sum(terms), float(tail))
    return SeriesSum(terms, _sum(terms), None)


def _frac(x):
    return x.to_fraction() if isinstance(x, Dyadic) else Fraction(float(x))


def _sum(values):
    total = scalars.zero(scalars.mode_of(values[0])) if values else 0.0
    for v in values:
        total = total + v
    return total


def check_series_condition(W, m, n_schedule, tail_policy=None, threshold=DEFAULT_THRESHOLD,
                           window=DEFAULT_WINDOW):
    """Track ``sum_l ||W^{l n_k} P_m||`` and ``sum_l ||W^{-l n_k} P_m||`` (partial + certified tail)."""
    policy = tail_policy or TailPolicy()
    sched = check_schedule(n_schedule)
    _require_invertible(W)
    Lm = section(m)
    rows, fwd, bwd = [], [], []
    uncertified = []
    for k, n in enumerate(sched, 1):
        for sign, store, label in ((1, fwd, "sum ||W^ln P_m||"), (-1, bwd, "sum ||W^-ln P_m||")):
            s = certified_series(lambda l: ops.norm_power_proj(W, sign * l * n, Lm), policy)
            if not s.certified:
                uncertified.append((k, label))
                continue
            store.append(s.total)
            rows += [(k, label, s.total), (k, label + " tail", s.tail_bound),
                     (k, label + " terms", Dyadic(len(s.terms)))]
    notes = []
    if uncertified:
        notes.append(f"geometric tail never certified for {len(uncertified)} series "
                     f"(first at k={uncertified[0][0]}: {uncertified[0][1]})")
        verdict = INCONCLUSIVE
    else:
        ok = decays(fwd, threshold, window) and decays(bwd, threshold, window)
        verdict = PASS if ok else FAIL
    return CriterionReport(
        "series",
        {"operator": W.name, "m": m, "n_schedule": sched, "tail_window": policy.window,
         "tail_ratio": policy.ratio, "threshold": threshold},
        rows, verdict, {"n_k": sched}, notes)


# ---------------------------------------------------------------------------
# split search for the cosine family


@dataclass(frozen=True)
class SplitEntry:
    k: int
    n: int
    E: SubspaceSpec
    R: SubspaceSpec

    def to_dict(self):
        return {"k": self.k, "n": self.n, "E": list(self.E.indices), "R": list(self.R.indices)}


@dataclass
class SplitWitness:
    """Per-``k`` decomposition ``L_m = E_k ⊕ R_k`` with the decay it achieves."""

    m: int
    side: str
    entries: list
    decay: list = field(default_factory=list)
    verdict: str = INCONCLUSIVE

    def __post_init__(self):
        full = set(range(1, self.m + 1))
        for e in self.entries:
            E, R = e.E.as_set(), e.R.as_set()
            if E & R or (E | R) != full:
                raise ConfigurationError(f"split at k={e.k} does not partition L_{self.m}")

    def at(self, k):
        for e in self.entries:
            if e.k == k:
                return e
        raise KeyError(k)

    def quantity(self, name):
        return [v for _, q, v in self.decay if q == name]

    def to_dict(self):
        return {"m": self.m, "side": self.side, "verdict": self.verdict,
                "entries": [e.to_dict() for e in self.entries]}


def _column_weight(W, n, j):
    return abs(W.power_step(n, j).weight)


def _row_weight(W, n, i):
    return abs(W.power_step(n, W.rule.step(i, -n)).weight)


def find_cosine_split(W, m, n_schedule, side="right", threshold=DEFAULT_THRESHOLD,
                      window=DEFAULT_WINDOW):
    """Greedy per-index split of ``L_m``.

    ``side="right"``: ``j`` goes to ``E_k`` when ``|W^{2n} e_j| <= |W^{-2n} e_j|``
    and the tracked norms are ``||W^{2n} P_E||``, ``||W^{-2n} P_R||``.
    ``side="left"`` does the same with row weights and ``||P_E W^{2n}||``,
    ``||P_R W^{-2n}||``.
    """
    sched = check_schedule(n_schedule)
    _require_invertible(W)
    if side not in ("right", "left"):
        raise ConfigurationError("side must be 'right' or 'left'")
    weight = _column_weight if side == "right" else _row_weight
    qE = "||W^2n P_E||" if side == "right" else "||P_E W^2n||"
    qR = "||W^-2n P_R||" if side == "right" else "||P_R W^-2n||"
    entries, rows, eq, rq = [], [], [], []
    zero = scalars.zero(W.mode)
    for k, n in enumerate(sched, 1):
        E, R = [], []
        fE, bR = zero, zero
        for j in range(1, m + 1):
            f = weight(W, 2 * n, j)
            b = weight(W, -2 * n, j)
            if f <= b:
                E.append(j)
                fE = max(fE, f)
            else:
                R.append(j)
                bR = max(bR, b)
        entries.append(SplitEntry(k, n, SubspaceSpec(tuple(E)), SubspaceSpec(tuple(R))))
        eq.append(fE)
        rq.append(bR)
        rows += [(k, qE, fE), (k, qR, bR)]
    ok = decays(eq, threshold, window) and decays(rq, threshold, window)
    return SplitWitness(m, side, entries, rows, PASS if ok else INCONCLUSIVE)


def check_cosine_split(W, m, n_schedule, threshold=DEFAULT_THRESHOLD, window=DEFAULT_WINDOW):
    """Both halves of the split condition plus ``||W^{±n_k} P_m|| -> 0``."""
    split = find_cosine_split(W, m, n_schedule, "right", threshold, window)
    base = check_hypercyclicity_condition(W, m, n_schedule, threshold, window)
    rows = base.decay + split.decay
    ok = base.passed and split.verdict == PASS
    verdict = PASS if ok else (INCONCLUSIVE if split.verdict != PASS and base.passed else FAIL)
    return CriterionReport("cosine_split",
                           {"operator": W.name, "m": m, "n_schedule": [e.n for e in split.entries],
                            "threshold": threshold},
                           sorted(rows, key=lambda r: r[0]), verdict, split.to_dict())


def check_adjoint_conditions(W, m, n_schedule, variant="power", threshold=DEFAULT_THRESHOLD,
                             window=DEFAULT_WINDOW):
    """Left-compression decay ``||P_m W^{±n_k}|| -> 0``.

    ``variant="power"`` targets transitivity of ``T*`` and ``S*``;
    ``variant="cosine"`` targets the adjoint cosine family and additionally
    searches a left split with ``||P_E W^{2n}||, ||P_R W^{-2n}|| -> 0``.
    """
    if variant not in ("cosine", "power"):
        raise ConfigurationError("variant must be 'cosine' or 'power'")
    sched = check_schedule(n_schedule)
    _require_invertible(W)
    Lm = section(m)
    rows, fwd, bwd = [], [], []
    for k, n in enumerate(sched, 1):
        f = ops.proj_norm_power(Lm, W, n)
        b = ops.proj_norm_power(Lm, W, -n)
        fwd.append(f)
        bwd.append(b)
        rows += [(k, "||P_m W^n||", f), (k, "||P_m W^-n||", b)]
    ok = decays(fwd, threshold, window) and decays(bwd, threshold, window)
    witness = {"n_k": sched, "G_k": f"P_{m}", "D_k": f"P_{m}"}
    notes = []
    if variant == "power":
        # canonical G_k = D_k = P_m: the finite-section distance to P_m is identically 0
        for k in range(1, len(sched) + 1):
            rows.append((k, "||G_k - P_m|| (finite section)", scalars.zero(W.mode)))
        notes.append("auxiliary clauses of this criterion are not checked here; "
                     "checked: the two displayed limits and the strong limit G_k, D_k -> P_m")
    else:
        split = find_cosine_split(W, m, sched, "left", threshold, window)
        rows += split.decay
        witness["split"] = split.to_dict()
        ok = ok and split.verdict == PASS
    return CriterionReport(f"adjoint_{variant}",
                           {"operator": W.name, "m": m, "n_schedule": sched, "threshold": threshold},
                           sorted(rows, key=lambda r: r[0]), PASS if ok else FAIL, witness, notes)
