"""
Declarative scenarios: a small sectioned key-value format describing
operators, operator pairs and runs, plus the runner that executes them and
writes reports.

Grammar (see docs/scenario-format.md for the full description)::

    scenario = example34          # top-level settings come first
    mode = exact

    [operator W]
    rule = parity
    weights = mod 2 {1: 1/2, 0: 2}
    exceptions = {2: 1}

    [system S]
    U = U
    W = W

    [run hyper]
    kind = criterion
    criterion = hypercyclicity
    system = S
    m = 2
    schedule = 4..33
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass, field
from importlib import resources

from . import criteria as cr
from . import dynamics as dyn
from . import finite_rank as fr
from . import operators as ops
from . import scalars
from . import witnesses as wt
from .errors import ConfigParseError, ConfigurationError, HyperlabError
from .finite_rank import FiniteRankOperator
from .scalars import EXACT, FLOAT, section

FORMATS = ("json", "csv", "table")
RUN_KINDS = ("criterion", "witness", "orbit", "norms")
WITNESS_KINDS = ("transitive", "periodic", "cosine", "adjoint-cosine")
FIXTURES = ("example34", "unitary-counterexample", "aperiodic-probe")

_SECTION = re.compile(r"^\[\s*(\w+)\s+([A-Za-z_][\w.-]*)\s*\]$")
_KEY = re.compile(r"^([A-Za-z_][\w-]*)\s*=\s*(.*)$")
_RANGE = re.compile(r"^(-?\d+)\s*\.\.\s*(-?\d+)(?:\s+by\s+(\d+))?$")
_MOD = re.compile(r"^mod\s+(\d+)\s*(\{.*\})$")


@dataclass
class Section:
    kind: str
    name: str
    line: int
    values: dict = field(default_factory=dict)   # key -> (text, line)

    def get(self, key, default=None):
        return self.values[key][0] if key in self.values else default

    def line_of(self, key):
        return self.values[key][1] if key in self.values else self.line

    def require(self, key):
        if key not in self.values:
            raise ConfigParseError(f"[{self.kind} {self.name}] is missing '{key}'", self.line)
        return self.values[key][0]


@dataclass
class RunSpec:
    id: str
    kind: str
    line: int
    params: dict


@dataclass
class ScenarioConfig:
    name: str
    text: str
    mode: str
    settings: dict
    operators: dict        # name -> Section
    systems: dict          # name -> (U name, W name)
    runs: list
    output: str = "reports"
    formats: tuple = ("json",)

    @property
    def sha256(self):
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()

    def build_operators(self, mode=None):
        return _build_all(self.operators, mode or self.mode)

    def build_system(self, name, built):
        u, w = self.systems[name]
        return dyn.ElementarySystem(built[u], built[w],
                                    support_cap=self.settings["support_cap"],
                                    horizon_cap=self.settings["horizon_cap"])


# ---------------------------------------------------------------------------
# value parsers


def parse_schedule(text):
    """``a..b``, ``a..b by s`` or a comma list; strictly increasing positive integers."""
    text = text.strip()
    m = _RANGE.match(text)
    if m:
        a, b, s = int(m.group(1)), int(m.group(2)), int(m.group(3) or 1)
        values = list(range(a, b + 1, s))
    else:
        try:
            values = [int(x) for x in text.split(",") if x.strip()]
        except ValueError:
            raise ConfigurationError(f"bad schedule {text!r}") from None
    return cr.check_schedule(values)


def parse_int_list(text):
    m = _RANGE.match(text.strip())
    if m:
        return list(range(int(m.group(1)), int(m.group(2)) + 1, int(m.group(3) or 1)))
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigurationError(f"bad integer list {text!r}") from None


def parse_mapping(text, mode):
    """``{k: v, ...}`` with integer keys and scalar values."""
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ConfigurationError(f"expected {{key: value, ...}}, got {text!r}")
    out = {}
    body = text[1:-1].strip()
    if not body:
        return out
    for item in body.split(","):
        if ":" not in item:
            raise ConfigurationError(f"bad mapping item {item.strip()!r}")
        k, v = item.split(":", 1)
        try:
            key = int(k)
        except ValueError:
            raise ConfigurationError(f"mapping key {k.strip()!r} is not an integer") from None
        if key in out:
            raise ConfigurationError(f"duplicate mapping key {key}")
        out[key] = _scalar(v, mode)
    return out


def _scalar(text, mode):
    try:
        return scalars.to_mode(text.strip(), mode)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigurationError(f"bad scalar {text.strip()!r}: {exc}") from None


def parse_weights(text, exceptions, mode):
    m = _MOD.match(text.strip())
    if m:
        residues = parse_mapping(m.group(2), mode)
        modulus = int(m.group(1))
    else:
        residues, modulus = {0: _scalar(text, mode)}, 1
    exc = parse_mapping(exceptions, mode) if exceptions else {}
    return ops.WeightPattern(modulus, residues, exc)


def parse_finite_rank(text, mode):
    """``zero``, ``proj m``, ``rank1 i j [c]`` or ``entries i,j,v; i,j,v; ...``."""
    words = text.strip().split(None, 1)
    if not words:
        raise ConfigurationError("empty operator specification")
    head, rest = words[0], (words[1] if len(words) > 1 else "")
    try:
        if head == "zero" and not rest:
            return FiniteRankOperator.zero(mode)
        if head == "proj":
            return fr.projection_operator(section(int(rest)), mode)
        if head == "rank1":
            parts = rest.split()
            c = _scalar(parts[2], mode) if len(parts) > 2 else scalars.one(mode)
            return FiniteRankOperator.rank_one(int(parts[0]), int(parts[1]), c, mode)
        if head == "entries":
            entries = {}
            for item in rest.split(";"):
                if not item.strip():
                    continue
                i, j, v = (x.strip() for x in item.split(","))
                key = (int(i), int(j))
                if key in entries:
                    raise ConfigurationError(f"duplicate entry {key}")
                if key[0] < 1 or key[1] < 1:
                    raise ConfigurationError(f"entry indices must be positive, got {key}")
                entries[key] = _scalar(v, mode)
            return FiniteRankOperator(entries, mode)
    except (ValueError, IndexError):
        raise ConfigurationError(f"bad finite-rank operator {text!r}") from None
    raise ConfigurationError(f"unknown finite-rank operator {text!r}")


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise ConfigurationError(f"expected a number, got {text!r}") from None
    if not v > 0:
        raise ConfigurationError(f"expected a positive number, got {text!r}")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise ConfigurationError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise ConfigurationError(f"expected a positive integer, got {text!r}")
    return v


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise ConfigurationError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise ConfigurationError(f"expected a non-negative integer, got {text!r}")
    return v


def _choice(*options):
    def conv(text):
        if text not in options:
            raise ConfigurationError(f"expected one of {', '.join(options)}, got {text!r}")
        return text
    return conv


def _formats(text):
    out = tuple(x.strip() for x in text.split(",") if x.strip())
    for f in out:
        if f not in FORMATS:
            raise ConfigurationError(f"unknown format {f!r}; expected {', '.join(FORMATS)}")
    return out


def _identity(text):
    return text


# ---------------------------------------------------------------------------
# parsing


_SETTINGS = {
    "scenario": (_identity, None),
    "mode": (_choice(EXACT, FLOAT), EXACT),
    "threshold": (_positive_float, cr.DEFAULT_THRESHOLD),
    "window": (_positive_int, cr.DEFAULT_WINDOW),
    "horizon_cap": (_positive_int, dyn.DEFAULT_HORIZON_CAP),
    "support_cap": (_positive_int, fr.DEFAULT_SUPPORT_CAP),
    "probe_horizon": (_positive_int, ops.DEFAULT_PROBE_HORIZON),
    "tail_window": (_positive_int, 3),
    "tail_ratio": (_positive_float, 0.5),
    "tail_max_terms": (_positive_int, 64),
    "output": (_identity, "reports"),
    "formats": (_formats, ("json",)),
}

# run kind -> {key: converter}; "_required" lists mandatory keys
_RUN_KEYS = {
    "criterion": {
        "criterion": _choice(*cr.THEOREM_MAP), "system": _identity, "operator": _identity,
        "m": _positive_int, "schedule": parse_schedule, "backward_schedule": parse_schedule,
        "ks": parse_int_list, "limit": _positive_int, "variant": _identity,
        "threshold": _positive_float, "window": _positive_int, "probe_horizon": _positive_int,
    },
    "witness": {
        "witness": _choice(*WITNESS_KINDS), "system": _identity, "m": _positive_int,
        "schedule": parse_schedule, "n": _positive_int, "tol": _positive_float,
        "F": _identity, "G": _identity, "k": parse_int_list,
    },
    "orbit": {
        "system": _identity, "start": _identity, "horizon": _nonneg_int, "targets": _identity,
        "direction": _choice("forward", "backward", "cosine"), "norm": _choice("operator", "trace"),
    },
    "norms": {
        "operator": _identity, "system": _identity, "m": _positive_int, "powers": parse_int_list,
        "side": _choice("right", "left"),
    },
}

_REQUIRED = {
    ("criterion", "hypercyclicity"): ("m", "schedule"),
    ("criterion", "zero_transitivity"): ("m", "schedule"),
    ("criterion", "necessary_m"): (),
    ("criterion", "periodic_min_modulus"): ("schedule",),
    ("criterion", "series"): ("m", "schedule"),
    ("criterion", "cosine_split"): ("m", "schedule"),
    ("criterion", "adjoint_cosine"): ("m", "schedule"),
    ("criterion", "adjoint_power"): ("m", "schedule"),
    ("criterion", "orthogonality_horizon"): ("ks", "limit"),
    ("witness", "transitive"): ("system", "m", "schedule", "F", "G"),
    ("witness", "periodic"): ("system", "n", "F"),
    ("witness", "cosine"): ("system", "m", "schedule", "F", "G"),
    ("witness", "adjoint-cosine"): ("system", "m", "schedule", "F", "G"),
    ("orbit", None): ("system", "start", "horizon"),
    ("norms", None): ("m", "powers"),
}


def _sections(text):
    top = Section("settings", "", 0)
    sections = [top]
    current = top
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            m = _SECTION.match(line)
            if not m:
                raise ConfigParseError(f"malformed section header {line!r}", lineno)
            kind, name = m.group(1), m.group(2)
            if kind not in ("operator", "system", "run"):
                raise ConfigParseError(f"unknown section kind {kind!r}", lineno)
            if (kind, name) in seen:
                raise ConfigParseError(f"duplicate section [{kind} {name}]", lineno)
            seen.add((kind, name))
            current = Section(kind, name, lineno)
            sections.append(current)
            continue
        m = _KEY.match(line)
        if not m:
            raise ConfigParseError(f"expected 'key = value', got {line!r}", lineno)
        key, value = m.group(1), m.group(2).strip()
        if key in current.values:
            raise ConfigParseError(f"duplicate key {key!r}", lineno)
        if not value:
            raise ConfigParseError(f"empty value for {key!r}", lineno)
        current.values[key] = (value, lineno)
    return sections


def _convert(section, key, conv):
    try:
        return conv(section.values[key][0])
    except ConfigParseError:
        raise
    except (ConfigurationError, ValueError) as exc:
        raise ConfigParseError(f"{key}: {exc}", section.line_of(key)) from None


def _build_operator(sec, mode, resolve):
    name = sec.get("label", sec.name)
    if "base" in sec.values:
        extra = set(sec.values) - {"base", "transform", "n", "probe_horizon", "label"}
        if extra:
            raise ConfigParseError(f"unexpected keys for a derived operator: {sorted(extra)}", sec.line)
        transform = sec.get("transform", "adjoint")
        base = resolve(sec.get("base"), sec.line_of("base"))
        try:
            if transform == "adjoint":
                op = ops.adjoint(base)
            elif transform == "inverse":
                op = ops.inverse(base)
            elif transform == "power":
                n = _convert(sec, "n", int) if "n" in sec.values else None
                if n is None:
                    raise ConfigParseError("power transform needs 'n'", sec.line)
                ph = _convert(sec, "probe_horizon", _positive_int) if "probe_horizon" in sec.values \
                    else ops.DEFAULT_PROBE_HORIZON
                op = ops.power(base, n, ph)
            else:
                raise ConfigParseError(f"unknown transform {transform!r}", sec.line_of("transform"))
        except HyperlabError as exc:
            if isinstance(exc, ConfigParseError):
                raise
            raise ConfigParseError(str(exc), sec.line) from None
        op.name = name
        return op
    extra = set(sec.values) - {"rule", "weights", "exceptions", "label"}
    if extra:
        raise ConfigParseError(f"unexpected keys for an operator: {sorted(extra)}", sec.line)
    rule_text = sec.require("rule").split()
    try:
        kind = {"cycle": "block_cycle"}.get(rule_text[0], rule_text[0])
        rule = ops.rule_from_kind(kind, tuple(rule_text[1:]))
    except (ConfigurationError, ValueError) as exc:
        raise ConfigParseError(f"rule: {exc}", sec.line_of("rule")) from None
    try:
        pattern = parse_weights(sec.get("weights", "1"), sec.get("exceptions"), mode)
    except (ConfigurationError, ValueError) as exc:
        key = "exceptions" if "exceptions" in str(exc) else "weights"
        raise ConfigParseError(f"bad weight rule: {exc}", sec.line_of(key)) from None
    return ops.WeightedPermutationOperator(rule, pattern, name=name)


def _build_all(sections, mode):
    built = {}
    visiting = set()

    def resolve(name, line):
        if name in built:
            return built[name]
        if name not in sections:
            raise ConfigParseError(f"unknown operator {name!r}", line)
        if name in visiting:
            raise ConfigParseError(f"operator {name!r} is defined in terms of itself", line)
        visiting.add(name)
        built[name] = _build_operator(sections[name], mode, resolve)
        visiting.discard(name)
        return built[name]

    for name, sec in sections.items():
        resolve(name, sec.line)
    return built


def parse_config(text, default_name="scenario"):
    """Parse and validate a scenario; every error carries its line number."""
    sections = _sections(text)
    top = sections[0]
    settings = {}
    for key in top.values:
        if key not in _SETTINGS:
            raise ConfigParseError(f"unknown setting {key!r}", top.line_of(key))
    for key, (conv, default) in _SETTINGS.items():
        settings[key] = _convert(top, key, conv) if key in top.values else default
    mode = settings["mode"]
    name = settings["scenario"] or default_name
    if not re.match(r"^[\w.-]+$", name):
        raise ConfigParseError(f"scenario name {name!r} is not usable as a directory name",
                               top.line_of("scenario"))
    if not 0 < settings["tail_ratio"] < 1:
        raise ConfigParseError("tail_ratio must lie in (0, 1)", top.line_of("tail_ratio"))

    op_sections = {s.name: s for s in sections if s.kind == "operator"}
    built = _build_all(op_sections, mode)

    systems = {}
    for sec in (s for s in sections if s.kind == "system"):
        extra = set(sec.values) - {"U", "W"}
        if extra:
            raise ConfigParseError(f"unexpected keys for a system: {sorted(extra)}", sec.line)
        u, w = sec.require("U"), sec.require("W")
        for key, ref in (("U", u), ("W", w)):
            if ref not in built:
                raise ConfigParseError(f"unknown operator {ref!r}", sec.line_of(key))
        try:
            dyn.ElementarySystem(built[u], built[w])
        except HyperlabError as exc:
            raise ConfigParseError(f"system {sec.name}: {exc}", sec.line) from None
        systems[sec.name] = (u, w)

    runs = []
    for sec in (s for s in sections if s.kind == "run"):
        runs.append(_parse_run(sec, mode, op_sections, systems))
    return ScenarioConfig(name, text, mode, settings, op_sections, systems, runs,
                          settings["output"], settings["formats"])


def _parse_run(sec, mode, operators, systems):
    kind = sec.require("kind")
    if kind not in RUN_KINDS:
        raise ConfigParseError(f"unknown run kind {kind!r}", sec.line_of("kind"))
    schema = _RUN_KEYS[kind]
    params = {}
    for key in sec.values:
        if key == "kind":
            continue
        if key not in schema:
            raise ConfigParseError(f"unexpected key {key!r} for a {kind} run", sec.line_of(key))
        params[key] = _convert(sec, key, schema[key])
    sub = params.get(kind) if kind in ("criterion", "witness") else None
    if kind in ("criterion", "witness") and sub is None:
        raise ConfigParseError(f"[run {sec.name}] is missing '{kind}'", sec.line)
    for key in _REQUIRED[(kind, sub)]:
        if key not in params:
            raise ConfigParseError(f"[run {sec.name}] is missing '{key}'", sec.line)
    if "system" in params:
        if params["system"] not in systems:
            raise ConfigParseError(f"unknown system {params['system']!r}", sec.line_of("system"))
    if "operator" in params:
        if params["operator"] not in operators:
            raise ConfigParseError(f"unknown operator {params['operator']!r}", sec.line_of("operator"))
    if kind in ("criterion", "norms") and "system" not in params and "operator" not in params:
        raise ConfigParseError(f"[run {sec.name}] needs 'system' or 'operator'", sec.line)
    if sub == "zero_transitivity" and "backward_schedule" not in params:
        params["backward_schedule"] = params["schedule"]
    if sub == "necessary_m" and "variant" in params and params["variant"] not in cr.NECESSARY_VARIANTS:
        raise ConfigParseError(f"unknown variant {params['variant']!r}", sec.line_of("variant"))
    if sub in ("adjoint_cosine", "adjoint_power") and "variant" in params:
        raise ConfigParseError("the adjoint variant is chosen by the criterion id", sec.line_of("variant"))
    for key in ("F", "G", "start"):
        if key in params:
            _convert(sec, key, lambda t: parse_finite_rank(t, mode))
    if "targets" in params:
        for t in params["targets"].split("|"):
            _convert(sec, "targets", lambda _: parse_finite_rank(t, mode))
    return RunSpec(sec.name, kind, sec.line, params)


def load_text(source):
    """Path on disk, or the name of a shipped fixture."""
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            return fh.read(), os.path.splitext(os.path.basename(source))[0]
    stem = source[:-len(".scenario")] if source.endswith(".scenario") else source
    if stem in FIXTURES:
        return fixture_text(stem), stem
    raise FileNotFoundError(f"no scenario file or fixture named {source!r}")


def fixture_text(name):
    return resources.files("hyperlab").joinpath("fixtures", f"{name}.scenario").read_text("utf-8")


def load_config(source):
    text, stem = load_text(source)
    return parse_config(text, default_name=stem)


# ---------------------------------------------------------------------------
# running


@dataclass
class TableReport:
    """Plain tabular result (orbit profiles, orbit approach, raw compression norms)."""

    kind: str
    parameters: dict
    columns: list
    rows: list
    verdict: str = "complete"
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {"kind": self.kind, "parameters": cr._jsonable(self.parameters), "verdict": self.verdict,
                "columns": list(self.columns),
                "rows": [[_cell_json(c) for c in row] for row in self.rows], "notes": list(self.notes)}

    def to_json(self, **extra):
        d = self.to_dict()
        d.update(extra)
        return json.dumps(d, indent=2, sort_keys=True, ensure_ascii=False)

    def to_csv(self):
        import csv
        import io
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_cell_text(c) for c in row])
        return buf.getvalue()

    def to_table(self):
        lines = [f"{self.kind}   verdict: {self.verdict.upper()}"]
        width = max([12] + [len(c) for c in self.columns])
        lines.append("".join(c.rjust(width + 2) for c in self.columns))
        for row in self.rows:
            lines.append("".join(_cell_text(c, short=True).rjust(width + 2) for c in row))
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"


def _cell_json(c):
    if isinstance(c, scalars.Dyadic):
        return scalars.scalar_json(c)
    return c


def _cell_text(c, short=False):
    if c is None:
        return ""
    if isinstance(c, float):
        return f"{c:.6g}" if short else repr(c)
    return str(c)


@dataclass
class RunResult:
    run_id: str
    kind: str
    status: str                 # "ok" or "error"
    verdict: str = ""
    report: object = None
    error: str = ""
    paths: list = field(default_factory=list)


def _run_criterion(cfg, run, built, mode):
    p = run.params
    s = cfg.settings
    sys_ = cfg.build_system(p["system"], built) if "system" in p else None
    W = built[p["operator"]] if "operator" in p else sys_.W
    th = p.get("threshold", s["threshold"])
    win = p.get("window", s["window"])
    c = p["criterion"]
    if c == "orthogonality_horizon":
        U = built[p["operator"]] if "operator" in p else sys_.U
        return cr.check_orthogonality(U, p["ks"], p["limit"])
    if c == "hypercyclicity":
        return cr.check_hypercyclicity_condition(W, p["m"], p["schedule"], th, win)
    if c == "zero_transitivity":
        return cr.check_zero_transitivity(W, p["m"], p["schedule"], p["backward_schedule"], th, win)
    if c == "necessary_m":
        return cr.check_necessary_m_condition(W, p.get("variant", "hypercyclic"))
    if c == "periodic_min_modulus":
        return cr.check_periodic_min_modulus(W, p["schedule"], p.get("probe_horizon", s["probe_horizon"]),
                                             th, win)
    if c == "series":
        return cr.check_series_condition(W, p["m"], p["schedule"], _policy(s), th, win)
    if c == "cosine_split":
        return cr.check_cosine_split(W, p["m"], p["schedule"], th, win)
    if c in ("adjoint_cosine", "adjoint_power"):
        return cr.check_adjoint_conditions(W, p["m"], p["schedule"], c.split("_", 1)[1], th, win)
    raise ConfigurationError(f"unknown criterion {c!r}")


def _policy(settings):
    return cr.TailPolicy(settings["tail_window"], settings["tail_ratio"], settings["tail_max_terms"])


def _run_witness(cfg, run, built, mode):
    p = run.params
    sys_ = cfg.build_system(p["system"], built)
    F = parse_finite_rank(p["F"], mode)
    G = parse_finite_rank(p["G"], mode) if "G" in p else None
    w = p["witness"]
    ks = p.get("k")
    if w == "transitive":
        return wt.transitive_witness(sys_, F, G, p["m"], p["schedule"], p.get("tol", 1e-6))
    if w == "periodic":
        return wt.periodic_witness(sys_, F, p["n"], p.get("tol", 2.0**-40), _policy(cfg.settings),
                                   p.get("m"))
    side = "right" if w == "cosine" else "left"
    split = cr.find_cosine_split(sys_.W, p["m"], p["schedule"], side, cfg.settings["threshold"],
                                 cfg.settings["window"])
    if w == "cosine":
        return wt.cosine_witness(sys_, F, G, split, ks, p.get("tol", 1e-4))
    return wt.adjoint_cosine_witness(sys_, F, G, split, ks, p.get("tol", 1e-4))


def _run_orbit(cfg, run, built, mode):
    p = run.params
    sys_ = cfg.build_system(p["system"], built)
    start = parse_finite_rank(p["start"], mode)
    horizon = p["horizon"]
    which = p.get("norm", "operator")
    direction = p.get("direction", "forward")
    params = {"system": p["system"], "start": p["start"], "horizon": horizon, "norm": which,
              "direction": direction}
    if horizon > sys_.horizon_cap:
        return TableReport("orbit", params, [], [], cr.INCONCLUSIVE,
                           [f"horizon {horizon} exceeds the cap {sys_.horizon_cap}; nothing computed"])
    if "targets" in p:
        targets = [parse_finite_rank(t, mode) for t in p["targets"].split("|")]
        names = [t.strip() for t in p["targets"].split("|")]
        rows = [(names[i], n, d) for i, n, d in wt.orbit_approach(sys_, start, targets, horizon)]
        return TableReport("orbit-approach", params, ["target", "best_n", "distance"], rows)
    rows = dyn.orbit_profile(sys_, start, horizon, which, direction)
    return TableReport("orbit", params, ["n", "norm", "norm_exact"], [list(r) for r in rows])


def _run_norms(cfg, run, built, mode):
    p = run.params
    W = built[p["operator"]] if "operator" in p else cfg.build_system(p["system"], built).W
    side = p.get("side", "right")
    K = section(p["m"])
    rows = []
    for n in p["powers"]:
        v = ops.norm_power_proj(W, n, K) if side == "right" else ops.proj_norm_power(K, W, n)
        rows.append([n, v])
    label = f"||W^n P_{p['m']}||" if side == "right" else f"||P_{p['m']} W^n||"
    return TableReport("norms", {"operator": W.name, "m": p["m"], "side": side}, ["n", label], rows)


_RUNNERS = {"criterion": _run_criterion, "witness": _run_witness, "orbit": _run_orbit,
            "norms": _run_norms}


def execute(cfg, mode=None, kinds=None, run_ids=None):
    """Run the selected runs and return ``RunResult`` objects (no files written)."""
    mode = mode or cfg.mode
    built = cfg.build_operators(mode)
    results = []
    for run in cfg.runs:
        if kinds is not None and run.kind not in kinds:
            continue
        if run_ids is not None and run.id not in run_ids:
            continue
        try:
            report = _RUNNERS[run.kind](cfg, run, built, mode)
            results.append(RunResult(run.id, run.kind, "ok", report.verdict, report))
        except HyperlabError as exc:
            results.append(RunResult(run.id, run.kind, "error", error=str(exc)))
    return results


def _render(report, fmt, extra):
    if fmt == "json":
        return report.to_json(**extra) + "\n"
    if fmt == "csv":
        return report.to_csv()
    return report.to_table()


def run_scenario(cfg, out=None, formats=None, mode=None, kinds=None, run_ids=None):
    """Execute and write ``<out>/<scenario>/<run-id>.<fmt>`` plus an ``index.json``.

    Returns ``(exit_status, results)``; status is 0 unless some run raised.
    Verdicts (pass/fail/inconclusive) are results and never change it.
    """
    mode = mode or cfg.mode
    formats = tuple(formats or cfg.formats)
    out = out if out is not None else cfg.output
    results = execute(cfg, mode, kinds, run_ids)
    base = os.path.join(out, cfg.name)
    os.makedirs(base, exist_ok=True)
    common = {"scenario": cfg.name, "config_sha256": cfg.sha256, "mode": mode,
              "theorem_map": cr.THEOREM_MAP}
    for r in results:
        if r.status != "ok":
            continue
        extra = dict(common, run_id=r.run_id, run_kind=r.kind)
        for fmt in formats:
            path = os.path.join(base, f"{r.run_id}.{fmt}")
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(_render(r.report, fmt, extra))
            r.paths.append(path)
    index = dict(common, runs=[{"run_id": r.run_id, "kind": r.kind, "status": r.status,
                                "verdict": r.verdict, "error": r.error,
                                "files": [os.path.basename(p) for p in r.paths]} for r in results])
    with open(os.path.join(base, "index.json"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(index, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    status = 0 if all(r.status == "ok" for r in results) else 2
    return status, results
