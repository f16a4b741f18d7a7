"""Scenario files: YAML documents listing basket experiments.

Grammar (one mapping per entry under ``scenarios``)::

    scenarios:
      - name: Scenario 1            # required, unique
        spots: [100, 120]           # required, > 0
        vols: [0.2, 0.3]            # required, >= 0
        weights: [-1, 1]            # required
        correlation: [0.9]          # full matrix, upper-triangle list or scalar
        rate: 0.03                  # default 0
        horizon: 1.0                # default 1
        moneyness: [0.8, 1.0]       # K = moneyness * B(0) ...
        strikes: [16, 20]           # ... or absolute strikes (never both)
        laws: [exp1, gamma22]       # or a single `law:`; "lognormal" for the log-normal model
        group: pooled               # optional label for C1/C2 grouping
        mc: {paths: 1000000, seed: 42}
"""
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import yaml

from .exceptions import BasketError, ScenarioParseError
from .laws import BUILTIN_LAWS
from .moments import BasketSpec

KNOWN_FIELDS = {"name", "spots", "vols", "weights", "correlation", "rate", "horizon",
                "moneyness", "strikes", "laws", "law", "group", "mc"}
LAW_NAMES = ("lognormal",) + BUILTIN_LAWS
BUNDLED = {"table2": "table2.yaml", "scenarios.table2": "table2.yaml"}


@dataclass
class Scenario:
    name: str
    spec: BasketSpec
    strikes: list
    laws: list
    moneyness: Optional[list] = None
    group: Optional[str] = None
    mc_paths: Optional[int] = None
    mc_seed: Optional[int] = None
    line: Optional[int] = field(default=None, compare=False)

    @property
    def group_key(self):
        if self.group:
            return self.group
        return self.name if len(self.strikes) > 1 else "pooled"


def _construct(node):
    loader = yaml.SafeLoader("")
    try:
        return loader.construct_object(node, deep=True)
    finally:
        loader.dispose()


def _number_list(value, fname, scen, line):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value]
    if not isinstance(value, list) or not value:
        raise ScenarioParseError("expected a non-empty list of numbers", line, fname, scen)
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ScenarioParseError(f"expected a number, got {v!r}", line, fname, scen)
        out.append(float(v))
    return out


def _parse_one(node, index):
    if not isinstance(node, yaml.MappingNode):
        raise ScenarioParseError("each scenario must be a mapping", node.start_mark.line + 1)
    fields, lines = {}, {}
    for key_node, val_node in node.value:
        key = key_node.value
        if key not in KNOWN_FIELDS:
            raise ScenarioParseError("unknown field", key_node.start_mark.line + 1, key)
        fields[key] = _construct(val_node)
        lines[key] = val_node.start_mark.line + 1
    start = node.start_mark.line + 1
    name = str(fields.get("name", f"scenario-{index + 1}"))

    def need(key):
        if key not in fields:
            raise ScenarioParseError("missing required field", start, key, name)
        return fields[key]

    spots = _number_list(need("spots"), "spots", name, lines["spots"])
    vols = _number_list(need("vols"), "vols", name, lines["vols"])
    weights = _number_list(need("weights"), "weights", name, lines["weights"])
    corr = fields.get("correlation", 1.0 if len(spots) == 1 else None)
    if corr is None:
        raise ScenarioParseError("missing required field", start, "correlation", name)
    rate = fields.get("rate", 0.0)
    horizon = fields.get("horizon", 1.0)
    for key, val in (("rate", rate), ("horizon", horizon)):
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ScenarioParseError(f"expected a number, got {val!r}", lines.get(key, start), key, name)
    try:
        spec = BasketSpec(weights, spots, vols, corr, float(rate), float(horizon), 0.0)
    except BasketError as exc:
        raise ScenarioParseError(str(exc), lines.get("correlation", start), "basket", name) from None
    if "moneyness" in fields and "strikes" in fields:
        later = max(("moneyness", "strikes"), key=lines.get)
        raise ScenarioParseError("give either moneyness or strikes, not both", lines[later], later, name)
    moneyness = None
    if "moneyness" in fields:
        moneyness = _number_list(fields["moneyness"], "moneyness", name, lines["moneyness"])
        b0 = spec.initial_value
        strikes = [mny * b0 for mny in moneyness]
    elif "strikes" in fields:
        strikes = _number_list(fields["strikes"], "strikes", name, lines["strikes"])
    else:
        raise ScenarioParseError("missing strikes or moneyness", start, "strikes", name)
    if "laws" in fields and "law" in fields:
        later = max(("law", "laws"), key=lines.get)
        raise ScenarioParseError("give either law or laws, not both", lines[later], later, name)
    laws = fields.get("laws", fields.get("law", "lognormal"))
    if isinstance(laws, str):
        laws = [laws]
    lkey = "laws" if "laws" in fields else "law"
    if not isinstance(laws, list) or not laws:
        raise ScenarioParseError("expected a law name or list of names", lines.get(lkey, start), lkey, name)
    for law in laws:
        if law not in LAW_NAMES:
            raise ScenarioParseError(f"unknown law {law!r}; expected one of {', '.join(LAW_NAMES)}",
                                     lines.get(lkey, start), lkey, name)
    mc = fields.get("mc") or {}
    if not isinstance(mc, dict) or set(mc) - {"paths", "seed"}:
        raise ScenarioParseError("mc must be a mapping with keys paths, seed", lines.get("mc", start), "mc", name)
    for key in mc:
        if isinstance(mc[key], bool) or not isinstance(mc[key], int) or mc[key] < (1 if key == "paths" else 0):
            raise ScenarioParseError(f"mc.{key} must be a non-negative integer", lines["mc"], "mc", name)
    group = fields.get("group")
    return Scenario(name, spec, strikes, list(laws), moneyness, None if group is None else str(group),
                    mc.get("paths"), mc.get("seed"), start)


def parse_scenarios(text):
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioParseError(f"invalid YAML: {getattr(exc, 'problem', exc)}",
                                 mark.line + 1 if mark else None) from None
    if root is None:
        raise ScenarioParseError("scenario file is empty", 1)
    if not isinstance(root, yaml.MappingNode):
        raise ScenarioParseError("top level must be a mapping with a 'scenarios' list", root.start_mark.line + 1)
    entries = None
    for key_node, val_node in root.value:
        if key_node.value == "scenarios":
            entries = val_node
        else:
            raise ScenarioParseError("unknown top-level field", key_node.start_mark.line + 1, key_node.value)
    if entries is None or not isinstance(entries, yaml.SequenceNode) or not entries.value:
        line = entries.start_mark.line + 1 if entries is not None else 1
        raise ScenarioParseError("'scenarios' must be a non-empty list", line, "scenarios")
    out = [_parse_one(node, i) for i, node in enumerate(entries.value)]
    names = [s.name for s in out]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise ScenarioParseError(f"duplicate scenario names: {', '.join(sorted(dup))}", field="name")
    return out


def load_scenarios(path):
    """Read a scenario file; the name ``table2`` resolves to the bundled file."""
    if str(path) in BUNDLED:
        text = resources.files("basketmm").joinpath("data", BUNDLED[str(path)]).read_text(encoding="utf-8")
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ScenarioParseError(f"cannot read scenario file: {exc.strerror}", field=str(path)) from None
    return parse_scenarios(text)


def dump_scenarios(scenarios):
    docs = []
    for sc in scenarios:
        spec = sc.spec
        entry = {
            "name": sc.name,
            "spots": [float(v) for v in spec.spots],
            "vols": [float(v) for v in spec.vols],
            "weights": [float(v) for v in spec.weights],
            "correlation": [[float(v) for v in row] for row in spec.corr],
            "rate": spec.rate,
            "horizon": spec.horizon,
        }
        if sc.moneyness is not None:
            entry["moneyness"] = list(sc.moneyness)
        else:
            entry["strikes"] = list(sc.strikes)
        entry["laws"] = list(sc.laws)
        if sc.group:
            entry["group"] = sc.group
        mc = {k: v for k, v in (("paths", sc.mc_paths), ("seed", sc.mc_seed)) if v is not None}
        if mc:
            entry["mc"] = mc
        docs.append(entry)
    return yaml.safe_dump({"scenarios": docs}, sort_keys=False, default_flow_style=None)
