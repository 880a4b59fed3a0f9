"""Readers and writers for model files, composition sets and profile logs.

Model and composition documents are JSON with a ``formatVersion`` field;
operational profiles are CSV (see ``docs/formats.md``).
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Union

from .availability import DomainError, ServiceProfile
from .composition import CompositionError, CompositionSet
from .fsm_model import Edge, ReliabilityFsm, Violation, validate
from .monitor import OperationalProfile, ProfileError, check_events

FORMAT_VERSION = "1.0"
SUPPORTED_VERSIONS = frozenset({"1.0"})
PROFILE_HEADER = ("timestamp_hours", "state")


class ParseError(ValueError):
    """Failure to load a document.

    ``kind`` is ``syntax``, ``schema`` or ``validation``; ``location`` is a
    line/column, a row number, or a path into the JSON document.
    """

    def __init__(self, kind: str, rule: str, location: str, message: str, violations: list[Violation] | None = None):
        self.kind = kind
        self.rule = rule
        self.location = location
        self.violations = violations or []
        super().__init__(f"{kind} error at {location} [{rule}]: {message}")


class UnknownFieldWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ModelDocument:
    model: ReliabilityFsm
    format_version: str = FORMAT_VERSION
    metadata: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class CompositionDocument:
    sets: tuple[CompositionSet, ...]
    format_version: str = FORMAT_VERSION
    metadata: dict[str, str] = field(default_factory=dict)

    def get(self, name: str) -> CompositionSet:
        for s in self.sets:
            if s.name == name:
                return s
        raise KeyError(name)


Document = Union[ModelDocument, CompositionDocument, OperationalProfile]


def _text(data: str | bytes) -> str:
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("syntax", "encoding", f"byte {exc.start}", "input is not UTF-8 text") from None
    return data


def _reject_constant(name: str) -> Any:
    raise ValueError(f"non-finite number {name} is not allowed")


def _load_json(data: str | bytes) -> Any:
    text = _text(data)
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(
            "syntax", "json", f"line {exc.lineno} column {exc.colno} (position {exc.pos})", exc.msg
        ) from None
    except ValueError as exc:
        raise ParseError("syntax", "json", "position unknown", str(exc)) from None


def _check_keys(obj: dict, allowed: tuple[str, ...], required: tuple[str, ...], path: str, lenient: bool) -> None:
    for key in required:
        if key not in obj:
            raise ParseError("schema", "missing-field", path, f"required field '{key}' is missing")
    for key in obj:
        if key not in allowed:
            msg = f"unknown field '{key}'"
            if lenient:
                warnings.warn(f"{path}: {msg}", UnknownFieldWarning, stacklevel=3)
            else:
                raise ParseError("schema", "unknown-field", path, msg)


def _object(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ParseError("schema", "type", path, f"expected an object, got {type(value).__name__}")
    return value


def _array(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise ParseError("schema", "type", path, f"expected an array, got {type(value).__name__}")
    return value


def _string(value: Any, path: str) -> str:
    if not isinstance(value, str) or not value:
        raise ParseError("schema", "type", path, "expected nonempty text")
    return value


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError("schema", "type", path, f"expected a number, got {value!r}")
    return float(value)


def _header(root: Any, lenient: bool, body_key: str) -> tuple[dict, str, dict[str, str]]:
    root = _object(root, "$")
    _check_keys(root, ("formatVersion", "metadata", body_key), ("formatVersion", body_key), "$", lenient)
    version = root["formatVersion"]
    if version not in SUPPORTED_VERSIONS:
        raise ParseError("schema", "format-version", "$.formatVersion", f"unsupported formatVersion {version!r}")
    meta = _object(root.get("metadata", {}), "$.metadata")
    for k, v in meta.items():
        if not isinstance(v, str):
            raise ParseError("schema", "type", f"$.metadata.{k}", "metadata values must be text")
    return root, version, dict(meta)


def parse_model(data: str | bytes, lenient: bool = False) -> ModelDocument:
    root, version, meta = _header(_load_json(data), lenient, "model")
    body = _object(root["model"], "$.model")
    _check_keys(body, ("start", "nodes", "edges"), ("start", "nodes", "edges"), "$.model", lenient)
    start = _string(body["start"], "$.model.start")
    nodes = [_string(n, f"$.model.nodes[{i}]") for i, n in enumerate(_array(body["nodes"], "$.model.nodes"))]
    edges = []
    for i, raw in enumerate(_array(body["edges"], "$.model.edges")):
        path = f"$.model.edges[{i}]"
        e = _object(raw, path)
        _check_keys(e, ("from", "to", "probability"), ("from", "to", "probability"), path, lenient)
        src = _string(e["from"], f"{path}.from")
        dst = _string(e["to"], f"{path}.to")
        p = _number(e["probability"], f"{path}.probability")
        if not 0.0 <= p <= 1.0:
            raise ParseError(
                "schema", "probability-range", f"{path} ({src}->{dst})", f"probability {p!r} outside [0, 1]"
            )
        edges.append(Edge(src, dst, p))
    model = ReliabilityFsm(nodes, edges, start)
    problems = validate(model)
    if problems:
        raise ParseError(
            "validation", problems[0].rule, problems[0].location,
            "; ".join(str(v) for v in problems), violations=problems,
        )
    return ModelDocument(model=model, format_version=version, metadata=meta)


def parse_composition_sets(data: str | bytes, lenient: bool = False) -> CompositionDocument:
    root, version, meta = _header(_load_json(data), lenient, "sets")
    sets = []
    for i, raw in enumerate(_array(root["sets"], "$.sets")):
        path = f"$.sets[{i}]"
        obj = _object(raw, path)
        _check_keys(obj, ("name", "services"), ("name", "services"), path, lenient)
        name = _string(obj["name"], f"{path}.name")
        services = []
        rows = _array(obj["services"], f"{path}.services")
        if not rows:
            raise ParseError("schema", "empty-set", f"{path} ({name})", "composition set has no services")
        for j, srow in enumerate(rows):
            spath = f"{path}.services[{j}]"
            s = _object(srow, spath)
            _check_keys(s, ("name", "mtbfHours", "mttrHours"), ("name", "mtbfHours", "mttrHours"), spath, lenient)
            sname = _string(s["name"], f"{spath}.name")
            where = f"{spath} ({sname})"
            mtbf = _number(s["mtbfHours"], f"{spath}.mtbfHours")
            mttr = _number(s["mttrHours"], f"{spath}.mttrHours")
            try:
                services.append(ServiceProfile(sname, mtbf, mttr))
            except DomainError as exc:
                raise ParseError("schema", "service-range", where, str(exc)) from None
        try:
            sets.append(CompositionSet(name, services))
        except CompositionError as exc:
            raise ParseError("schema", "duplicate-service", f"{path} ({name})", str(exc)) from None
    names = [s.name for s in sets]
    for i, n in enumerate(names):
        if n in names[:i]:
            raise ParseError("schema", "duplicate-set", f"$.sets[{i}]", f"duplicate set name {n!r}")
    return CompositionDocument(sets=tuple(sets), format_version=version, metadata=meta)


def parse_composition_set(data: str | bytes, name: str | None = None, lenient: bool = False) -> CompositionSet:
    """Single set from a composition document (the first one unless ``name``)."""
    doc = parse_composition_sets(data, lenient=lenient)
    if name is None:
        return doc.sets[0]
    try:
        return doc.get(name)
    except KeyError:
        raise ParseError("schema", "unknown-set", "$.sets", f"no composition set named {name!r}") from None


def parse_operational_profile(
    data: str | bytes, horizon: float | None = None, service_name: str | None = None
) -> OperationalProfile:
    """Parse a profile CSV.

    ``horizon`` and ``service_name`` override the ``# horizon=`` and
    ``# service=`` comment lines.
    """
    text = _text(data)
    lines = text.splitlines()
    if not any(l.strip() for l in lines):
        raise ParseError("syntax", "empty", "line 1", "profile is empty")

    comments: dict[str, str] = {}
    body: list[tuple[int, str]] = []
    for lineno, line in enumerate(lines, start=1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            key, sep, value = s[1:].partition("=")
            if sep:
                comments[key.strip().lower()] = value.strip()
            continue
        body.append((lineno, line))

    if not body:
        raise ParseError("syntax", "header", "line 1", "missing header row")
    head_line, head = body[0]
    header = tuple(c.strip().lower() for c in next(csv.reader([head])))
    if header != PROFILE_HEADER:
        raise ParseError("syntax", "header", f"line {head_line}", f"expected header {','.join(PROFILE_HEADER)}")

    events: list[tuple[float, bool]] = []
    for row_no, (lineno, line) in enumerate(body[1:], start=1):
        where = f"row {row_no} (line {lineno})"
        cells = [c.strip() for c in next(csv.reader([line]))]
        if len(cells) != 2:
            raise ParseError("syntax", "columns", where, f"expected 2 columns, got {len(cells)}")
        try:
            ts = float(cells[0])
        except ValueError:
            raise ParseError("syntax", "timestamp", where, f"bad timestamp {cells[0]!r}") from None
        if not math.isfinite(ts) or ts < 0:
            raise ParseError("schema", "timestamp", where, f"timestamp must be finite and >= 0, got {cells[0]!r}")
        state = cells[1].lower()
        if state not in ("up", "down"):
            raise ParseError("syntax", "state", where, f"state must be up or down, got {cells[1]!r}")
        events.append((ts, state == "up"))

    if horizon is None:
        if "horizon" not in comments:
            raise ParseError("schema", "horizon", "end of file", "no horizon given (add '# horizon=<hours>')")
        try:
            horizon = float(comments["horizon"])
        except ValueError:
            raise ParseError("syntax", "horizon", "horizon comment", f"bad horizon {comments['horizon']!r}") from None
    name = service_name or comments.get("service", "service")

    evs = tuple(events)
    try:
        check_events(evs, horizon)
    except ProfileError as exc:
        loc = f"row {exc.row}" if exc.row is not None else "profile"
        raise ParseError("schema", exc.rule, loc, str(exc)) from None
    return OperationalProfile(name, evs, horizon)


def _model_json(doc: ModelDocument) -> dict:
    m = doc.model
    return {
        "formatVersion": doc.format_version,
        "metadata": dict(doc.metadata),
        "model": {
            "start": m.start,
            "nodes": list(m.nodes),
            "edges": [{"from": e.source, "to": e.target, "probability": float(e.probability)} for e in m.edges],
        },
    }


def _composition_json(doc: CompositionDocument) -> dict:
    return {
        "formatVersion": doc.format_version,
        "metadata": dict(doc.metadata),
        "sets": [
            {
                "name": s.name,
                "services": [
                    {"name": p.name, "mtbfHours": float(p.mtbf_hours), "mttrHours": float(p.mttr_hours)}
                    for p in s.services
                ],
            }
            for s in doc.sets
        ],
    }


def _profile_csv(profile: OperationalProfile) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PROFILE_HEADER)
    for t, up in profile.events:
        w.writerow((repr(t), "up" if up else "down"))
    buf.write(f"# service={profile.service_name}\n")
    buf.write(f"# horizon={profile.horizon!r}\n")
    return buf.getvalue()


def serialize(doc: Document) -> str:
    """Canonical text form; parsing it back yields an equal document."""
    if isinstance(doc, ModelDocument):
        return json.dumps(_model_json(doc), indent=2) + "\n"
    if isinstance(doc, CompositionDocument):
        return json.dumps(_composition_json(doc), indent=2) + "\n"
    if isinstance(doc, OperationalProfile):
        return _profile_csv(doc)
    raise TypeError(f"cannot serialize {type(doc).__name__}")


def bundled_path(name: str):
    """Traversable for a fixture shipped in ``wsrel/data`` (``.json`` optional)."""
    root = resources.files("wsrel") / "data"
    for candidate in (name, f"{name}.json", f"{name}.csv"):
        p = root / candidate
        if p.is_file():
            return p
    raise FileNotFoundError(f"no bundled fixture named {name!r}")


def load_bundled_model(name: str) -> ModelDocument:
    return parse_model(bundled_path(name).read_text(encoding="utf-8"))


def load_bundled_compositions(name: str = "table1") -> CompositionDocument:
    return parse_composition_sets(bundled_path(name).read_text(encoding="utf-8"))
