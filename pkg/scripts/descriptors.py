#!/usr/bin/env python3
"""
Pair Descriptors
================

Loads and validates pair descriptor files (JSON, or TOML for hand-written
input) and turns them into the typed pairs of the computational modules.

A descriptor populates exactly one variant:

  p1               points = [{at, c}, ...]   (optional cover = m)
  toric            rays, cones, coefficients (optional valuations)
  plane_divisor    d
  weighted_blowup  a, b (optional tau)

``kind`` selects the variant explicitly; otherwise it is inferred from the
keys. Problems are reported as :class:`DescriptorError` with the offending
field and, when it can be found, the line in the source file.
"""

from __future__ import annotations

import json
import logging
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

try:
    import jsonschema
except ImportError:
    jsonschema = None

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from scripts.dim1 import CyclicCover, MarkedPoint, P1Pair, parse_coordinate
from scripts.p2wb import PlaneDivisorCase, WeightedBlowupDescriptor
from scripts.toric import FanPair, LatticeVector, as_lattice_vector
from scripts.utils.errors import DescriptorError, KStabError
from scripts.utils.rationals import format_rational, parse_rational

logger = logging.getLogger(__name__)

DEFAULT_SCHEMA_PATH = Path(__file__).resolve().parent.parent / "configs" / "pair_descriptor_schema.json"

VARIANT_KEYS: Dict[str, Tuple[str, ...]] = {
    "p1": ("points", "cover"),
    "toric": ("rays", "cones", "coefficients", "valuations"),
    "plane_divisor": ("d",),
    "weighted_blowup": ("a", "b", "tau"),
}

PairVariant = Union[P1Pair, FanPair, PlaneDivisorCase, WeightedBlowupDescriptor]


@dataclass(frozen=True)
class PairDescriptor:
    kind: str
    pair: PairVariant
    label: Optional[str] = None
    notes: Optional[str] = None
    cover: Optional[CyclicCover] = None
    valuations: Tuple[LatticeVector, ...] = ()
    source: Optional[str] = field(default=None, compare=False)

    def echo(self) -> Dict[str, Any]:
        """Normalized input, as echoed in run reports."""
        data: Dict[str, Any] = {"kind": self.kind}
        if self.label is not None:
            data["label"] = self.label
        pair = self.pair
        if isinstance(pair, P1Pair):
            data.update(pair.to_dict())
            if self.cover is not None:
                data["cover"] = self.cover.degree
        elif isinstance(pair, FanPair):
            data.update(pair.to_dict())
            if self.valuations:
                data["valuations"] = [list(v) for v in self.valuations]
        elif isinstance(pair, PlaneDivisorCase):
            data["d"] = pair.d
        else:
            data["a"], data["b"] = pair.a, pair.b
            if pair.tau is not None:
                data["tau"] = format_rational(pair.tau)
        return data


# ---------------------------------------------------------------------------
# source text helpers
# ---------------------------------------------------------------------------


def format_field_path(path: Sequence[Any]) -> str:
    """``["points", 0, "c"]`` -> ``"points[0].c"``."""
    text = ""
    for part in path:
        if isinstance(part, int):
            text += f"[{part}]"
        else:
            text += f".{part}" if text else str(part)
    return text


def locate_line(text: Optional[str], path: Sequence[Any]) -> Optional[int]:
    """Best-effort 1-based line of ``path`` in JSON or TOML source."""
    if not text:
        return None
    offset, index, found = 0, 0, None
    for part in path:
        if isinstance(part, int):
            index = part
            continue
        key = re.escape(str(part))
        pattern = re.compile(rf'"{key}"\s*:|(?<![\w"]){key}\s*=')
        match = None
        for k, candidate in enumerate(pattern.finditer(text, offset)):
            if k == index:
                match = candidate
                break
        if match is None:
            break
        found, offset, index = match.start(), match.end(), 0
    if found is None:
        return None
    return text.count("\n", 0, found) + 1


def _fail(message: str, path: Sequence[Any], text: Optional[str]) -> DescriptorError:
    return DescriptorError(message, field=format_field_path(path) or None, line=locate_line(text, path))


def load_document(path: Union[str, Path]) -> Tuple[Dict[str, Any], str]:
    """Parse a JSON or TOML file; returns (data, source text)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DescriptorError(f"cannot read descriptor {path}: {exc}") from exc
    if path.suffix.lower() == ".toml":
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            line = getattr(exc, "lineno", None)
            if line is None:
                match = re.search(r"line (\d+)", str(exc))
                line = int(match.group(1)) if match else None
            raise DescriptorError(f"invalid TOML: {exc}", line=line) from exc
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DescriptorError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(data, dict):
        raise DescriptorError("descriptor must be a table/object at top level", line=1)
    return data, text


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


class DescriptorValidator:
    """Schema validation for pair descriptors."""

    def __init__(self, schema_path: Optional[Union[str, Path]] = None):
        self.schema_path = Path(schema_path) if schema_path else DEFAULT_SCHEMA_PATH
        self.schema: Optional[Dict[str, Any]] = None
        self.errors: List[str] = []
        if self.schema_path.exists():
            self.load_schema(self.schema_path)
        else:
            logger.warning("descriptor schema not found at %s", self.schema_path)

    def load_schema(self, schema_path: Union[str, Path]) -> bool:
        try:
            with open(schema_path, "r", encoding="utf-8") as f:
                self.schema = json.load(f)
            self.schema_path = Path(schema_path)
            return True
        except (OSError, json.JSONDecodeError) as e:
            self.errors.append(f"Failed to load schema from {schema_path}: {e}")
            return False

    def schema_errors(self, data: Dict[str, Any], text: Optional[str] = None) -> List[DescriptorError]:
        if self.schema is None or jsonschema is None:
            return []
        validator = jsonschema.Draft7Validator(self.schema)
        problems = []
        for error in sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path))):
            problems.append(_fail(error.message, list(error.absolute_path), text))
        return problems

    def validate_data(self, data: Dict[str, Any], text: Optional[str] = None) -> Tuple[bool, List[str]]:
        """(is_valid, errors) for an already parsed descriptor."""
        self.errors = [str(e) for e in self.schema_errors(data, text)]
        if not self.errors:
            try:
                parse_descriptor(data, text, validate=False)
            except KStabError as exc:
                self.errors.append(str(exc))
        return not self.errors, list(self.errors)

    def validate_file(self, path: Union[str, Path]) -> Tuple[bool, List[str]]:
        try:
            data, text = load_document(path)
        except DescriptorError as exc:
            self.errors = [str(exc)]
            return False, list(self.errors)
        return self.validate_data(data, text)

    def suggest_fixes(self, data: Dict[str, Any]) -> List[str]:
        """Hints for common descriptor mistakes."""
        suggestions = []
        populated = [kind for kind, keys in VARIANT_KEYS.items() if any(k in data for k in keys)]
        if not populated:
            suggestions.append(
                "Add one variant: 'points' (P^1), 'rays'+'cones' (toric), 'd' (plane curve) or 'a'+'b' (weighted blowup)"
            )
        elif len(populated) > 1:
            suggestions.append(f"Keep a single variant; found keys for {', '.join(populated)}")
        for point in data.get("points", []) or []:
            if isinstance(point, dict) and isinstance(point.get("c"), float):
                suggestions.append(f"Write coefficient {point['c']} as an exact 'p/q' string")
                break
        for coefficient in data.get("coefficients", []) or []:
            if isinstance(coefficient, float):
                suggestions.append("Write toric boundary coefficients as 'p/q' strings")
                break
        if isinstance(data.get("tau"), float):
            suggestions.append("Write tau as an exact 'p/q' string")
        if "rays" in data and "coefficients" not in data:
            suggestions.append("Add 'coefficients' (one per ray, '0' for no boundary)")
        if "a" in data and "b" in data and isinstance(data["a"], int) and isinstance(data["b"], int):
            if data["a"] < data["b"]:
                suggestions.append("Swap the weights so that a >= b")
        return suggestions


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def infer_kind(data: Dict[str, Any], text: Optional[str] = None) -> str:
    populated = [kind for kind, keys in VARIANT_KEYS.items() if any(k in data for k in keys)]
    kind = data.get("kind")
    if kind is not None:
        if kind not in VARIANT_KEYS:
            raise _fail(f"unknown kind {kind!r}", ["kind"], text)
        stray = [k for k in populated if k != kind]
        if stray:
            raise _fail(
                f"kind {kind!r} but keys of {', '.join(stray)} are populated", [VARIANT_KEYS[stray[0]][0]], text
            )
        return kind
    if len(populated) != 1:
        found = ", ".join(populated) if populated else "none"
        raise DescriptorError(f"exactly one pair variant must be populated (found: {found})")
    return populated[0]


def _rational(value: Any, path: Sequence[Any], text: Optional[str]):
    try:
        return parse_rational(value)
    except KStabError as exc:
        raise _fail(str(exc), path, text) from exc


def _p1(data: Dict[str, Any], text: Optional[str]) -> Tuple[P1Pair, Optional[CyclicCover]]:
    raw_points = data.get("points", [])
    if not isinstance(raw_points, list):
        raise _fail("points must be a list", ["points"], text)
    points = []
    for i, raw in enumerate(raw_points):
        if not isinstance(raw, dict) or "at" not in raw or "c" not in raw:
            raise _fail("each point needs 'at' and 'c'", ["points", i], text)
        c = _rational(raw["c"], ["points", i, "c"], text)
        if not 0 < c < 1:
            raise _fail(
                f"coefficient {format_rational(c)} not in (0, 1): pair is not klt", ["points", i, "c"], text
            )
        try:
            at = parse_coordinate(raw["at"])
        except KStabError as exc:
            raise _fail(str(exc), ["points", i, "at"], text) from exc
        points.append(MarkedPoint(at, c))
    try:
        pair = P1Pair(tuple(points))
    except KStabError as exc:
        raise _fail(str(exc), ["points"], text) from exc
    cover = None
    if "cover" in data:
        try:
            cover = CyclicCover(int(data["cover"]))
        except (KStabError, TypeError, ValueError) as exc:
            raise _fail(str(exc), ["cover"], text) from exc
    logger.debug("parsed P^1 pair %s", pair.describe())
    return pair, cover


def _toric(data: Dict[str, Any], text: Optional[str]) -> Tuple[FanPair, Tuple[LatticeVector, ...]]:
    for key in ("rays", "cones"):
        if key not in data:
            raise _fail(f"toric descriptor needs '{key}'", [key], text)
    rays = data["rays"]
    coefficients = data.get("coefficients", ["0"] * len(rays))
    parsed = tuple(_rational(c, ["coefficients", i], text) for i, c in enumerate(coefficients))
    try:
        fan = FanPair(
            tuple(tuple(r) for r in rays),
            tuple(tuple(c) for c in data["cones"]),
            parsed,
        )
    except KStabError as exc:
        raise _fail(str(exc), ["rays"], text) from exc
    valuations = []
    for i, v in enumerate(data.get("valuations", [])):
        try:
            valuations.append(as_lattice_vector(v, fan.dimension))
        except KStabError as exc:
            raise _fail(str(exc), ["valuations", i], text) from exc
    return fan, tuple(valuations)


def parse_descriptor(
    data: Dict[str, Any],
    text: Optional[str] = None,
    source: Optional[str] = None,
    validate: bool = True,
    validator: Optional[DescriptorValidator] = None,
) -> PairDescriptor:
    """Typed descriptor from parsed data; raises :class:`DescriptorError`."""
    if validate:
        validator = validator or DescriptorValidator()
        problems = validator.schema_errors(data, text)
        if problems:
            raise problems[0]
    kind = infer_kind(data, text)
    label, notes = data.get("label"), data.get("notes")
    if kind == "p1":
        pair, cover = _p1(data, text)
        return PairDescriptor(kind, pair, label, notes, cover=cover, source=source)
    if kind == "toric":
        fan, valuations = _toric(data, text)
        return PairDescriptor(kind, fan, label, notes, valuations=valuations, source=source)
    if kind == "plane_divisor":
        try:
            case = PlaneDivisorCase(int(data["d"]))
        except (KStabError, TypeError, ValueError) as exc:
            raise _fail(str(exc), ["d"], text) from exc
        return PairDescriptor(kind, case, label, notes, source=source)
    for key in ("a", "b"):
        if key not in data:
            raise _fail(f"weighted blowup needs '{key}'", [key], text)
    tau = _rational(data["tau"], ["tau"], text) if "tau" in data else None
    try:
        desc = WeightedBlowupDescriptor(data["a"], data["b"], tau)
    except KStabError as exc:
        raise _fail(str(exc), ["tau"] if "window" in str(exc) else ["a"], text) from exc
    return PairDescriptor(kind, desc, label, notes, source=source)


def load_descriptor(path: Union[str, Path], validator: Optional[DescriptorValidator] = None) -> PairDescriptor:
    data, text = load_document(path)
    descriptor = parse_descriptor(data, text, source=str(path), validator=validator)
    logger.info("loaded %s descriptor from %s", descriptor.kind, path)
    return descriptor
