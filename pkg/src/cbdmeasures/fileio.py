"""System files: strict JSON documents with exact probabilities.

Two conventions are accepted. The default ``"01"`` document lists
``contents`` and ``contexts``; each context record has an ``id``, its ordered
``contents`` and a ``distribution`` mapping outcome bitstrings (character k is
the value of the k-th listed content) to probabilities. Missing patterns have
probability 0. Probabilities are JSON numbers (read as decimals) or strings
holding a decimal or an exact fraction such as ``"1/3"``.

The ``"pm1"`` convention describes a cyclic system by ``n``, ``correlations``
and ``marginals`` in the +-1 expectation parametrization of
:class:`~cbdmeasures.cyclic.CyclicSpec`.
"""

from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction

import jsonschema

from .cyclic import CyclicSpec, make_cyclic
from .errors import ParseError
from .system import System, system_to_raw, validate_system

_NUMBER = {"anyOf": [
    {"type": "number"},
    {"type": "string", "pattern": r"^\s*[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(\s*/\s*\d+)?\s*$"},
]}

SCHEMA_01 = {
    "type": "object",
    "required": ["contents", "contexts"],
    "additionalProperties": False,
    "properties": {
        "convention": {"const": "01"},
        "contents": {"type": "array", "items": {"type": "string"}},
        "contexts": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "contents", "distribution"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "contents": {"type": "array", "items": {"type": "string"}},
                    "distribution": {"anyOf": [
                        {"type": "object", "propertyNames": {"pattern": "^[01]+$"},
                         "additionalProperties": _NUMBER},
                        {"type": "array", "items": _NUMBER},
                    ]},
                },
            },
        },
    },
}

_PAIR_OR_NUMBER = {"anyOf": [_NUMBER, {"type": "array", "items": _NUMBER,
                                       "minItems": 2, "maxItems": 2}]}

SCHEMA_PM1 = {
    "type": "object",
    "required": ["convention", "n", "correlations", "marginals"],
    "additionalProperties": False,
    "properties": {
        "convention": {"const": "pm1"},
        "n": {"type": "integer", "minimum": 2},
        "correlations": {"type": "array", "items": _NUMBER},
        "marginals": {"anyOf": [_NUMBER, {"type": "array", "items": _PAIR_OR_NUMBER}]},
    },
}


def _validator(schema):
    base = jsonschema.Draft202012Validator
    checker = base.TYPE_CHECKER.redefine(
        "number", lambda _, v: isinstance(v, (int, float, Decimal)) and not isinstance(v, bool))
    return jsonschema.validators.extend(base, type_checker=checker)(schema)


_VALIDATORS = {"01": _validator(SCHEMA_01), "pm1": _validator(SCHEMA_PM1)}


def _line_of(text, token):
    needle = json.dumps(token)
    for k, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return k
    return None


def _schema_error(text, err):
    path = list(err.absolute_path)
    key = None
    # an invalid pattern key is reported against the distribution object
    if err.validator in ("propertyNames", "anyOf") and isinstance(err.instance, dict):
        bad = [k for k in err.instance if not set(k) <= {"0", "1"} or not k]
        key = bad[0] if bad else None
    if key is None and path:
        key = str(path[-1])
    line = _line_of(text, key) if key is not None else None
    return ParseError(f"invalid system file: {err.message}", line=line, key=key)


def parse_system_text(text, mode="rational"):
    """Parse a system document given as a string."""
    try:
        raw = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(raw, dict):
        raise ParseError("a system file must hold a JSON object", line=1)
    convention = raw.get("convention", "01")
    if convention not in _VALIDATORS:
        raise ParseError(f"unknown convention {convention!r}; use '01' or 'pm1'",
                         line=_line_of(text, "convention"), key="convention")
    err = jsonschema.exceptions.best_match(_VALIDATORS[convention].iter_errors(raw))
    if err is not None:
        raise _schema_error(text, err)
    if convention == "pm1":
        spec = CyclicSpec(raw["n"], tuple(raw["correlations"]), _marginals(raw["marginals"]))
        system = make_cyclic(spec)
        return system if mode == "rational" else system.to_float()
    return validate_system(raw, mode)


def _marginals(value):
    if isinstance(value, list):
        return tuple(tuple(v) if isinstance(v, list) else v for v in value)
    return (value,)


def parse_system_file(path, mode="rational"):
    """Read and validate a system file (UTF-8)."""
    with open(path, encoding="utf-8") as fh:
        return parse_system_text(fh.read(), mode)


def _emit_number(p):
    if isinstance(p, Fraction):
        return str(p)
    return float(p)


def system_to_document(system):
    raw = system_to_raw(system)
    for record in raw["contexts"]:
        record["distribution"] = {k: _emit_number(v) for k, v in record["distribution"].items()}
    return {"convention": "01", **raw}


def emit_system(system):
    """Serialize a system; rational values become exact fraction strings."""
    return json.dumps(system_to_document(system), indent=2) + "\n"


def write_system_file(system, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_system(system))


def format_value(value):
    """Render a measure value: exact fractions as ``p/q``, floats via repr."""
    if isinstance(value, Fraction):
        return str(value)
    return repr(float(value))
