"""Result serialization for the CLI: RFC-4180-style CSV and versioned JSON.

CSV documents carry their provenance in ``#``-prefixed header lines
(version, command, resolved config, timestamp) followed by a header row and
data rows; reruns with the same config and seed produce byte-identical data
rows, with the timestamp confined to the header.  JSON documents carry a
``version`` field and validate against the schemas shipped under
``mtlimits/schemas``.
"""

from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone
from importlib import resources

import numpy as np

from .errors import DomainError

OUTPUT_SCHEMA_VERSION = "mtlimits_output_v1"

__all__ = ["OUTPUT_SCHEMA_VERSION", "render_document", "write_document",
           "load_schema", "validate_json", "format_value"]


def _plain(v):
    """Coerce numpy scalars to built-in types so text and JSON stay clean."""
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def format_value(v) -> str:
    """Shortest round-trip text for floats; plain text otherwise."""
    v = _plain(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def render_document(command: str, config: dict, columns: list[str],
                    rows: list[dict], fmt: str, extras: dict | None = None) -> str:
    timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# version={OUTPUT_SCHEMA_VERSION}\n")
        buf.write(f"# command={command}\n")
        buf.write(f"# config={json.dumps(config, sort_keys=True)}\n")
        buf.write(f"# timestamp={timestamp}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(c)) for c in columns])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "version": OUTPUT_SCHEMA_VERSION,
            "command": command,
            "config": config,
            "timestamp": timestamp,
            "columns": columns,
            "rows": rows,
        }
        if extras:
            doc["extras"] = extras
        return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"
    raise DomainError(f"unknown output format {fmt!r}; choose csv or json")


def _json_default(o):
    p = _plain(o)
    if p is o:
        raise TypeError(f"not JSON serializable: {type(o).__name__}")
    return p


def write_document(text: str, out_path: str | None) -> None:
    if out_path in (None, "-"):
        print(text, end="")
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# minimal JSON-schema checking (type / properties / required / items / enum)
# ---------------------------------------------------------------------------

_TYPES = {
    "object": dict, "array": list, "string": str,
    "boolean": bool, "null": type(None),
}


def load_schema(name: str) -> dict:
    path = resources.files("mtlimits") / "schemas" / name
    return json.loads(path.read_text(encoding="utf-8"))


def validate_json(doc, schema: dict, path: str = "$") -> list[str]:
    """Structural validation against the shipped schema subset; returns a
    list of violation messages (empty means valid)."""
    errors: list[str] = []
    stype = schema.get("type")
    if stype is not None:
        types = stype if isinstance(stype, list) else [stype]
        ok = False
        for t in types:
            if t == "number":
                ok |= isinstance(doc, (int, float)) and not isinstance(doc, bool)
            elif t == "integer":
                ok |= isinstance(doc, int) and not isinstance(doc, bool)
            else:
                ok |= isinstance(doc, _TYPES[t])
        if not ok:
            return [f"{path}: expected {stype}, got {type(doc).__name__}"]
    if "enum" in schema and doc not in schema["enum"]:
        errors.append(f"{path}: {doc!r} not in {schema['enum']}")
    if isinstance(doc, dict):
        for key in schema.get("required", []):
            if key not in doc:
                errors.append(f"{path}: missing required key {key!r}")
        for key, sub in schema.get("properties", {}).items():
            if key in doc:
                errors.extend(validate_json(doc[key], sub, f"{path}.{key}"))
    if isinstance(doc, list) and "items" in schema:
        for i, item in enumerate(doc):
            errors.extend(validate_json(item, schema["items"], f"{path}[{i}]"))
    return errors
