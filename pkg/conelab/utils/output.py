import csv
import io
import json
import logging
import math
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

from conelab.config import Config

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    """CSV cell text: 17 significant digits for floats, lowercase booleans"""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.17g}"
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def _columns(rows: Sequence[Dict[str, Any]]) -> List[str]:
    columns: List[str] = ['schema_version']
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return columns


def render_csv(rows: Sequence[Dict[str, Any]], schema_version: int = Config.SCHEMA_VERSION) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=_columns(rows), lineterminator="\n", restval="")
    writer.writeheader()
    for row in rows:
        writer.writerow({'schema_version': schema_version,
                         **{key: format_value(value) for key, value in row.items()}})
    return buffer.getvalue()


def render_json(rows: Sequence[Dict[str, Any]], metadata: Dict[str, Any]) -> str:
    payload = {'metadata': _json_value(metadata), 'rows': [_json_value(dict(row)) for row in rows]}
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_rows(rows: Sequence[Dict[str, Any]], fmt: str, path: Optional[str] = None,
               metadata: Optional[Dict[str, Any]] = None) -> Optional[str]:
    """Write a table as csv or json to ``path``; "-" or None means stdout"""
    metadata = metadata or {}
    if fmt == "csv":
        text = render_csv(rows, metadata.get('schema_version', Config.SCHEMA_VERSION))
    elif fmt == "json":
        text = render_json(rows, metadata)
    else:
        raise ValueError(f"unknown output format: {fmt}")

    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return None

    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path
