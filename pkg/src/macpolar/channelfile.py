"""Reading and writing channel files.

A channel file is a JSON object::

    {
      "name": "bac",
      "groups": [[2], [2]],
      "output_size": 3,
      "output_labels": ["0", "1", "2"],
      "probabilities": [[1, 0, 0], [0, 1, 0], [0, 1, 0], [0, 0, 1]],
      "metadata": {"notes": "..."}
    }

``groups`` holds the cyclic factor orders of each user's group. Row ``r`` of
``probabilities`` is the input tuple at position ``r`` of the lexicographic
order over ``(x_1, ..., x_m)``. Entries are JSON numbers or exact rational
strings such as ``"1/3"``. Rows made only of exact entries must sum to exactly
1; any other row must sum to 1 within 1e-9.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .abelian import GroupSpec
from .channel import Mac, validate

ROW_SUM_TOL = 1e-9


class ChannelFileError(ValueError):
    pass


def bundled_channels() -> list[str]:
    return sorted(p.name for p in resources.files("macpolar").joinpath("data").iterdir() if p.name.endswith(".json"))


def resolve_path(path: str | Path) -> Path:
    """``path`` itself if it exists, else the bundled channel file of that name."""
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("macpolar").joinpath("data", p.name)
    if bundled.is_file():
        return Path(str(bundled))
    raise ChannelFileError(f"{path}: no such file (bundled channels: {', '.join(bundled_channels())})")


def _entry(value: Any, where: str) -> Fraction | float:
    if isinstance(value, bool):
        raise ChannelFileError(f"{where}: booleans are not probabilities")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ChannelFileError(f"{where}: cannot parse {value!r} as a rational") from exc
    raise ChannelFileError(f"{where}: expected a number or a rational string, got {type(value).__name__}")


def parse(data: Any, source: str = "<channel>") -> Mac:
    if not isinstance(data, dict):
        raise ChannelFileError(f"{source}: top level must be an object")
    for key in ("groups", "probabilities"):
        if key not in data:
            raise ChannelFileError(f"{source}: missing field {key!r}")
    try:
        groups = tuple(GroupSpec(tuple(g)) for g in data["groups"])
    except (TypeError, ValueError) as exc:
        raise ChannelFileError(f"{source}: field 'groups': {exc}") from exc
    if not groups:
        raise ChannelFileError(f"{source}: field 'groups' must list at least one user")
    rows = data["probabilities"]
    n_rows = math.prod(g.size for g in groups)
    if not isinstance(rows, list) or len(rows) != n_rows:
        raise ChannelFileError(f"{source}: field 'probabilities' must have {n_rows} rows")
    n_out = data.get("output_size", len(rows[0]) if rows and isinstance(rows[0], list) else 0)
    table = np.zeros((n_rows, n_out))
    for r, row in enumerate(rows):
        where = f"{source}: probabilities[{r}]"
        if not isinstance(row, list) or len(row) != n_out:
            raise ChannelFileError(f"{where}: expected a list of {n_out} entries")
        entries = [_entry(v, f"{where}[{c}]") for c, v in enumerate(row)]
        for c, e in enumerate(entries):
            if e < 0 or e > 1:
                raise ChannelFileError(f"{where}[{c}]: probability {row[c]!r} outside [0, 1]")
        if all(isinstance(e, Fraction) for e in entries):
            total = sum(entries, Fraction(0))
            if total != 1:
                raise ChannelFileError(f"{where}: row sums to {total}, not exactly 1")
        else:
            total = math.fsum(float(e) for e in entries)
            if abs(total - 1) > ROW_SUM_TOL:
                raise ChannelFileError(f"{where}: row sums to {total!r}, not 1")
        table[r] = [float(e) for e in entries]
    labels = data.get("output_labels")
    if labels is not None and len(labels) != n_out:
        raise ChannelFileError(f"{source}: field 'output_labels' must have {n_out} entries")
    metadata = data.get("metadata", {})
    mac = Mac(groups, table, output_labels=tuple(labels) if labels is not None else None,
              name=str(data.get("name", "")), metadata=dict(metadata) if isinstance(metadata, dict) else {})
    errors = validate(mac, ROW_SUM_TOL)
    if errors:
        raise ChannelFileError(f"{source}: " + "; ".join(errors))
    return mac


def load(path: str | Path) -> Mac:
    p = resolve_path(path)
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ChannelFileError(f"{p}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse(data, str(p))


def to_dict(mac: Mac) -> dict:
    out: dict[str, Any] = {}
    if mac.name:
        out["name"] = mac.name
    out["groups"] = [list(g.orders) for g in mac.input_groups]
    out["output_size"] = mac.output_size
    if mac.output_labels is not None:
        out["output_labels"] = [str(lab) for lab in mac.output_labels]
    # repr of a float is the shortest string that round-trips exactly
    out["probabilities"] = [[float(v) for v in row] for row in mac.table]
    if mac.metadata:
        out["metadata"] = mac.metadata
    return out


def dumps(mac: Mac) -> str:
    """One field per line and one probability row per line, for readable diffs."""
    d = to_dict(mac)
    fields = []
    for key, value in d.items():
        if key == "probabilities":
            rows = ",\n".join("    " + json.dumps(r) for r in value)
            fields.append(f'  "probabilities": [\n{rows}\n  ]')
        else:
            fields.append(f"  {json.dumps(key)}: {json.dumps(value)}")
    return "{\n" + ",\n".join(fields) + "\n}\n"


def save(mac: Mac, path: str | Path) -> None:
    Path(path).write_text(dumps(mac))
