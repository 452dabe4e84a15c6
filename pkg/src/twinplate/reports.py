"""Bit-stable CSV/JSON emission for experiment outputs.

Numbers are written with 17 significant decimal digits so every float
round-trips exactly; re-running a configuration with the same seed therefore
reproduces the numeric files byte for byte.  Wall-clock timings live only in
the run report, which is excluded from that guarantee.
"""

from __future__ import annotations

import json
import json.encoder
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["format_number", "write_csv", "write_json", "RunReport"]


def format_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path: str | Path, header: list[str], columns: list[np.ndarray]) -> Path:
    """Write named columns; the header carries a unit tag per column."""
    path = Path(path)
    rows = zip(*columns)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_number(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


class _Seventeen(json.JSONEncoder):
    """JSON encoder emitting floats with 17 significant digits."""

    def default(self, o):
        if isinstance(o, (np.integer,)):
            return int(o)
        if isinstance(o, (np.floating,)):
            return float(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.bool_,)):
            return bool(o)
        return super().default(o)

    def iterencode(self, o, _one_shot=False):
        return json.encoder._make_iterencode(
            {}, self.default, json.encoder.encode_basestring_ascii, self.indent,
            lambda f: format(f, ".17g"), self.key_separator, self.item_separator,
            self.sort_keys, self.skipkeys, _one_shot,
        )(o, 0)


def write_json(path: str | Path, payload: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, cls=_Seventeen, indent=2, sort_keys=True) + "\n")
    return path


@dataclass
class RunReport:
    """What a CLI run produced: config echo, artifact paths, timings."""

    subcommand: str
    config: dict
    config_hash: str
    version: str
    outputs: dict[str, str] = field(default_factory=dict)
    timings_seconds: dict[str, float] = field(default_factory=dict)

    def add_output(self, name: str, path: Path) -> None:
        self.outputs[name] = str(path)

    def write(self, path: str | Path) -> Path:
        return write_json(path, {
            "subcommand": self.subcommand,
            "config": self.config,
            "config_hash": self.config_hash,
            "version": self.version,
            "outputs": self.outputs,
            "timings_seconds": self.timings_seconds,
        })
