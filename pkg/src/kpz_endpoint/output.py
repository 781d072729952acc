"""CSV/JSON writers and run manifests."""

import json
import os
from dataclasses import asdict, dataclass, field, is_dataclass
from pathlib import Path

import numpy as np

from . import __version__

FLOAT_FMT = "{:.17g}"


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return FLOAT_FMT.format(float(v))


def write_csv(path, header, columns):
    """Write equal-length columns as CSV: header row, '\\n' endings, 17 digits."""
    path = Path(path)
    cols = [np.asarray(c) for c in columns]
    if len({c.size for c in cols}) > 1:
        raise ValueError("write_csv: columns differ in length")
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_csv(path):
    """Return (header, 2-D float array) from a file written by ``write_csv``."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def _jsonable(obj):
    if is_dataclass(obj):
        return {k: _jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        if hasattr(obj, "_asdict"):
            return {k: _jsonable(v) for k, v in obj._asdict().items()}
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path, obj):
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


@dataclass
class RunManifest:
    command: str
    config: dict
    versions: str = __version__
    wall_time_s: float = 0.0
    outputs: list = field(default_factory=list)

    def write(self, path):
        missing = [p for p in self.outputs if not os.path.exists(p)]
        if missing:
            raise FileNotFoundError(f"manifest lists missing outputs: {missing}")
        return write_json(path, self)


def sibling(path, suffix):
    """``out/fgoe.csv`` + ``.manifest.json`` -> ``out/fgoe.manifest.json``."""
    path = Path(path)
    return path.with_name(path.stem + suffix)
