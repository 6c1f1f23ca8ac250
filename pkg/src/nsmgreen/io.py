"""CSV output, run manifests and flat key-value config files."""

from __future__ import annotations

import configparser
import csv
import json
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    """Shortest round-trip text for numbers; other values via str."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path, header, rows, comment: str) -> Path:
    """Write '# comment', a header row and the data rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])
    return path


def read_csv(path):
    """Return (comment, header, rows as lists of strings)."""
    with Path(path).open() as fh:
        comment = fh.readline().rstrip("\n").lstrip("# ")
        r = csv.reader(fh)
        header = next(r)
        return comment, header, list(r)


def write_manifest(path, data: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=fmt) + "\n")
    return path


def read_config(path) -> dict:
    """Flat 'key = value' file; an optional single section header is ignored."""
    text = Path(path).read_text()
    if not text.lstrip().startswith("["):
        text = "[run]\n" + text
    cp = configparser.ConfigParser(interpolation=None)
    cp.read_string(text)
    out = {}
    for section in cp.sections():
        for key, value in cp[section].items():
            out[key.replace("-", "_")] = value
    return out
