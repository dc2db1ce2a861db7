"""Config loading and report writing.

Every report carries :data:`CONVENTIONS` so that a CSV or JSON file can be
read without the code that produced it.  Output is deterministic: floats are
written with ``repr``-exact ``%.17g`` and JSON keys are sorted.
"""
import csv
import json
import os

from .errors import IoError, SchemaError

SCHEMA_VERSION = 1

CONVENTIONS = {
    "curvature": "comp[a,b,c,d] = <R(e_a,e_b)e_c, e_d>; K(v,w) = comp(v,w,v,w)",
    "directional_operator": "R_X[i,j] = comp(X,e_i,X,e_j), i.e. Y -> R(Y,X)X with sectional curvatures on the diagonal",
    "hopf_normalization": "su(2) with [e1,e2]=2e3 cyclic is the round S^3(1); the Hopf base S^2(1/2) has curvature 4",
    "submersion_layout": "vertical indices first, then horizontal",
    "tolerances": {"symmetric": 1e-9, "unit": 1e-12, "data": 1e-12, "dwp_relative": 1e-9},
}


def load_json(path):
    """Parse a JSON file; syntax errors become ``SchemaError`` with line and column."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def load_config(path, modes):
    """Load a config and check ``schema_version`` and ``mode``."""
    cfg = load_json(path)
    if not isinstance(cfg, dict):
        raise SchemaError(f"{path}: top level must be an object")
    version = cfg.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"{path}: schema_version must be {SCHEMA_VERSION}, got {version!r}")
    mode = cfg.get("mode")
    if mode not in modes:
        raise SchemaError(f"{path}: mode must be one of {list(modes)}, got {mode!r}")
    return cfg


def require(cfg, *keys):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise SchemaError(f"mode {cfg.get('mode')!r} needs {missing}")


def ensure_dir(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {path}: {exc.strerror or exc}") from exc
    return path


def _header_lines():
    lines = [f"# schema_version: {SCHEMA_VERSION}"]
    for key in sorted(CONVENTIONS):
        val = CONVENTIONS[key]
        if isinstance(val, dict):
            val = ", ".join(f"{k}={v!r}" for k, v in sorted(val.items()))
        lines.append(f"# {key}: {val}")
    return lines


def write_csv(path, columns, rows):
    """CSV with a ``#``-commented convention header."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            for line in _header_lines():
                fh.write(line + "\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            w.writerows(rows)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def read_csv(path):
    """``(columns, rows)`` of a file written by :func:`write_csv`."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def _plain(obj):
    # numpy scalars and arrays to builtins
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def write_json(path, payload):
    doc = {"schema_version": SCHEMA_VERSION, "conventions": CONVENTIONS}
    doc.update(_plain(payload))
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=True)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def fmt(x):
    return f"{float(x):.17g}"
