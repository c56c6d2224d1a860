"""CSV, config-file and manifest plumbing for the command line front end.

File conventions are deliberately rigid so that outputs are byte-stable:
CSV floats carry 17 significant digits with LF line endings, JSON documents
are emitted with sorted keys and a fixed indentation, and every run manifest
contains the fully resolved parameters needed to replay the invocation.
"""

from __future__ import annotations

import csv
import hashlib
import json
import re

import numpy as np

from .arfima import GAUSSIAN, STUDENT_T, McArfimaSpec
from .core import ScalingFit
from .errors import InvalidInput, InvalidParameter

__all__ = [
    "write_series_csv",
    "read_series_csv",
    "parse_config",
    "config_float",
    "config_int",
    "config_str",
    "spec_from_config",
    "fit_to_dict",
    "json_dumps",
    "write_json",
    "sha256_file",
    "build_manifest",
    "read_manifest",
]

_FLOAT_FMT = "%.17g"


# =========================================================================
# CSV series files
# =========================================================================


def _fmt(v: float) -> str:
    return _FLOAT_FMT % float(v)


def write_series_csv(path, x, y=None) -> None:
    """Write one or two series as ``t,x[,y]`` rows with full float precision.

    The time column is the 0-based sample index. Floats are rendered with 17
    significant digits, which round-trips IEEE doubles exactly, and lines end
    with LF on every platform.
    """
    vx = np.asarray(x, dtype=float)
    vy = None if y is None else np.asarray(y, dtype=float)
    if vy is not None and vy.size != vx.size:
        raise InvalidInput(f"series lengths differ: {vx.size} vs {vy.size}")
    with open(path, "w", newline="\n") as fh:
        if vy is None:
            fh.write("t,x\n")
            for t, a in enumerate(vx):
                fh.write(f"{t},{_fmt(a)}\n")
        else:
            fh.write("t,x,y\n")
            for t, (a, b) in enumerate(zip(vx, vy)):
                fh.write(f"{t},{_fmt(a)},{_fmt(b)}\n")


def _is_numeric_row(row: list[str]) -> bool:
    try:
        for cell in row:
            float(cell)
    except ValueError:
        return False
    return True


def read_series_csv(path) -> tuple[np.ndarray, np.ndarray | None]:
    """Read a ``t,x[,y]`` CSV; returns ``(x, y)`` with ``y`` None for 2 columns.

    A header row is auto-detected by its first row failing to parse as
    numbers. Every data row must have the same column count (2 or 3); the
    time column is ignored beyond validation.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise InvalidInput(f"{path}: file holds no data rows")
    start = 0
    if not _is_numeric_row(rows[0]):
        start = 1
    data = rows[start:]
    if not data:
        raise InvalidInput(f"{path}: file holds a header but no data rows")
    width = len(data[0])
    if width not in (2, 3):
        raise InvalidInput(
            f"{path}: expected 2 or 3 columns (t,x[,y]), got {width}"
        )
    xs = np.empty(len(data))
    ys = np.empty(len(data)) if width == 3 else None
    for i, row in enumerate(data):
        line_no = start + i + 1
        if len(row) != width:
            raise InvalidInput(
                f"{path}: line {line_no}: expected {width} columns, got {len(row)}"
            )
        try:
            xs[i] = float(row[1])
            if ys is not None:
                ys[i] = float(row[2])
        except ValueError as exc:
            raise InvalidInput(f"{path}: line {line_no}: {exc}") from None
    return xs, ys


# =========================================================================
# Flat key = value config files
# =========================================================================


_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.]*$")


def parse_config(text: str, source: str = "config") -> dict[str, str]:
    """Parse flat ``key = value`` lines into an ordered string mapping.

    Blank lines and ``#`` comments are skipped; keys may carry dotted
    sections (``spec.d1``, ``sigma.13``). Duplicate keys and malformed lines
    raise with the line number.
    """
    out: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInput(f"{source}: line {line_no}: expected 'key = value'")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not _KEY_RE.match(key):
            raise InvalidInput(f"{source}: line {line_no}: malformed key {key!r}")
        if key in out:
            raise InvalidInput(f"{source}: line {line_no}: duplicate key {key!r}")
        out[key] = value
    return out


def config_float(cfg: dict, key: str, default=None):
    if key not in cfg:
        return default
    try:
        return float(cfg[key])
    except ValueError:
        raise InvalidInput(f"config key {key}: {cfg[key]!r} is not a number") from None


def config_int(cfg: dict, key: str, default=None):
    if key not in cfg:
        return default
    try:
        v = int(cfg[key])
    except ValueError:
        raise InvalidInput(f"config key {key}: {cfg[key]!r} is not an integer") from None
    return v


def config_str(cfg: dict, key: str, default=None, choices=None):
    v = cfg.get(key, default)
    if v is not None and choices is not None and v not in choices:
        raise InvalidInput(
            f"config key {key}: {v!r} is not one of {sorted(choices)}"
        )
    return v


_SIGMA_RE = re.compile(r"^sigma\.([1-4])([1-4])$")

_SPEC_KEYS = {
    "spec.alpha": ("alpha", 1.0),
    "spec.beta": ("beta", 0.0),
    "spec.gamma": ("gamma", 1.0),
    "spec.delta": ("delta", 0.0),
    "spec.d1": ("d1", 0.0),
    "spec.d2": ("d2", 0.0),
    "spec.d3": ("d3", 0.0),
    "spec.d4": ("d4", 0.0),
}


def spec_from_config(cfg: dict) -> McArfimaSpec:
    """Build a generator spec from ``spec.*`` and ``sigma.IJ`` keys.

    Unset weights default to a single active component per side (alpha and
    gamma 1, beta and delta 0), memory parameters default to 0 and sigma to
    the identity; ``sigma.IJ`` sets the symmetric pair. Validation errors
    carry the parameter name and its bound.
    """
    kwargs = {}
    for key, (field, default) in _SPEC_KEYS.items():
        kwargs[field] = config_float(cfg, key, default)
    sigma = np.eye(4)
    for key, value in cfg.items():
        m = _SIGMA_RE.match(key)
        if not m:
            continue
        i, j = int(m.group(1)), int(m.group(2))
        try:
            v = float(value)
        except ValueError:
            raise InvalidInput(f"config key {key}: {value!r} is not a number") from None
        sigma[i - 1, j - 1] = v
        sigma[j - 1, i - 1] = v
    dist = config_str(
        cfg, "spec.dist", GAUSSIAN, choices={GAUSSIAN, STUDENT_T}
    )
    return McArfimaSpec(
        sigma=sigma,
        innovation_dist=dist,
        dof=config_float(cfg, "spec.dof"),
        truncation=config_int(cfg, "spec.truncation"),
        burn_in=config_int(cfg, "spec.burn_in"),
        **kwargs,
    )


def spec_config_keys(cfg: dict) -> set[str]:
    """The subset of keys in ``cfg`` consumed by :func:`spec_from_config`."""
    fixed = set(_SPEC_KEYS) | {"spec.dist", "spec.dof", "spec.truncation", "spec.burn_in"}
    return {k for k in cfg if k in fixed or _SIGMA_RE.match(k)}


# =========================================================================
# JSON documents
# =========================================================================


def fit_to_dict(fit: ScalingFit | None) -> dict | None:
    """Serialize a scaling fit with the CLI's fixed field names."""
    if fit is None:
        return None
    return {
        "estimate": fit.exponent,
        "stderr": fit.stderr,
        "r2": fit.r_squared,
        "intercept": fit.intercept,
        "range_used": list(fit.range_used),
        "diagnostics": dict(fit.diagnostics),
    }


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def json_dumps(doc) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(
        doc, indent=2, sort_keys=True, allow_nan=False, default=_jsonable
    ) + "\n"


def write_json(path, doc) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(json_dumps(doc))


# =========================================================================
# Run manifests
# =========================================================================


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def build_manifest(subcommand: str, parameters: dict, inputs: dict, seeds) -> dict:
    """Assemble the replayable record of one invocation.

    ``parameters`` must hold every resolved value the subcommand consumed
    (defaults materialized), keyed by flag or config name; ``inputs`` maps
    input paths to their SHA-256 digests. Worker counts are deliberately not
    recorded: results are independent of parallelism by contract.
    """
    from . import __version__

    return {
        "tool": "plcc",
        "version": __version__,
        "subcommand": subcommand,
        "parameters": parameters,
        "inputs": inputs,
        "seeds": seeds,
    }


def read_manifest(path) -> dict:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"{path}: not valid JSON: {exc}") from None
    for field in ("tool", "subcommand", "parameters"):
        if field not in doc:
            raise InvalidInput(f"{path}: manifest lacks the {field!r} field")
    if doc["tool"] != "plcc":
        raise InvalidParameter(f"{path}: manifest was written by {doc['tool']!r}")
    return doc
