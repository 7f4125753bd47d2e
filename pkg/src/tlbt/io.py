"""Reading and writing systems, reduced models and trajectories.

JSON system format::

    {"n": 2, "m": 1, "p": 1,
     "A": [a11, a12, a21, a22], "B": [b1, b2], "C": [c1, c2]}

Matrices are row-major flat lists (nested row lists are accepted on read).
Python's float ``repr`` is used, so values round-trip exactly.  A ROM file
carries an extra ``"metadata"`` object.  Alternatively a directory holding
``A.mtx``, ``B.mtx`` and ``C.mtx`` (MatrixMarket) is read as a system.
"""
import csv
import json
from pathlib import Path

import numpy as np
import scipy.io

from .exceptions import DimensionError, ParseError, StabilityError
from .system import StateSpace


def _matrix_from_json(doc, key, rows, cols, path):
    if key not in doc:
        raise ParseError(f"{path}: missing key {key!r}")
    try:
        M = np.array(doc[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: key {key!r} is not a numeric array ({exc})") from None
    if M.size != rows * cols:
        raise ParseError(
            f"{path}: key {key!r} has {M.size} entries, expected {rows}x{cols} = {rows * cols}"
        )
    return M.reshape(rows, cols)


def _dims_from_json(doc, path):
    dims = []
    for key in ("n", "m", "p"):
        if key not in doc:
            raise ParseError(f"{path}: missing key {key!r}")
        v = doc[key]
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise ParseError(f"{path}: key {key!r} must be a positive integer, got {v!r}")
        dims.append(v)
    return dims


def _load_json(path):
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top-level value must be an object")
    return doc


def read_system(path, require_stable=True):
    """Read a system from a JSON file or a MatrixMarket directory.

    Raises
    ------
    ParseError
        Malformed file; the message names the offending key or position.
    StabilityError
        ``A`` is not Hurwitz (only with ``require_stable``).
    """
    path = Path(path)
    if path.is_dir():
        mats = []
        for name in ("A", "B", "C"):
            f = path / f"{name}.mtx"
            if not f.exists():
                raise ParseError(f"{path}: missing {name}.mtx")
            try:
                M = scipy.io.mmread(str(f))
            except (ValueError, OSError) as exc:
                raise ParseError(f"{f}: {exc}") from None
            mats.append(np.asarray(M.todense() if hasattr(M, "todense") else M, dtype=float))
        A, B, C = mats
    else:
        doc = _load_json(path)
        n, m, p = _dims_from_json(doc, path)
        A = _matrix_from_json(doc, "A", n, n, path)
        B = _matrix_from_json(doc, "B", n, m, path)
        C = _matrix_from_json(doc, "C", p, n, path)
    try:
        return StateSpace(A, B, C, require_stable=require_stable)
    except StabilityError as exc:
        raise StabilityError(f"{path}: {exc}", abscissa=exc.abscissa) from None
    except DimensionError as exc:
        raise DimensionError(f"{path}: {exc}") from None


def system_to_dict(sys):
    return {
        "n": sys.n,
        "m": sys.m,
        "p": sys.p,
        "A": sys.A.ravel().tolist(),
        "B": sys.B.ravel().tolist(),
        "C": sys.C.ravel().tolist(),
    }


def write_system(sys, path, metadata=None):
    """Write ``sys`` as JSON, or as MatrixMarket files if ``path`` is a directory."""
    path = Path(path)
    if path.suffix.lower() != ".json":
        path.mkdir(parents=True, exist_ok=True)
        for name, M in (("A", sys.A), ("B", sys.B), ("C", sys.C)):
            scipy.io.mmwrite(str(path / f"{name}.mtx"), M, precision=17)
        return path
    doc = system_to_dict(sys)
    if metadata is not None:
        doc["metadata"] = metadata
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1) + "\n")
    return path


def write_rom(rom, path):
    """Write a :class:`~tlbt.balancing.ReducedModel` with its metadata block."""
    meta = {
        "horizon": _json_float(rom.horizon),
        "r": rom.r,
        "sigma_kept": rom.sigma_kept.tolist(),
        "sigma_truncated": rom.sigma_truncated.tolist(),
    }
    return write_system(rom.sys_r, path, metadata=meta)


def read_rom(path):
    """Read a ROM file; returns ``(StateSpace, metadata dict)``."""
    sys = read_system(path, require_stable=False)
    doc = _load_json(path)
    return sys, doc.get("metadata", {})


def write_matrix(M, path):
    scipy.io.mmwrite(str(path), np.asarray(M), precision=17)


def write_trajectory(traj, path):
    """CSV with header ``t,y1,...,yp`` and one row per grid node."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"y{i + 1}" for i in range(traj.outputs.shape[1])])
        for t, y in zip(traj.times, traj.outputs):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in y])


def read_samples(path):
    """Read a sampled signal CSV (``t,u1,...,um`` with a header row).

    Returns ``(times, values)`` with ``values`` of shape ``(len(times), m)``.
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if not header or header[0].strip() != "t":
            raise ParseError(f"{path}: line 1: header must start with 't'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from None
    if len(rows) < 2:
        raise ParseError(f"{path}: need at least two samples")
    data = np.array(rows)
    if np.any(np.diff(data[:, 0]) <= 0):
        raise ParseError(f"{path}: sample times must be strictly increasing")
    return data[:, 0], data[:, 1:]


def _json_float(x):
    x = float(x)
    return x if np.isfinite(x) else "inf"
