"""File formats.

* Spins: integer CSV, one observation per row, entries -1/+1.
* Models: ``j,k,weight`` edge lists, 1-based with ``j < k``, nonzero pairs only.
* Graphs: ``j k`` per line, 1-based.
* Row selections: one 1-based row index per line.
* Reports: JSON.

Every file written here starts with a metadata header. CSV files carry it
as a single ``# {json}`` comment line, which the readers return so a
read-then-write reproduces the file byte for byte.
"""

import hashlib
import json
import math

import numpy as np

from .model import K_from_pairs, as_values, check_spins, n_pairs, pair_index
from .simulate import GraphSpec


def config_hash(params):
    blob = json.dumps(_clean(params), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _clean_float(x):
    return x if math.isfinite(x) else None


def _clean(obj):
    """Replace non-finite floats by None so the JSON stays standard."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float):
        return _clean_float(obj)
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def header_line(meta):
    return "# " + json.dumps(_clean(meta), sort_keys=True, separators=(",", ":")) + "\n"


def _split_header(lines):
    meta = {}
    body = []
    for line in lines:
        if line.startswith("#"):
            if not meta:
                text = line[1:].strip()
                try:
                    meta = json.loads(text) if text else {}
                except json.JSONDecodeError:
                    meta = {}
            continue
        if line.strip():
            body.append(line)
    return meta, body


def _read_lines(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def write_spins(path, X, meta=None):
    X = check_spins(X).astype(np.int64)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header_line(meta or {}))
        for row in X:
            fh.write(",".join(str(v) for v in row) + "\n")


def parse_spins(lines, zero_one=False):
    rows = []
    width = None
    for i, line in enumerate(lines, 1):
        try:
            row = [int(tok) for tok in line.split(",")]
        except ValueError:
            raise ValueError(f"row {i}: entries must be integers") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ValueError(f"row {i}: expected {width} columns, got {len(row)}")
        rows.append(row)
    if not rows:
        raise ValueError("no observations")
    X = np.array(rows, dtype=np.int64)
    if zero_one:
        if not np.isin(X, (0, 1)).all():
            raise ValueError("--zero-one data must contain only 0 and 1")
        X = 2 * X - 1
    elif not np.isin(X, (-1, 1)).all():
        raise ValueError("spins must be -1 or +1 (use the zero-one mapping for 0/1 data)")
    return X.astype(np.int8)


def read_spins(path, zero_one=False):
    """Return ``(X, meta)`` with X an int8 (N, K) array of +-1."""
    meta, body = _split_header(_read_lines(path))
    return parse_spins(body, zero_one), meta


def format_float(x):
    return repr(float(x))


def write_edges(path, beta, meta=None, extra=None):
    """Write nonzero couplings as ``j,k,weight`` rows (1-based, j < k).

    ``extra`` maps column name to a per-pair array written after the weight.
    """
    beta = as_values(beta)
    K = K_from_pairs(beta.size)
    meta = dict(meta or {})
    meta["K"] = K
    cols = ["j", "k", "weight"] + list(extra or {})
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header_line(meta))
        fh.write(",".join(cols) + "\n")
        idx = 0
        for j in range(K):
            for k in range(j + 1, K):
                if beta[idx] != 0:
                    vals = [format_float(beta[idx])]
                    vals += [format_float(v[idx]) for v in (extra or {}).values()]
                    fh.write(f"{j + 1},{k + 1}," + ",".join(vals) + "\n")
                idx += 1


def read_edges(path, K=None):
    """Return ``(beta, meta)`` from an edge-list file.

    ``K`` comes from the argument, else the header, else the largest index.
    """
    meta, body = _split_header(_read_lines(path))
    if body and body[0].split(",")[0].strip() == "j":
        body = body[1:]
    entries = []
    for i, line in enumerate(body, 1):
        parts = line.split(",")
        if len(parts) < 3:
            raise ValueError(f"edge row {i}: expected j,k,weight")
        try:
            j, k, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ValueError(f"edge row {i}: malformed entry {line!r}") from None
        if not 1 <= j < k:
            raise ValueError(f"edge row {i}: need 1 <= j < k, got {j},{k}")
        entries.append((j - 1, k - 1, w))
    if K is None:
        K = meta.get("K")
    if K is None:
        K = max((k + 1 for _, k, _ in entries), default=0)
    K = int(K)
    beta = np.zeros(n_pairs(K))
    for j, k, w in entries:
        if k >= K:
            raise ValueError(f"edge ({j + 1},{k + 1}) out of range for K={K}")
        beta[pair_index(j, k, K)] = w
    return beta, meta


def read_graph(path, K, tag="file"):
    """Read a ``j k`` edge list (1-based) into a :class:`GraphSpec`."""
    _, body = _split_header(_read_lines(path))
    edges = []
    for i, line in enumerate(body, 1):
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ValueError(f"graph row {i}: expected 'j k'")
        j, k = int(parts[0]), int(parts[1])
        if not 1 <= j < k <= K:
            raise ValueError(f"graph row {i}: need 1 <= j < k <= {K}, got {j} {k}")
        edges.append((j - 1, k - 1))
    return GraphSpec(K, edges, tag)


def read_rows(path, N):
    """1-based row indices, one per line, returned 0-based."""
    _, body = _split_header(_read_lines(path))
    try:
        rows = np.array([int(line) for line in body], dtype=np.int64)
    except ValueError:
        raise ValueError("row index file must hold one integer per line") from None
    if rows.size == 0:
        raise ValueError("row index file is empty")
    if rows.min() < 1 or rows.max() > N:
        raise ValueError(f"row indices must lie in [1, {N}]")
    return rows - 1


def write_table(path, columns, rows, meta=None):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header_line(meta or {}))
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def write_json(path, payload, meta=None):
    doc = {"header": meta or {}}
    doc.update(payload)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_clean(doc), fh, sort_keys=True, indent=2, allow_nan=False)
        fh.write("\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
