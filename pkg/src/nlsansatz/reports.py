"""Report and sample-file writers: JSON, aligned text, CSV.

All writes are atomic (temp file in the target directory, then rename), so
a failing run never leaves a partial report.  JSON is dumped with sorted
keys and no timestamps: identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, payload: dict) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _fmt(value) -> str:
    return repr(float(value))


def write_solution_csv(path, T, X, values, coord_names=None) -> None:
    """Columns: coordinates, re, im, modulus ('.' decimal, no locale)."""
    T = np.asarray(T, dtype=float).reshape(-1)
    X = np.asarray(X, dtype=float)
    values = np.asarray(values)
    n = X.shape[-1]
    if coord_names is None:
        coord_names = ["t"] + [f"x{i + 1}" for i in range(n)]
    rows = []
    for i in range(T.size):
        v = complex(values[i])
        rows.append(
            [_fmt(T[i])]
            + [_fmt(X[i, a]) for a in range(n)]
            + [_fmt(v.real), _fmt(v.imag), _fmt(abs(v))]
        )
    _write_csv(path, coord_names + ["re", "im", "modulus"], rows)


def write_profile_csv(path, omega, values) -> None:
    """Sampled phi(omega): columns omega, re, im, modulus."""
    omega = np.asarray(omega, dtype=float).reshape(-1)
    values = np.asarray(values)
    rows = []
    for i in range(omega.size):
        v = complex(values[i])
        rows.append([_fmt(omega[i]), _fmt(v.real), _fmt(v.imag), _fmt(abs(v))])
    _write_csv(path, ["omega", "re", "im", "modulus"], rows)


def write_field_csv(path, T, X, columns: dict, t_name: str = "t") -> None:
    """Generic coordinate export with named real-valued columns."""
    T = np.asarray(T, dtype=float).reshape(-1)
    X = np.asarray(X, dtype=float)
    n = X.shape[-1]
    names = [t_name] + [f"x{i + 1}" for i in range(n)] + list(columns)
    cols = {k: np.asarray(v, dtype=float).reshape(-1) for k, v in columns.items()}
    rows = []
    for i in range(T.size):
        rows.append(
            [_fmt(T[i])]
            + [_fmt(X[i, a]) for a in range(n)]
            + [_fmt(cols[k][i]) for k in columns]
        )
    _write_csv(path, names, rows)


def _write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
