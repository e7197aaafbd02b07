"""CSV/JSON emitters and readers with deterministic formatting.

Floats are written with ``repr`` (shortest round-trip form) so that
identical numbers always produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .sphere import h_from_complex, h_to_complex


def fmt(x):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x + 0.0)  # folds -0.0 into 0.0


def dumps_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_json(obj))


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(buf.getvalue())


def point_cells(h):
    """``(re, im, at_infinity)`` strings for homogeneous points."""
    out = []
    for z in h_to_complex(h):
        if np.isfinite(z):
            out.append((fmt(z.real), fmt(z.imag), "0"))
        else:
            out.append(("inf", "0.0", "1"))
    return out


def point_json(h):
    z = complex(h_to_complex(h))
    if not np.isfinite(z):
        return {"re": None, "im": None, "inf": True}
    return {"re": z.real + 0.0, "im": z.imag + 0.0, "inf": False}


def measure_rows(m):
    return [(*p, fmt(w)) for p, w in zip(point_cells(m.h), m.weights)]


def write_measure_csv(path, m):
    write_csv(path, ["re", "im", "at_infinity", "weight"], measure_rows(m))


def read_measure_csv(path):
    """Inverse of ``write_measure_csv``; returns ``(h, weights)``."""
    zs, ws = [], []
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            if row["at_infinity"] == "1":
                zs.append(complex(np.inf, 0))
            else:
                zs.append(complex(float(row["re"]), float(row["im"])))
            ws.append(float(row["weight"]))
    return h_from_complex(np.array(zs, dtype=complex)), np.array(ws)


def word_label(indices):
    return "-".join(str(j) for j in indices)
