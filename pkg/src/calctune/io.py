"""Readers and writers for the pipeline's intermediate files."""
import csv
import json

import numpy as np

from .calculi import CALCULI, params_from_json
from .core import CELL_NAMES, LOAD_SUM_TOL, JointTable
from .errors import InvalidTable

NETWORK_HEADER = ("id",) + CELL_NAMES
NORMS_HEADER = ("network_id", "p1", "p2", "posterior_c", "iterations", "residual")
RMSE_HEADER = ("network_id", "additivity") + CALCULI


def fmt(x):
    """Shortest text that round-trips a float exactly."""
    return repr(float(x))


def write_networks(path, ids, tables):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(NETWORK_HEADER)
        for nid, table in zip(ids, tables):
            w.writerow([nid] + [fmt(v) for v in table.cells])


def read_networks(path):
    """Return ``(ids, tables)``; near-unit sums are renormalised, others rejected."""
    ids, tables = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(NETWORK_HEADER) - set(reader.fieldnames or ())
        if missing:
            raise InvalidTable("%s: missing columns %s" % (path, sorted(missing)))
        for lineno, row in enumerate(reader, start=2):
            try:
                cells = [float(row[name]) for name in CELL_NAMES]
                tables.append(JointTable.from_cells(cells, renormalize_tol=LOAD_SUM_TOL))
            except (ValueError, InvalidTable) as exc:
                raise InvalidTable("%s:%d: %s" % (path, lineno, exc)) from None
            ids.append(row["id"])
    return ids, tables


def write_norms(path, rows):
    """``rows``: iterable of ``(network_id, p1, p2, posterior_c, iterations, residual)``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(NORMS_HEADER)
        for nid, p1, p2, pc, it, res in rows:
            w.writerow([nid, fmt(p1), fmt(p2), fmt(pc), int(it), fmt(res)])


def read_norms(path):
    """Norm rows grouped by network id, preserving file order."""
    grouped = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            grouped.setdefault(row["network_id"], []).append(
                (float(row["p1"]), float(row["p2"]), float(row["posterior_c"]),
                 int(row["iterations"]), float(row["residual"])))
    return grouped


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=False, allow_nan=False)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def tuned_from_doc(doc):
    """Split a tuned-parameter document into ``(config, {id: {calculus: params}})``."""
    tuned = {}
    for entry in doc["networks"]:
        tuned[entry["network_id"]] = {
            name: params_from_json(obj) for name, obj in entry["calculi"].items()}
    return doc.get("config", {}), tuned


def read_tuned(path):
    return tuned_from_doc(read_json(path))


def write_rmse_table(path, rows, methods):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("network_id", "additivity") + tuple(methods))
        for nid, add, values in rows:
            w.writerow([nid, fmt(add)] + [fmt(values[m]) for m in methods])


def read_rmse_table(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        methods = [m for m in reader.fieldnames if m in CALCULI]
        rows = [(r["network_id"], float(r["additivity"]),
                 {m: float(r[m]) for m in methods}) for r in reader]
    return methods, rows


def as_array(rows, method):
    return np.array([values[method] for _, _, values in rows])
