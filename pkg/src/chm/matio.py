"""Shared matrix serialisation: JSON header + base64 payload, plus heatmap CSV.

Same payload encoding as the CMatrix format (interleaved re/im doubles,
row-major); used for derived matrices (covariance, correlation, kernels)
whose rows and columns are frequency labels.
"""

from __future__ import annotations

import base64
import csv
import json
from pathlib import Path

import numpy as np

MATRIX_FORMAT_VERSION = 1


def save_matrix(path, matrix: np.ndarray, row_labels, col_labels, provenance: dict, kind: str) -> None:
    matrix = np.asarray(matrix, dtype=complex)
    payload = np.empty(matrix.size * 2, dtype="<f8")
    flat = matrix.ravel(order="C")
    payload[0::2] = flat.real
    payload[1::2] = flat.imag
    doc = {
        "version": MATRIX_FORMAT_VERSION,
        "kind": kind,
        "row_labels": [str(r) for r in row_labels],
        "col_labels": [str(c) for c in col_labels],
        "shape": list(matrix.shape),
        "provenance": provenance,
        "payload": base64.b64encode(payload.tobytes()).decode("ascii"),
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True))


def load_matrix(path):
    doc = json.loads(Path(path).read_text())
    if doc.get("version") != MATRIX_FORMAT_VERSION:
        raise ValueError(f"unsupported matrix format version {doc.get('version')!r}")
    raw = np.frombuffer(base64.b64decode(doc["payload"]), dtype="<f8")
    matrix = (raw[0::2] + 1j * raw[1::2]).reshape(doc["shape"])
    return matrix, doc["row_labels"], doc["col_labels"], doc["provenance"], doc["kind"]


def matrix_csv(path, matrix: np.ndarray, row_labels, col_labels) -> None:
    """Heatmap-ready rows: row label, col label, re, im, abs."""
    matrix = np.asarray(matrix, dtype=complex)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "col", "re", "im", "abs"])
        for i, r in enumerate(row_labels):
            for j, c in enumerate(col_labels):
                v = matrix[i, j]
                writer.writerow([r, c, repr(v.real), repr(v.imag), repr(abs(v))])


def complex_matrix_json(matrix: np.ndarray) -> dict:
    """Embeddable form for small matrices inside reports."""
    matrix = np.asarray(matrix, dtype=complex)
    return {"re": matrix.real.tolist(), "im": matrix.imag.tolist()}


def complex_matrix_from_json(doc: dict) -> np.ndarray:
    return np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc["im"], dtype=float)
