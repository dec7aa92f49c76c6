"""Loading :class:`~qsvtkit.blockenc.SparseHermitian` matrices from disk.

Two formats are accepted:

* Matrix Market coordinate files (``.mtx``), read with :func:`scipy.io.mmread`;
  ``symmetric`` / ``hermitian`` storage is expanded by scipy.
* JSON documents ``{"dim": n, "sparsity": s, "entries": [[i, j, re, im], ...]}``
  with 0-based indices and an optional ``"kappa"``.  Both triangles must be
  listed.
"""

import json
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse

from qsvtkit.blockenc import SparseHermitian


class MatrixFormatError(ValueError):
    """Raised when a matrix file cannot be parsed."""


def load_matrix_market(path, sparsity=None, kappa=None):
    try:
        data = scipy.io.mmread(str(path))
    except (OSError, ValueError, IndexError) as exc:
        raise MatrixFormatError(f"{path}: {exc}") from exc
    dense = data.toarray() if scipy.sparse.issparse(data) else np.asarray(data)
    return SparseHermitian.from_dense(dense, sparsity=sparsity, kappa=kappa)


def matrix_from_json(doc):
    try:
        dim = int(doc["dim"])
        raw = doc["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFormatError(f"malformed matrix document: {exc}") from exc
    entries = []
    for item in raw:
        if len(item) not in (3, 4):
            raise MatrixFormatError(f"entry {item!r} must be [i, j, re] or [i, j, re, im]")
        i, j, re = int(item[0]), int(item[1]), float(item[2])
        im = float(item[3]) if len(item) == 4 else 0.0
        entries.append((i, j, complex(re, im)))
    dense = np.zeros((dim, dim), dtype=complex)
    for i, j, v in entries:
        if not (0 <= i < dim and 0 <= j < dim):
            raise MatrixFormatError(f"entry ({i}, {j}) outside a {dim}x{dim} matrix")
        dense[i, j] += v
    return SparseHermitian.from_dense(dense, sparsity=doc.get("sparsity"), kappa=doc.get("kappa"))


def load_json_matrix(path):
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MatrixFormatError(f"{path}: {exc}") from exc
    return matrix_from_json(doc)


def matrix_to_json(mat):
    """JSON document for ``mat`` (unpadded entries)."""
    return {
        "dim": mat.orig_dim,
        "sparsity": mat.sparsity,
        "kappa": mat.kappa,
        "entries": [[i, j, v.real, v.imag] for i, j, v in mat.entries],
    }


def load_matrix(path, sparsity=None, kappa=None):
    """Dispatch on file suffix: ``.json`` or Matrix Market otherwise."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        mat = load_json_matrix(path)
        if sparsity is None and kappa is None:
            return mat
        return SparseHermitian.from_dense(
            mat.to_dense(padded=False),
            sparsity=sparsity or mat.sparsity,
            kappa=kappa or mat.kappa,
        )
    return load_matrix_market(path, sparsity=sparsity, kappa=kappa)
