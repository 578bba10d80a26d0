"""Matrix file formats: Matrix Market array text and a compact binary form.

The text side goes through scipy's Matrix Market support with enough
precision that float64 values round-trip exactly.  The binary layout is:
magic ``GLUM``, two little-endian uint64 dimensions, then the entries as
little-endian float64 in column-major order.
"""

import struct

import numpy as np
import scipy.io

from .validation import check_matrix

GLUM_MAGIC = b"GLUM"
_HEADER = struct.Struct("<4sQQ")


def write_matrix(path, A):
    """Write by extension: ``.mtx`` Matrix Market array, ``.glum`` binary."""
    A = check_matrix(A)
    path = str(path)
    if path.endswith(".mtx"):
        scipy.io.mmwrite(path, A, precision=17)
    elif path.endswith(".glum"):
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(GLUM_MAGIC, A.shape[0], A.shape[1]))
            fh.write(np.asfortranarray(A).astype("<f8").tobytes(order="F"))
    else:
        raise ValueError(f"unsupported matrix file extension: {path}")
    return path


def read_matrix(path):
    path = str(path)
    if path.endswith(".mtx"):
        A = np.asarray(scipy.io.mmread(path), dtype=np.float64)
        if A.ndim != 2:
            raise ValueError(f"{path} does not hold a 2-d array")
        return A
    if path.endswith(".glum"):
        with open(path, "rb") as fh:
            raw = fh.read(_HEADER.size)
            if len(raw) != _HEADER.size:
                raise ValueError(f"{path}: truncated header")
            magic, rows, cols = _HEADER.unpack(raw)
            if magic != GLUM_MAGIC:
                raise ValueError(f"{path}: bad magic {magic!r}")
            data = np.frombuffer(fh.read(), dtype="<f8")
        if data.size != rows * cols:
            raise ValueError(f"{path}: expected {rows * cols} entries, found {data.size}")
        return data.reshape((rows, cols), order="F").copy()
    raise ValueError(f"unsupported matrix file extension: {path}")
