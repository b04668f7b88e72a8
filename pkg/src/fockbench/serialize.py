"""JSON/CSV emitters shared by the library and the CLI.

Complex numbers are serialized as two-element [re, im] lists throughout.
All file writes go through a temp-file-and-rename so partially written
reports never appear under the final name.
"""

import csv
import hashlib
import json
import os
import tempfile

import numpy as np


def complex_to_pairs(a):
    """Nested [re, im] lists for a scalar or an arbitrary-rank array."""
    arr = np.asarray(a, dtype=complex)
    stacked = np.stack([arr.real, arr.imag], axis=-1)
    return stacked.tolist()


def pairs_to_complex(doc) -> np.ndarray:
    arr = np.asarray(doc, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex-as-pair document must end in a length-2 axis")
    return arr[..., 0] + 1j * arr[..., 1]


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def config_hash(doc) -> str:
    """Short stable hash identifying the effective run configuration."""
    return hashlib.sha256(canonical_json(doc).encode("utf-8")).hexdigest()[:12]


def derive_seed(root: int, label: str) -> int:
    """Seed-derivation tree: sha256 of "root/label", first 8 bytes.

    Every consumer of randomness derives its own stream from the one root
    seed through a distinct label, so reports are reproducible run to run.
    """
    digest = hashlib.sha256(f"{root}/{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % (2 ** 63)


def _atomic_write(path, data: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, doc):
    _atomic_write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def write_csv(path, header, rows):
    lines = []

    class _Sink:
        def write(self, s):
            lines.append(s)
            return len(s)

    writer = csv.writer(_Sink(), lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(list(row))
    _atomic_write(path, "".join(lines))


def write_text(path, text: str):
    _atomic_write(path, text)


def format_float(x: float) -> str:
    return repr(float(x))
