"""Deterministic binary packing of named numpy arrays plus a JSON header.

Layout::

    MAGIC (8 bytes) | header length (uint64 LE) | header (UTF-8 JSON) | blob

The header lists every array with dtype, shape and byte offset into the blob.
Keys are sorted so equal content always yields equal bytes.
"""

import hashlib
import json
import struct

import numpy as np

MAGIC = b"RKPACK01"


def array_table(arrays):
    """Return (table, blob) for a mapping of name -> ndarray."""
    table = {}
    chunks = []
    offset = 0
    for name in sorted(arrays):
        a = np.ascontiguousarray(arrays[name])
        dt = a.dtype.newbyteorder("<") if a.dtype.itemsize > 1 else a.dtype
        raw = a.astype(dt, copy=False).tobytes()
        table[name] = {"dtype": dt.str, "shape": list(a.shape), "offset": offset, "nbytes": len(raw)}
        chunks.append(raw)
        offset += len(raw)
    return table, b"".join(chunks)


def arrays_from_table(table, blob):
    out = {}
    for name, info in table.items():
        raw = blob[info["offset"]: info["offset"] + info["nbytes"]]
        a = np.frombuffer(raw, dtype=np.dtype(info["dtype"])).reshape(info["shape"])
        out[name] = a.astype(a.dtype.newbyteorder("="), copy=True)
    return out


def pack(meta, arrays):
    table, blob = array_table(arrays)
    header = json.dumps({"meta": meta, "arrays": table}, sort_keys=True,
                        separators=(",", ":")).encode("utf-8")
    return MAGIC + struct.pack("<Q", len(header)) + header + blob


def unpack(data):
    if data[:8] != MAGIC:
        raise ValueError("not a rocktype packed file (bad magic)")
    (n,) = struct.unpack("<Q", data[8:16])
    header = json.loads(data[16:16 + n].decode("utf-8"))
    return header["meta"], arrays_from_table(header["arrays"], data[16 + n:])


def digest_bytes(data):
    return hashlib.sha256(data).hexdigest()


def digest_json(obj):
    return digest_bytes(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8"))
