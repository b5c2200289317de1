"""Embedding text files and the binary model container.

Model file layout::

    magic     8 bytes  b"ETSRMDL\\0"
    version   u32 LE
    hlen      u32 LE   length of the JSON header
    header    hlen bytes, UTF-8 JSON (config, vocab, arrays, meta)
    arrays    '<f8' payloads in header order
    sha256    32 bytes over everything before it
"""
from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .model import ConfigError, Model, ModelConfig

MAGIC = b"ETSRMDL\0"
FORMAT_VERSION = 1


class ModelFileError(ValueError):
    pass


def read_embeddings(path: str | Path, dim: Optional[int] = None,
                    keep: Optional[Iterable[str]] = None, lowercase: bool = True) -> dict[str, np.ndarray]:
    """Read a GloVe-style text file: a token followed by its vector on each line.

    A leading word2vec ``count dim`` header line is skipped. ``keep`` limits
    loading to the given tokens. Lines whose width differs from the first
    vector (or ``dim``) raise.
    """
    wanted = None if keep is None else {t.lower() if lowercase else t for t in keep}
    out: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").rstrip().split(" ")
            if not parts or parts == [""]:
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue
            tok, vals = parts[0], parts[1:]
            if dim is None:
                dim = len(vals)
            if len(vals) != dim:
                raise ValueError(f"{path}:{lineno}: expected {dim} values, got {len(vals)}")
            if lowercase:
                tok = tok.lower()
            if (wanted is not None and tok not in wanted) or tok in out:
                continue
            vec = np.array([float(v) for v in vals])
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"{path}:{lineno}: non-finite value")
            out[tok] = vec
    return out


def save_model(model: Model, path: str | Path, meta: Optional[dict] = None) -> None:
    names = sorted(model.params)
    header = {
        "config": model.config.to_dict(),
        "vocab": model.vocab,
        "arrays": [{"name": n, "shape": list(model.params[n].shape)} for n in names],
        "meta": meta or {},
    }
    hbytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    body = bytearray(MAGIC)
    body += struct.pack("<II", FORMAT_VERSION, len(hbytes))
    body += hbytes
    for n in names:
        body += np.ascontiguousarray(model.params[n], dtype="<f8").tobytes()
    body += hashlib.sha256(body).digest()
    Path(path).write_bytes(bytes(body))


def load_model(path: str | Path) -> tuple[Model, dict]:
    """Load a model file and return ``(model, meta)``; corrupt or foreign files raise."""
    data = Path(path).read_bytes()
    if len(data) < len(MAGIC) + 8 + 32 or data[:len(MAGIC)] != MAGIC:
        raise ModelFileError(f"{path}: not a model file")
    payload, digest = data[:-32], data[-32:]
    version, hlen = struct.unpack_from("<II", data, len(MAGIC))
    if version != FORMAT_VERSION:
        raise ModelFileError(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    if hashlib.sha256(payload).digest() != digest:
        raise ModelFileError(f"{path}: checksum mismatch")
    off = len(MAGIC) + 8
    try:
        header = json.loads(payload[off:off + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFileError(f"{path}: bad header: {exc}") from None
    off += hlen
    params = {}
    for entry in header["arrays"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape, dtype=np.int64))
        end = off + 8 * count
        if end > len(payload):
            raise ModelFileError(f"{path}: truncated array {entry['name']}")
        params[entry["name"]] = np.frombuffer(payload[off:end], dtype="<f8").astype(np.float64).reshape(shape)
        off = end
    if off != len(payload):
        raise ModelFileError(f"{path}: {len(payload) - off} trailing bytes")
    try:
        model = Model(ModelConfig(**header["config"]), header["vocab"], params)
    except (ConfigError, TypeError) as exc:
        raise ModelFileError(f"{path}: {exc}") from None
    return model, header.get("meta", {})
