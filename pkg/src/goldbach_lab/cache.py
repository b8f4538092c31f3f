"""Binary cache files for weight tables and Goldbach series.

Layout (all little-endian)::

    b"GBPS" | uint32 version | uint8 kind tag | uint64 n_max | n_max float64

Weight tables use the :class:`~goldbach_lab.mangoldt.WeightKind` value as the
tag.  Goldbach series set bit 0x80 on top of the source weight kind, and bit
0x40 when the series came from the fast transform; their payload is
G(1), ..., G(n_max).  A ``.sha256`` sidecar holds the digest of the file.
"""

from __future__ import annotations

import hashlib
import logging
import os
import struct
from pathlib import Path

import numpy as np

from .errors import CacheFormatError
from .goldbach import GoldbachSeries, Method
from .mangoldt import WeightKind, WeightTable

MAGIC = b"GBPS"
VERSION = 1
HEADER = struct.Struct("<4sIBQ")
SERIES_FLAG = 0x80
FAST_FLAG = 0x40
CACHE_ENV = "GBPS_CACHE_DIR"

log = logging.getLogger(__name__)


def _write(path, tag: int, payload: np.ndarray) -> str:
    data = HEADER.pack(MAGIC, VERSION, tag, len(payload)) + payload.astype("<f8").tobytes()
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)
    return hashlib.sha256(data).hexdigest()


def _read(path) -> tuple[int, np.ndarray]:
    data = Path(path).read_bytes()
    if len(data) < HEADER.size:
        raise CacheFormatError(f"{path}: truncated header")
    magic, version, tag, n_max = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CacheFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise CacheFormatError(f"{path}: unsupported format version {version}")
    if len(data) != HEADER.size + 8 * n_max:
        raise CacheFormatError(f"{path}: payload length does not match n_max = {n_max}")
    payload = np.frombuffer(data, dtype="<f8", offset=HEADER.size).astype(np.float64)
    return tag, payload


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_table(path, table: WeightTable) -> str:
    """Write a weight table; returns the SHA-256 of the file."""
    return _write(path, int(table.kind), table.values)


def read_table(path) -> WeightTable:
    tag, payload = _read(path)
    try:
        kind = WeightKind(tag)
    except ValueError:
        raise CacheFormatError(f"{path}: kind tag {tag:#x} is not a weight table") from None
    coeffs = np.concatenate(([0.0], payload))
    coeffs.flags.writeable = False
    return WeightTable(len(payload), kind, coeffs)


def cache_roundtrip(table: WeightTable, path) -> WeightTable:
    write_table(path, table)
    return read_table(path)


def write_series(path, series: GoldbachSeries) -> str:
    tag = SERIES_FLAG | int(series.source_kind) | (FAST_FLAG if series.method is Method.FAST else 0)
    return _write(path, tag, series.g[1:])


def read_series(path) -> GoldbachSeries:
    tag, payload = _read(path)
    if not tag & SERIES_FLAG:
        raise CacheFormatError(f"{path}: kind tag {tag:#x} is not a Goldbach series")
    try:
        kind = WeightKind(tag & 0x3F)
    except ValueError:
        raise CacheFormatError(f"{path}: unknown source kind in tag {tag:#x}") from None
    method = Method.FAST if tag & FAST_FLAG else Method.DIRECT
    g = np.concatenate(([0.0], payload))
    g.flags.writeable = False
    return GoldbachSeries(len(payload), g, kind, method)


class Cache:
    """Directory of checksummed cache files keyed by kind and size."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    @classmethod
    def from_env(cls, directory=None):
        directory = directory or os.environ.get(CACHE_ENV)
        return cls(directory) if directory else None

    def _path(self, stem):
        return self.directory / f"{stem}.gbps"

    def _valid(self, path) -> bool:
        side = path.with_name(path.name + ".sha256")
        if not path.exists() or not side.exists():
            return False
        return side.read_text().strip() == file_digest(path)

    def _store(self, path, digest):
        path.with_name(path.name + ".sha256").write_text(digest + "\n")

    def load(self, stem, reader, n_max, kind):
        path = self._path(stem)
        if not path.exists():
            return None
        try:
            if not self._valid(path):
                raise CacheFormatError(f"{path}: checksum mismatch")
            obj = reader(path)
            if obj.n_max != n_max:
                raise CacheFormatError(f"{path}: holds n_max = {obj.n_max}, wanted {n_max}")
            found = obj.kind if isinstance(obj, WeightTable) else obj.source_kind
            if found is not kind:
                raise CacheFormatError(f"{path}: holds {found.name}, wanted {kind.name}")
        except CacheFormatError as exc:
            log.warning("ignoring unusable cache file, recomputing: %s", exc)
            return None
        return obj

    def table(self, kind: WeightKind, n_max: int, build):
        stem = f"weights-{kind.name.lower()}-{n_max}"
        table = self.load(stem, read_table, n_max, kind)
        if table is None:
            table = build()
            path = self._path(stem)
            self._store(path, write_table(path, table))
        return table

    def series(self, kind: WeightKind, method: Method, n_max: int, build):
        stem = f"goldbach-{kind.name.lower()}-{method.value}-{n_max}"
        series = self.load(stem, read_series, n_max, kind)
        if series is None:
            series = build()
            path = self._path(stem)
            self._store(path, write_series(path, series))
        return series
