import hashlib
import logging
import struct

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from goldbach_lab.cache import (
    HEADER,
    Cache,
    cache_roundtrip,
    file_digest,
    read_series,
    read_table,
    write_series,
    write_table,
)
from goldbach_lab.errors import CacheFormatError
from goldbach_lab.goldbach import Method, goldbach_direct, goldbach_fast
from goldbach_lab.mangoldt import (
    WeightKind,
    build_custom_table,
    build_mangoldt_table,
    build_unit_table,
)


def test_unit_roundtrip(tmp_path):
    t = build_unit_table(10)
    back = cache_roundtrip(t, tmp_path / "u.gbps")
    assert back.kind is WeightKind.UNIT
    assert back.values.tobytes() == t.values.tobytes()


def test_von_mangoldt_roundtrip_bit_exact(tmp_path):
    t = build_mangoldt_table(10**5)
    path = tmp_path / "lam.gbps"
    digest = write_table(path, t)
    back = read_table(path)
    assert back.values.tobytes() == t.values.tobytes()
    assert hashlib.sha256(back.values.tobytes()).hexdigest() == \
        hashlib.sha256(t.values.tobytes()).hexdigest()
    write_table(tmp_path / "again.gbps", back)
    assert file_digest(tmp_path / "again.gbps") == digest


def test_header_layout(tmp_path):
    path = tmp_path / "h.gbps"
    write_table(path, build_mangoldt_table(3))
    data = path.read_bytes()
    assert data[:4] == b"GBPS"
    assert struct.unpack_from("<I", data, 4) == (1,)
    assert data[8] == 0
    assert struct.unpack_from("<Q", data, 9) == (3,)
    assert len(data) == 17 + 3 * 8
    assert np.frombuffer(data[17:], "<f8")[2] == np.log(3)


def test_corrupted_magic(tmp_path):
    path = tmp_path / "bad.gbps"
    write_table(path, build_unit_table(8))
    data = bytearray(path.read_bytes())
    data[0] ^= 0xFF
    path.write_bytes(bytes(data))
    with pytest.raises(CacheFormatError, match="magic"):
        read_table(path)


@pytest.mark.parametrize("mutate,match", [
    (lambda d: d[:4] + struct.pack("<I", 99) + d[8:], "version"),
    (lambda d: d[:-8], "length"),
    (lambda d: d[:10], "truncated"),
])
def test_format_errors(tmp_path, mutate, match):
    path = tmp_path / "x.gbps"
    write_table(path, build_unit_table(8))
    path.write_bytes(mutate(path.read_bytes()))
    with pytest.raises(CacheFormatError, match=match):
        read_table(path)


def test_series_roundtrip(tmp_path):
    lam = build_mangoldt_table(300)
    for series in (goldbach_direct(lam, 200), goldbach_fast(lam, 301)):
        path = tmp_path / f"{series.method.value}.gbps"
        write_series(path, series)
        back = read_series(path)
        assert back.g.tobytes() == series.g.tobytes()
        assert back.method is series.method and back.source_kind is WeightKind.VON_MANGOLDT
    with pytest.raises(CacheFormatError):
        read_table(tmp_path / "fast.gbps")
    write_table(tmp_path / "plain.gbps", lam)
    with pytest.raises(CacheFormatError):
        read_series(tmp_path / "plain.gbps")


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=50))
def test_custom_roundtrip_property(tmp_path, values):
    t = build_custom_table(values)
    back = cache_roundtrip(t, tmp_path / "c.gbps")
    assert back.kind is WeightKind.CUSTOM
    assert back.values.tobytes() == t.values.tobytes()


class TestCacheDirectory:
    def test_reuse_and_checksum(self, tmp_path):
        cache = Cache(tmp_path)
        calls = []

        def build():
            calls.append(1)
            return build_mangoldt_table(1000)

        a = cache.table(WeightKind.VON_MANGOLDT, 1000, build)
        b = cache.table(WeightKind.VON_MANGOLDT, 1000, build)
        assert len(calls) == 1
        assert a.values.tobytes() == b.values.tobytes()
        assert (tmp_path / "weights-von_mangoldt-1000.gbps.sha256").exists()

    def test_corrupt_file_is_recomputed(self, tmp_path, caplog):
        cache = Cache(tmp_path)
        cache.table(WeightKind.UNIT, 50, lambda: build_unit_table(50))
        path = tmp_path / "weights-unit-50.gbps"
        data = bytearray(path.read_bytes())
        data[-1] ^= 1
        path.write_bytes(bytes(data))
        calls = []
        with caplog.at_level(logging.WARNING):
            t = cache.table(WeightKind.UNIT, 50, lambda: calls.append(1) or build_unit_table(50))
        assert calls and "checksum" in caplog.text
        assert np.all(t.values == 1)

    def test_mismatched_n_max_never_reused(self, tmp_path, caplog):
        cache = Cache(tmp_path)
        cache.table(WeightKind.UNIT, 50, lambda: build_unit_table(50))
        # plant a 60-entry table under the 50-entry name, with a valid sidecar
        path = tmp_path / "weights-unit-50.gbps"
        digest = write_table(path, build_unit_table(60))
        path.with_name(path.name + ".sha256").write_text(digest)
        with caplog.at_level(logging.WARNING):
            t = cache.table(WeightKind.UNIT, 50, lambda: build_unit_table(50))
        assert t.n_max == 50 and "n_max" in caplog.text

    def test_series_cache(self, tmp_path):
        cache = Cache(tmp_path)
        lam = build_mangoldt_table(99)
        s1 = cache.series(WeightKind.VON_MANGOLDT, Method.FAST, 100, lambda: goldbach_fast(lam, 100))
        s2 = cache.series(WeightKind.VON_MANGOLDT, Method.FAST, 100, lambda: 1 / 0)
        assert s1.g.tobytes() == s2.g.tobytes()

    def test_from_env(self, tmp_path, monkeypatch):
        monkeypatch.delenv("GBPS_CACHE_DIR", raising=False)
        assert Cache.from_env() is None
        monkeypatch.setenv("GBPS_CACHE_DIR", str(tmp_path / "c"))
        assert Cache.from_env().directory == tmp_path / "c"


def test_header_struct_size():
    assert HEADER.size == 17
