"""CRC32C (Castagnoli) checksums for record framing.

Record payloads are checksummed with the reflected 0x1EDC6F41 polynomial.
When numba is importable the slice-by-8 kernel runs at memory speed; without
it a table-driven pure-Python loop is used (correct, slow, fine for small
stores).
"""

import numpy as np

_POLY = 0x82F63B78  # reflected CRC32C


def _make_tables() -> np.ndarray:
    tabs = np.zeros((8, 256), dtype=np.uint32)
    for n in range(256):
        c = n
        for _ in range(8):
            c = (c >> 1) ^ _POLY if (c & 1) else (c >> 1)
        tabs[0, n] = c
    for n in range(256):
        c = int(tabs[0, n])
        for k in range(1, 8):
            c = int(tabs[0, c & 0xFF]) ^ (c >> 8)
            tabs[k, n] = c
    return tabs


_TABLES = _make_tables()
_T0 = _TABLES[0]

try:
    from numba import njit, uint32
    from numba.core import types as _nbt

    _ro_u8 = _nbt.Array(_nbt.uint8, 1, "C", readonly=True)
    _rw_u8 = _nbt.Array(_nbt.uint8, 1, "C")
    _ro_i64 = _nbt.Array(_nbt.int64, 1, "C", readonly=True)

    @njit(_nbt.uint32(_ro_u8, _nbt.uint32), cache=True)
    def _crc_kernel(data, crc):  # pragma: no cover - exercised via wrapper
        c = crc ^ uint32(0xFFFFFFFF)
        t = _TABLES
        n = data.shape[0]
        i = 0
        while n - i >= 8:
            c ^= (uint32(data[i]) | (uint32(data[i + 1]) << uint32(8))
                  | (uint32(data[i + 2]) << uint32(16))
                  | (uint32(data[i + 3]) << uint32(24)))
            c = (t[7, c & uint32(0xFF)] ^ t[6, (c >> uint32(8)) & uint32(0xFF)]
                 ^ t[5, (c >> uint32(16)) & uint32(0xFF)] ^ t[4, c >> uint32(24)]
                 ^ t[3, data[i + 4]] ^ t[2, data[i + 5]]
                 ^ t[1, data[i + 6]] ^ t[0, data[i + 7]])
            i += 8
        while i < n:
            c = t[0, (c ^ data[i]) & uint32(0xFF)] ^ (c >> uint32(8))
            i += 1
        return c ^ uint32(0xFFFFFFFF)

    @njit(_nbt.uint32[::1](_ro_u8, _ro_i64, _ro_i64), cache=True)
    def _crc_many_kernel(buf, starts, lengths):  # pragma: no cover
        out = np.empty(starts.shape[0], dtype=np.uint32)
        for k in range(starts.shape[0]):
            c = uint32(0xFFFFFFFF)
            t = _TABLES
            i = starts[k]
            end = i + lengths[k]
            while end - i >= 8:
                c ^= (uint32(buf[i]) | (uint32(buf[i + 1]) << uint32(8))
                      | (uint32(buf[i + 2]) << uint32(16))
                      | (uint32(buf[i + 3]) << uint32(24)))
                c = (t[7, c & uint32(0xFF)] ^ t[6, (c >> uint32(8)) & uint32(0xFF)]
                     ^ t[5, (c >> uint32(16)) & uint32(0xFF)] ^ t[4, c >> uint32(24)]
                     ^ t[3, buf[i + 4]] ^ t[2, buf[i + 5]]
                     ^ t[1, buf[i + 6]] ^ t[0, buf[i + 7]])
                i += 8
            while i < end:
                c = t[0, (c ^ buf[i]) & uint32(0xFF)] ^ (c >> uint32(8))
                i += 1
            out[k] = c ^ uint32(0xFFFFFFFF)
        return out

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


def _as_readonly_u8(data) -> np.ndarray:
    m = memoryview(data)
    if not m.readonly:
        m = m.toreadonly()
    return np.frombuffer(m, dtype=np.uint8)


def _crc_py(data, crc: int = 0) -> int:
    c = crc ^ 0xFFFFFFFF
    t = _T0
    for b in memoryview(data):
        c = int(t[(c ^ b) & 0xFF]) ^ (c >> 8)
    return c ^ 0xFFFFFFFF


if _HAVE_NUMBA:
    def crc32c(data, value: int = 0) -> int:
        """CRC32C of a bytes-like object, optionally chained from `value`."""
        return int(_crc_kernel(_as_readonly_u8(data), np.uint32(value)))

    def crc32c_many(buf, starts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
        """CRC32C of many disjoint slices of one buffer, as a uint32 array."""
        return _crc_many_kernel(_as_readonly_u8(buf),
                                np.ascontiguousarray(starts, dtype=np.int64),
                                np.ascontiguousarray(lengths, dtype=np.int64))
else:  # pragma: no cover
    def crc32c(data, value: int = 0) -> int:
        return _crc_py(data, value)

    def crc32c_many(buf, starts, lengths) -> np.ndarray:
        m = memoryview(buf)
        out = np.empty(len(starts), dtype=np.uint32)
        for k, (s, n) in enumerate(zip(starts, lengths)):
            out[k] = _crc_py(m[s:s + n])
        return out
