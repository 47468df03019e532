"""Append-only segment files with journal-backed atomic commit.

A store directory holds `segments/NNNNNNNN.seg`, `journal.bin` and a
`MANIFEST`. Records are framed as: type code (u8), payload length (u32 LE),
payload, CRC32C of the payload (u32 LE).

Commit is two-phase against a single append-only journal: buffered records
are written past the committed watermarks and fsynced, then a `prepared`
journal entry with the intended watermarks is fsynced, then a `committed`
marker. Recovery rolls a prepared-but-unmarked transaction forward when its
data verifies, otherwise truncates segments back to the last committed
watermarks. Bytes at or past a committed watermark are never rewritten.

Exactly one writer transaction may be open at a time; readers always see
the last committed watermarks.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._crc32c import crc32c, crc32c_many
from .errors import (
    CorruptJournalError,
    CorruptRecordError,
    IoFailureError,
    TransactionRequiredError,
    UnknownRefError,
    UserError,
    WriterBusyError,
)

# Record type codes (external interface).
TYPE_EVENT_V1 = 1
TYPE_EVENT_V2 = 2
TYPE_HEADER = 3
TYPE_ID = 4
TYPE_TAG = 5
TYPE_COMMON = 6
TYPE_DESCRIPTOR = 7
TYPE_DATA = 8
TYPE_COLLECTION = 9
TYPE_ACCESS_RULE = 10

RECORD_OVERHEAD = 9  # type(1) + length(4) + crc(4)

_FRAME = struct.Struct("<BI")
_CRC = struct.Struct("<I")
_OREF = struct.Struct("<IQ")
_JENTRY_HEAD = struct.Struct("<BQI")
_JSEG = struct.Struct("<IQ")

MANIFEST_NAME = "MANIFEST"
JOURNAL_NAME = "journal.bin"
SEGMENT_DIR = "segments"
JOURNAL_MAGIC = b"EVJL\x01\x00\x00\x00"
DEFAULT_SEGMENT_ROLL_BYTES = 64 * 1024 * 1024

_ST_PREPARED = 1
_ST_COMMITTED = 2

# Ordered fault-injection points inside commit(); a hook raising at any of
# these emulates a crash between two elementary steps of the protocol.
COMMIT_FAULT_POINTS = (
    "pre_data",
    "mid_data",
    "post_data_write",
    "post_data_sync",
    "mid_prepare",
    "post_prepare_write",
    "post_prepare_sync",
    "mid_commit_mark",
    "post_commit_mark_write",
    "post_commit_mark_sync",
)


@dataclass(frozen=True, slots=True)
class Oref:
    """Reference to a committed record: segment id plus byte offset."""
    segment_id: int
    offset: int

    def encode(self) -> bytes:
        return _OREF.pack(self.segment_id, self.offset)


OREF_WIRE_BYTES = _OREF.size  # 12


def decode_oref(buf, offset: int = 0) -> Oref:
    seg, off = _OREF.unpack_from(buf, offset)
    return Oref(seg, off)


def _segment_name(segment_id: int) -> str:
    return f"{segment_id:08d}.seg"


@dataclass(slots=True)
class _PendingRecord:
    segment_id: int
    offset: int
    type_code: int
    payload: object  # bytes or bytearray (patchable)


class Transaction:
    """Buffered writer transaction. Orefs are assigned eagerly but only
    dereference once the transaction commits."""

    def __init__(self, storage: "SegmentStorage", txn_id: int):
        self.storage = storage
        self.txn_id = txn_id
        self.state = "open"
        self.records: list[_PendingRecord] = []
        self._patchable: dict[Oref, int] = {}
        self._seg = storage._tail_segment
        self._off = storage._watermarks.get(self._seg, 0)
        self.base_watermarks = {self._seg: self._off}
        self.buffered_bytes = 0

    def _check_open(self):
        if self.state != "open":
            raise TransactionRequiredError(f"transaction is {self.state}")

    def _place(self, framed_len: int) -> tuple[int, int]:
        if self._off > 0 and self._off + framed_len > self.storage.segment_roll_bytes:
            self._seg += 1
            self._off = 0
            self.base_watermarks[self._seg] = 0
        placed = (self._seg, self._off)
        self._off += framed_len
        return placed

    def put(self, type_code: int, payload) -> Oref:
        self._check_open()
        payload = bytes(payload)
        seg, off = self._place(RECORD_OVERHEAD + len(payload))
        self.records.append(_PendingRecord(seg, off, type_code, payload))
        self.buffered_bytes += RECORD_OVERHEAD + len(payload)
        return Oref(seg, off)

    def reserve(self, type_code: int, payload_len: int) -> Oref:
        """Allocate a zeroed record to be patched before commit."""
        self._check_open()
        seg, off = self._place(RECORD_OVERHEAD + payload_len)
        oref = Oref(seg, off)
        self.records.append(_PendingRecord(seg, off, type_code, bytearray(payload_len)))
        self._patchable[oref] = len(self.records) - 1
        self.buffered_bytes += RECORD_OVERHEAD + payload_len
        return oref

    def patch(self, oref: Oref, field_offset: int, data: bytes) -> None:
        self._check_open()
        rec = self.records[self._patchable[oref]]
        if field_offset + len(data) > len(rec.payload):
            raise ValueError("patch out of bounds")
        rec.payload[field_offset:field_offset + len(data)] = data

    def contains(self, oref: Oref) -> bool:
        """True when `oref` was allocated by this transaction."""
        base = self.base_watermarks.get(oref.segment_id)
        if base is None:
            return False
        end = self._off if oref.segment_id == self._seg else None
        if end is None:
            # a fully rolled-over segment: anything past its base belongs to us
            return oref.offset >= base
        return base <= oref.offset < end

    def new_watermarks(self) -> dict[int, int]:
        wm = dict(self.storage._watermarks)
        for seg, base in self.base_watermarks.items():
            wm[seg] = base
        wm[self._seg] = self._off
        for seg in self.base_watermarks:
            if seg != self._seg:
                wm[seg] = self.storage.segment_roll_bytes if seg < self._seg else wm[seg]
        # rolled-over intermediate segments end where their records end
        ends: dict[int, int] = {}
        for rec in self.records:
            end = rec.offset + RECORD_OVERHEAD + len(rec.payload)
            if end > ends.get(rec.segment_id, 0):
                ends[rec.segment_id] = end
        for seg, end in ends.items():
            wm[seg] = end
        return wm


class SegmentStorage:
    """The byte-level store: segment files, journal, commit, recovery."""

    def __init__(self, root: Path, manifest: dict, watermarks: dict[int, int],
                 next_txn_id: int, journal_len: int):
        self.root = Path(root)
        self.manifest = manifest
        self.segment_roll_bytes = int(manifest.get("segment_roll_bytes",
                                                   DEFAULT_SEGMENT_ROLL_BYTES))
        self._watermarks = dict(watermarks)
        self._tail_segment = max(self._watermarks, default=0)
        self._next_txn_id = next_txn_id
        self._journal_len = journal_len
        self._writer: Transaction | None = None
        self._read_fds: dict[int, int] = {}
        self._poisoned = False
        self.fault_hook = None  # callable(point_name) for crash injection

    # ---- lifecycle ----

    @classmethod
    def init(cls, root, manifest: dict) -> "SegmentStorage":
        root = Path(root)
        seg_dir = root / SEGMENT_DIR
        if (root / MANIFEST_NAME).exists():
            raise UserError(f"store already initialized at {root}")
        seg_dir.mkdir(parents=True, exist_ok=True)
        manifest = dict(manifest)
        manifest.setdefault("segment_roll_bytes", DEFAULT_SEGMENT_ROLL_BYTES)
        (root / MANIFEST_NAME).write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
        (root / JOURNAL_NAME).write_bytes(JOURNAL_MAGIC)
        (seg_dir / _segment_name(0)).write_bytes(b"")
        _fsync_path(root / MANIFEST_NAME)
        _fsync_path(root / JOURNAL_NAME)
        _fsync_path(seg_dir / _segment_name(0))
        _fsync_dir(seg_dir)
        _fsync_dir(root)
        return cls.open(root)

    @classmethod
    def open(cls, root) -> "SegmentStorage":
        """Open a store, running crash recovery first."""
        root = Path(root)
        manifest_path = root / MANIFEST_NAME
        if not manifest_path.is_file():
            raise UserError(f"{root} is not an event store (no {MANIFEST_NAME})")
        try:
            manifest = json.loads(manifest_path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UserError(f"unreadable {MANIFEST_NAME}: {exc}") from exc

        committed, pending, next_txn, good_len = _read_journal(root / JOURNAL_NAME)
        journal_len = good_len
        if pending is not None:
            txn_id, wm = pending
            if _segments_verify(root / SEGMENT_DIR, committed, wm):
                # data is durable and intact: complete the interrupted commit
                entry = _journal_entry(_ST_COMMITTED, txn_id, {})
                fd = os.open(root / JOURNAL_NAME, os.O_RDWR)
                try:
                    os.pwrite(fd, entry, good_len)
                    os.ftruncate(fd, good_len + len(entry))
                    os.fsync(fd)
                finally:
                    os.close(fd)
                journal_len = good_len + len(entry)
                committed = wm
            # else: roll back by keeping the last committed watermarks
        else:
            _truncate_journal(root / JOURNAL_NAME, good_len)

        _truncate_segments(root / SEGMENT_DIR, committed)
        watermarks = dict(committed)
        if not watermarks:
            watermarks[0] = 0
        return cls(root, manifest, watermarks, next_txn, journal_len)

    def close(self) -> None:
        for fd in self._read_fds.values():
            try:
                os.close(fd)
            except OSError:
                pass
        self._read_fds.clear()

    # ---- write path ----

    def begin(self) -> Transaction:
        if self._poisoned:
            raise IoFailureError("store hit a crash fault; reopen the directory")
        if self._writer is not None:
            raise WriterBusyError("another writer transaction is open")
        txn = Transaction(self, self._next_txn_id)
        self._next_txn_id += 1
        self._writer = txn
        return txn

    def abort(self, txn: Transaction) -> None:
        self._owner_check(txn)
        txn.state = "aborted"
        self._writer = None

    def _owner_check(self, txn: Transaction):
        if txn.state != "open" or txn is not self._writer:
            raise TransactionRequiredError("transaction is not the open writer")

    def _fault(self, point: str) -> None:
        if self.fault_hook is not None:
            try:
                self.fault_hook(point)
            except BaseException:
                self._poisoned = True
                raise

    def commit(self, txn: Transaction) -> None:
        self._owner_check(txn)
        if not txn.records:
            txn.state = "committed"
            self._writer = None
            return
        new_wm = txn.new_watermarks()
        chunks = self._build_chunks(txn)
        try:
            self._fault("pre_data")
            self._write_chunks(txn, chunks)
            self._fault("post_data_write")
            for seg in sorted(txn.base_watermarks):
                _fsync_path(self._segment_path(seg))
            self._fault("post_data_sync")
        except Exception:
            if not self._poisoned:
                self._rollback_in_place(txn)
            raise
        # Point of no return is the prepared entry becoming durable; before
        # that, any failure rolls back, after it recovery rolls forward.
        try:
            prepared = _journal_entry(_ST_PREPARED, txn.txn_id, new_wm)
            self._append_journal(prepared, mid_fault="mid_prepare")
            self._fault("post_prepare_write")
            _fsync_path(self.root / JOURNAL_NAME)
        except Exception:
            if not self._poisoned:
                self._truncate_journal_in_place()
                self._rollback_in_place(txn)
            raise
        self._journal_len += len(prepared)
        self._fault("post_prepare_sync")
        marker = _journal_entry(_ST_COMMITTED, txn.txn_id, {})
        self._append_journal(marker, mid_fault="mid_commit_mark")
        self._fault("post_commit_mark_write")
        _fsync_path(self.root / JOURNAL_NAME)
        self._journal_len += len(marker)
        self._fault("post_commit_mark_sync")
        self._watermarks = new_wm
        self._tail_segment = max(new_wm)
        txn.state = "committed"
        self._writer = None

    def _segment_path(self, segment_id: int) -> Path:
        return self.root / SEGMENT_DIR / _segment_name(segment_id)

    def _build_chunks(self, txn: Transaction) -> dict[int, bytearray]:
        """Frame all buffered records into contiguous per-segment byte chunks."""
        chunks: dict[int, bytearray] = {}
        bases: dict[int, int] = {}
        crc_spans: dict[int, list[tuple[int, int, int]]] = {}
        for seg, base in txn.base_watermarks.items():
            chunks[seg] = bytearray()
            bases[seg] = base
            crc_spans[seg] = []
        for rec in txn.records:
            chunk = chunks[rec.segment_id]
            rel = rec.offset - bases[rec.segment_id]
            assert rel == len(chunk), "records must be contiguous"
            chunk += _FRAME.pack(rec.type_code, len(rec.payload))
            start = len(chunk)
            chunk += rec.payload
            crc_spans[rec.segment_id].append((start, len(rec.payload), len(chunk)))
            chunk += b"\x00\x00\x00\x00"
        for seg, spans in crc_spans.items():
            if not spans:
                continue
            chunk = chunks[seg]
            starts = np.fromiter((s for s, _, _ in spans), dtype=np.int64, count=len(spans))
            lens = np.fromiter((n for _, n, _ in spans), dtype=np.int64, count=len(spans))
            crcs = crc32c_many(bytes(chunk), starts, lens)
            for (_, _, crc_at), crc in zip(spans, crcs):
                chunk[crc_at:crc_at + 4] = _CRC.pack(int(crc))
        return chunks

    def _write_chunks(self, txn: Transaction, chunks: dict[int, bytearray]) -> None:
        first = True
        for seg in sorted(chunks):
            data = chunks[seg]
            path = self._segment_path(seg)
            created = not path.exists()
            fd = os.open(path, os.O_RDWR | os.O_CREAT, 0o644)
            try:
                base = txn.base_watermarks[seg]
                if first and len(data) > 1:
                    half = len(data) // 2
                    os.pwrite(fd, bytes(data[:half]), base)
                    self._fault("mid_data")
                    os.pwrite(fd, bytes(data[half:]), base + half)
                else:
                    os.pwrite(fd, bytes(data), base)
                first = False
            finally:
                os.close(fd)
            if created:
                _fsync_dir(path.parent)

    def _append_journal(self, entry: bytes, mid_fault: str) -> None:
        fd = os.open(self.root / JOURNAL_NAME, os.O_RDWR)
        try:
            half = len(entry) // 2
            os.pwrite(fd, entry[:half], self._journal_len)
            self._fault(mid_fault)
            os.pwrite(fd, entry[half:], self._journal_len + half)
        finally:
            os.close(fd)

    def _rollback_in_place(self, txn: Transaction) -> None:
        for seg, base in txn.base_watermarks.items():
            path = self._segment_path(seg)
            if path.exists():
                fd = os.open(path, os.O_RDWR)
                try:
                    if os.fstat(fd).st_size > base:
                        os.ftruncate(fd, base)
                        os.fsync(fd)
                finally:
                    os.close(fd)
        txn.state = "aborted"
        self._writer = None

    def _truncate_journal_in_place(self) -> None:
        fd = os.open(self.root / JOURNAL_NAME, os.O_RDWR)
        try:
            if os.fstat(fd).st_size > self._journal_len:
                os.ftruncate(fd, self._journal_len)
                os.fsync(fd)
        finally:
            os.close(fd)

    # ---- read path ----

    @property
    def watermarks(self) -> dict[int, int]:
        return dict(self._watermarks)

    def committed_bytes(self) -> int:
        return sum(self._watermarks.values())

    def _read_fd(self, segment_id: int) -> int:
        fd = self._read_fds.get(segment_id)
        if fd is None:
            path = self._segment_path(segment_id)
            try:
                fd = os.open(path, os.O_RDONLY)
            except FileNotFoundError:
                raise UnknownRefError(f"no such segment {segment_id}") from None
            self._read_fds[segment_id] = fd
        return fd

    def _frame_at(self, oref: Oref) -> tuple[int, int, int]:
        """(type_code, payload_len, watermark) with bounds checked."""
        wm = self._watermarks.get(oref.segment_id)
        if wm is None or oref.offset + RECORD_OVERHEAD > wm:
            raise UnknownRefError(f"{oref} is not a committed record")
        head = os.pread(self._read_fd(oref.segment_id), _FRAME.size, oref.offset)
        if len(head) != _FRAME.size:
            raise UnknownRefError(f"{oref} is not a committed record")
        type_code, payload_len = _FRAME.unpack(head)
        if oref.offset + RECORD_OVERHEAD + payload_len > wm:
            raise UnknownRefError(f"{oref} is not a committed record")
        return type_code, payload_len, wm

    def record_info(self, oref: Oref) -> tuple[int, int]:
        """(type_code, payload_len) without reading the payload."""
        type_code, payload_len, _ = self._frame_at(oref)
        return type_code, payload_len

    def read_record(self, oref: Oref) -> tuple[int, bytes]:
        """(type_code, payload), CRC-verified."""
        type_code, payload_len, _ = self._frame_at(oref)
        body = os.pread(self._read_fd(oref.segment_id), payload_len + 4,
                        oref.offset + _FRAME.size)
        if len(body) != payload_len + 4:
            raise CorruptRecordError(f"short read at {oref}")
        payload, crc_raw = body[:payload_len], body[payload_len:]
        if crc32c(payload) != _CRC.unpack(crc_raw)[0]:
            raise CorruptRecordError(f"checksum mismatch at {oref}")
        return type_code, payload

    def read_payload_prefix(self, oref: Oref, nbytes: int) -> tuple[int, bytes]:
        """(type_code, first nbytes of payload); skips the CRC check."""
        type_code, payload_len, _ = self._frame_at(oref)
        n = min(nbytes, payload_len)
        return type_code, os.pread(self._read_fd(oref.segment_id), n,
                                   oref.offset + _FRAME.size)

    def scan(self, verify_crc: bool = False, payload_types: set | None = None):
        """Iterate committed records in (segment, offset) order.

        Yields (oref, type_code, payload_len, payload_or_None, crc_ok).
        Payloads are materialized for all types unless `payload_types`
        restricts them; CRCs are checked only when `verify_crc` is set
        (others report crc_ok=True).
        """
        for seg in sorted(self._watermarks):
            wm = self._watermarks[seg]
            if wm == 0:
                continue
            path = self._segment_path(seg)
            with open(path, "rb") as f:
                buf = f.read(wm)
            if len(buf) < wm:
                raise CorruptRecordError(f"segment {seg} shorter than its watermark")
            frames = []
            off = 0
            while off < wm:
                if off + RECORD_OVERHEAD > wm:
                    raise CorruptRecordError(f"segment {seg} has a torn committed tail")
                type_code, payload_len = _FRAME.unpack_from(buf, off)
                if off + RECORD_OVERHEAD + payload_len > wm:
                    raise CorruptRecordError(f"record at {seg}:{off} crosses the watermark")
                frames.append((off, type_code, payload_len))
                off += RECORD_OVERHEAD + payload_len
            if verify_crc and frames:
                starts = np.fromiter((o + _FRAME.size for o, _, _ in frames),
                                     dtype=np.int64, count=len(frames))
                lens = np.fromiter((n for _, _, n in frames), dtype=np.int64, count=len(frames))
                crcs = crc32c_many(buf, starts, lens)
                stored = np.fromiter(
                    (_CRC.unpack_from(buf, o + _FRAME.size + n)[0] for o, _, n in frames),
                    dtype=np.uint32, count=len(frames))
                ok_flags = crcs == stored
            else:
                ok_flags = None
            view = memoryview(buf)
            for i, (off, type_code, payload_len) in enumerate(frames):
                want = payload_types is None or type_code in payload_types
                payload = view[off + _FRAME.size:off + _FRAME.size + payload_len] if want else None
                crc_ok = bool(ok_flags[i]) if ok_flags is not None else True
                yield Oref(seg, off), type_code, payload_len, payload, crc_ok


# ---- journal helpers ----

def _journal_entry(state: int, txn_id: int, watermarks: dict[int, int]) -> bytes:
    body = bytearray(_JENTRY_HEAD.pack(state, txn_id, len(watermarks)))
    for seg in sorted(watermarks):
        body += _JSEG.pack(seg, watermarks[seg])
    return bytes(body) + _CRC.pack(crc32c(bytes(body)))


def _read_journal(path: Path):
    """Parse the journal. Returns (committed_watermarks, pending, next_txn_id,
    parseable_length). `pending` is (txn_id, watermarks) for a prepared entry
    with no committed marker; a torn tail entry is ignored."""
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise CorruptJournalError(f"cannot read journal: {exc}") from exc
    if len(data) < len(JOURNAL_MAGIC) or data[:len(JOURNAL_MAGIC)] != JOURNAL_MAGIC:
        raise CorruptJournalError("bad journal magic")
    committed: dict[int, int] = {}
    committed_txn = -1
    pending: tuple[int, dict[int, int]] | None = None
    max_txn = 0
    off = len(JOURNAL_MAGIC)
    good = off
    while off < len(data):
        if off + _JENTRY_HEAD.size > len(data):
            break  # torn tail
        state, txn_id, nseg = _JENTRY_HEAD.unpack_from(data, off)
        end = off + _JENTRY_HEAD.size + nseg * _JSEG.size + 4
        if nseg > 1_000_000 or end > len(data):
            break  # torn tail
        body = data[off:end - 4]
        (stored_crc,) = _CRC.unpack_from(data, end - 4)
        if crc32c(body) != stored_crc:
            break  # torn tail
        if state == _ST_PREPARED:
            wm = {}
            p = off + _JENTRY_HEAD.size
            for _ in range(nseg):
                seg, mark = _JSEG.unpack_from(data, p)
                wm[seg] = mark
                p += _JSEG.size
            # an unmatched earlier prepared entry was rolled back; supersede it
            pending = (txn_id, wm)
        elif state == _ST_COMMITTED:
            if pending is not None and pending[0] == txn_id:
                committed = pending[1]
                committed_txn = txn_id
                pending = None
            elif txn_id == committed_txn:
                pass  # duplicate marker from a concurrent roll-forward
            else:
                raise CorruptJournalError(
                    f"committed marker for unknown transaction {txn_id}")
        else:
            raise CorruptJournalError(f"invalid journal entry state {state}")
        max_txn = max(max_txn, txn_id)
        good = end
        off = end
    return committed, pending, max_txn + 1, good


def _truncate_journal(path: Path, good_len: int) -> None:
    if path.stat().st_size > good_len:
        fd = os.open(path, os.O_RDWR)
        try:
            os.ftruncate(fd, good_len)
            os.fsync(fd)
        finally:
            os.close(fd)


def _segments_verify(seg_dir: Path, base: dict[int, int], target: dict[int, int]) -> bool:
    """Check that all records between the base and target watermarks are
    present and CRC-clean, i.e. the prepared transaction's data survived."""
    for seg, wm in target.items():
        start = base.get(seg, 0)
        if wm < start:
            return False
        if wm == start:
            continue
        path = seg_dir / _segment_name(seg)
        try:
            with open(path, "rb") as f:
                if os.fstat(f.fileno()).st_size < wm:
                    return False
                f.seek(start)
                buf = f.read(wm - start)
        except OSError:
            return False
        off = 0
        span = wm - start
        while off < span:
            if off + RECORD_OVERHEAD > span:
                return False
            _, payload_len = _FRAME.unpack_from(buf, off)
            end = off + RECORD_OVERHEAD + payload_len
            if end > span:
                return False
            payload = buf[off + _FRAME.size:off + _FRAME.size + payload_len]
            (stored,) = _CRC.unpack_from(buf, end - 4)
            if crc32c(payload) != stored:
                return False
            off = end
    return True


def _truncate_segments(seg_dir: Path, watermarks: dict[int, int]) -> None:
    for path in sorted(seg_dir.glob("*.seg")):
        try:
            seg = int(path.stem)
        except ValueError:
            continue
        wm = watermarks.get(seg, 0)
        if path.stat().st_size > wm:
            fd = os.open(path, os.O_RDWR)
            try:
                os.ftruncate(fd, wm)
                os.fsync(fd)
            finally:
                os.close(fd)


def _fsync_path(path: Path) -> None:
    try:
        fd = os.open(path, os.O_RDONLY)
    except OSError as exc:
        raise IoFailureError(f"cannot fsync {path}: {exc}") from exc
    try:
        os.fsync(fd)
    finally:
        os.close(fd)


def _fsync_dir(path: Path) -> None:
    try:
        fd = os.open(path, os.O_RDONLY | getattr(os, "O_DIRECTORY", 0))
        try:
            os.fsync(fd)
        finally:
            os.close(fd)
    except OSError:
        pass  # some filesystems refuse directory fsync; best effort
