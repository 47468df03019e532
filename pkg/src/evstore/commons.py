"""Common objects: the interned per-event constants.

A common object bundles the static id fragment with the packed component
layout. One stored instance exists per distinct (fragment, layout) pair and
every event persisted under that pair references it. Granularity is the
whole bundle on purpose; per-field sharing would cost more in references
than it saves.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .errors import CorruptRecordError
from .model import PackedLayout, StaticIdFragment, pack_layout, parse_layout
from .tags import fnv1a64

_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")


@dataclass(frozen=True, slots=True)
class CommonObject:
    static_fragment: StaticIdFragment
    layout: PackedLayout
    common_id: int
    ref_count: int = 0  # events referencing it; stats bookkeeping only


def content_key(fragment: StaticIdFragment, layout: PackedLayout) -> tuple:
    return (fragment.experiment_label, fragment.run_number, fragment.config_key,
            layout.packed_form)


def _content_bytes(fragment: StaticIdFragment, layout: PackedLayout) -> bytes:
    label = fragment.experiment_label.encode("utf-8")
    packed = layout.packed_form.encode("utf-8")
    return b"".join([
        _U32.pack(len(label)), label,
        _U32.pack(fragment.run_number), _U32.pack(fragment.config_key),
        _U32.pack(len(packed)), packed,
    ])


def common_id_for(fragment: StaticIdFragment, layout: PackedLayout) -> int:
    return fnv1a64(_content_bytes(fragment, layout))


def encode_common(fragment: StaticIdFragment, layout: PackedLayout, common_id: int) -> bytes:
    return _U64.pack(common_id) + _content_bytes(fragment, layout)


def decode_common(payload) -> tuple[int, StaticIdFragment, PackedLayout]:
    buf = memoryview(payload)
    try:
        (common_id,) = _U64.unpack_from(buf, 0)
        (label_len,) = _U32.unpack_from(buf, 8)
        label = bytes(buf[12:12 + label_len]).decode("utf-8")
        off = 12 + label_len
        run, cfg, packed_len = struct.unpack_from("<III", buf, off)
        off += 12
        packed = bytes(buf[off:off + packed_len]).decode("utf-8")
        if off + packed_len != len(buf):
            raise ValueError("trailing bytes")
    except (struct.error, ValueError, UnicodeDecodeError) as exc:
        raise CorruptRecordError(f"bad common object record: {exc}") from exc
    fragment = StaticIdFragment(label, run, cfg)
    layout = pack_layout(parse_layout(packed))
    return common_id, fragment, layout
