"""Event tags and interned tag descriptors.

A tag is a small per-event summary: typed attributes addressed by name,
values held in per-kind parallel arrays (bools bit-packed on disk). The
descriptor is the immutable look-up table mapping names to array positions;
tags with identical attribute lists share one stored descriptor.

Attributes can also be declared transient-only on a tag. Those live in a
side map and never reach the descriptor or the persistent encoding.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    DuplicateAttributeNameError,
    IllegalCharacterError,
    KindConflictError,
    KindMismatchError,
    UnknownAttributeError,
)
from .model import check_name

_I32_MIN = -(2 ** 31)
_I32_MAX = 2 ** 31 - 1

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_U64_MASK = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a; the content hash used for descriptor and common ids."""
    h = FNV_OFFSET
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & _U64_MASK
    return h


class AttrKind(enum.Enum):
    BOOL = "bool"
    INT = "int"
    FLOAT = "float"

    @property
    def letter(self) -> str:
        return {"bool": "B", "int": "I", "float": "F"}[self.value]

    @classmethod
    def from_letter(cls, letter: str) -> "AttrKind":
        try:
            return {"B": cls.BOOL, "I": cls.INT, "F": cls.FLOAT}[letter]
        except KeyError:
            raise ValueError(f"unknown kind letter {letter!r}") from None

    def default(self):
        return {"bool": False, "int": 0, "float": 0.0}[self.value]


def check_attr_name(name: str) -> str:
    # '|' is reserved by the canonical descriptor encoding
    check_name(name, "attribute name")
    if "|" in name:
        raise IllegalCharacterError(f"attribute name {name!r} contains forbidden character '|'")
    return name


@dataclass(frozen=True, slots=True)
class AttributeSpec:
    name: str
    kind: AttrKind
    transient_only: bool = False

    def __post_init__(self):
        check_attr_name(self.name)
        if not isinstance(self.kind, AttrKind):
            raise KindMismatchError(f"kind must be an AttrKind, got {self.kind!r}")


def canonical_encoding(specs) -> str:
    """Order-preserving `name|K` list joined by ';'. Input of the content hash."""
    return ";".join(f"{s.name}|{s.kind.letter}" for s in specs)


def specs_from_canonical(encoded: str) -> tuple[AttributeSpec, ...]:
    if encoded == "":
        return ()
    out = []
    for part in encoded.split(";"):
        name, _, letter = part.rpartition("|")
        out.append(AttributeSpec(name=name, kind=AttrKind.from_letter(letter)))
    return tuple(out)


class TagDescriptor:
    """Immutable, content-addressed attribute table shared between tags.

    Only persistent attributes belong here; transient-only specs are stripped
    before hashing so tags that differ only in transient declarations still
    share one descriptor.
    """

    __slots__ = ("specs", "canonical", "descriptor_id", "positions",
                 "n_bool", "n_int", "n_float")

    def __init__(self, specs):
        specs = tuple(specs)
        positions: dict[str, tuple[AttrKind, int]] = {}
        counts = {AttrKind.BOOL: 0, AttrKind.INT: 0, AttrKind.FLOAT: 0}
        for s in specs:
            if s.transient_only:
                raise DuplicateAttributeNameError(
                    f"transient-only attribute {s.name!r} cannot enter a descriptor")
            if s.name in positions:
                raise DuplicateAttributeNameError(f"duplicate attribute name {s.name!r}")
            positions[s.name] = (s.kind, counts[s.kind])
            counts[s.kind] += 1
        object.__setattr__(self, "specs", specs)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "n_bool", counts[AttrKind.BOOL])
        object.__setattr__(self, "n_int", counts[AttrKind.INT])
        object.__setattr__(self, "n_float", counts[AttrKind.FLOAT])
        canonical = canonical_encoding(specs)
        object.__setattr__(self, "canonical", canonical)
        object.__setattr__(self, "descriptor_id", fnv1a64(canonical.encode("utf-8")))

    def __setattr__(self, name, value):
        raise AttributeError("TagDescriptor is immutable")

    def __eq__(self, other):
        return isinstance(other, TagDescriptor) and self.canonical == other.canonical

    def __hash__(self):
        return hash(self.canonical)

    def __repr__(self):
        return (f"TagDescriptor(id={self.descriptor_id:#018x}, "
                f"bools={self.n_bool}, ints={self.n_int}, floats={self.n_float})")

    @classmethod
    def from_specs(cls, specs) -> "TagDescriptor":
        """Build a descriptor from a full spec list, dropping transient-only entries."""
        return cls(s for s in specs if not s.transient_only)

    @classmethod
    def from_canonical(cls, encoded: str) -> "TagDescriptor":
        return cls(specs_from_canonical(encoded))

    def value_nbytes(self) -> int:
        """Bytes of the packed value arrays (excludes the descriptor reference)."""
        return (self.n_bool + 7) // 8 + 4 * self.n_int + 4 * self.n_float


EMPTY_DESCRIPTOR = TagDescriptor(())


class Tag:
    """Mutable per-event attribute record, laid out by its descriptor.

    Persistent values live in per-kind arrays indexed through the descriptor;
    lookups are positional, never by scanning stored names. Transient-only
    values live in a name->value map consulted first and dropped on persist.
    Never-set attributes read as false/0/0.0.
    """

    __slots__ = ("descriptor", "bools", "ints", "floats", "transient_kinds", "transient_values")

    def __init__(self, descriptor: TagDescriptor, bools=None, ints=None, floats=None,
                 transient_specs=()):
        self.descriptor = descriptor
        self.bools = np.zeros(descriptor.n_bool, dtype=bool) if bools is None else bools
        self.ints = np.zeros(descriptor.n_int, dtype=np.int32) if ints is None else ints
        self.floats = np.zeros(descriptor.n_float, dtype=np.float32) if floats is None else floats
        if len(self.bools) != descriptor.n_bool or len(self.ints) != descriptor.n_int \
                or len(self.floats) != descriptor.n_float:
            raise ValueError("value array lengths do not match the descriptor")
        self.transient_kinds = {}
        self.transient_values = {}
        for s in transient_specs:
            if not s.transient_only:
                raise KindMismatchError(f"attribute {s.name!r} is not transient-only")
            if s.name in descriptor.positions or s.name in self.transient_kinds:
                raise DuplicateAttributeNameError(f"duplicate attribute name {s.name!r}")
            self.transient_kinds[s.name] = s.kind

    @classmethod
    def from_specs(cls, specs) -> "Tag":
        """Convenience: fresh tag over a new descriptor built from `specs`."""
        specs = tuple(specs)
        return cls(TagDescriptor.from_specs(specs),
                   transient_specs=[s for s in specs if s.transient_only])

    def _check_kind(self, name: str, kind: AttrKind, value):
        if kind is AttrKind.BOOL:
            if not isinstance(value, (bool, np.bool_)):
                raise KindMismatchError(f"{name!r} is bool, got {type(value).__name__}")
        elif kind is AttrKind.INT:
            if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, np.integer)):
                raise KindMismatchError(f"{name!r} is int, got {type(value).__name__}")
            if not _I32_MIN <= int(value) <= _I32_MAX:
                raise KindMismatchError(f"{name!r} is a 32-bit int, {value} out of range")
        else:
            if not isinstance(value, (float, np.floating)):
                raise KindMismatchError(f"{name!r} is float, got {type(value).__name__}")

    def set(self, name: str, value) -> None:
        if name in self.transient_kinds:
            kind = self.transient_kinds[name]
            self._check_kind(name, kind, value)
            self.transient_values[name] = kind.default().__class__(value)
            return
        try:
            kind, idx = self.descriptor.positions[name]
        except KeyError:
            raise UnknownAttributeError(f"unknown attribute {name!r}") from None
        self._check_kind(name, kind, value)
        if kind is AttrKind.BOOL:
            self.bools[idx] = bool(value)
        elif kind is AttrKind.INT:
            self.ints[idx] = int(value)
        else:
            self.floats[idx] = np.float32(value)

    def get(self, name: str):
        if name in self.transient_kinds:
            return self.transient_values.get(name, self.transient_kinds[name].default())
        try:
            kind, idx = self.descriptor.positions[name]
        except KeyError:
            raise UnknownAttributeError(f"unknown attribute {name!r}") from None
        if kind is AttrKind.BOOL:
            return bool(self.bools[idx])
        if kind is AttrKind.INT:
            return int(self.ints[idx])
        return float(self.floats[idx])

    def attribute_names(self):
        return list(self.descriptor.positions) + list(self.transient_kinds)

    def __repr__(self):
        return f"Tag(descriptor={self.descriptor.descriptor_id:#x}, transient={list(self.transient_kinds)})"


_U64 = struct.Struct("<Q")


def encode_tag(tag: Tag) -> bytes:
    """Persistent encoding: u64 descriptor id, bit-packed bools (LSB-first),
    i32 LE ints, f32 LE floats. Transient values are dropped."""
    d = tag.descriptor
    parts = [_U64.pack(d.descriptor_id)]
    if d.n_bool:
        parts.append(np.packbits(tag.bools, bitorder="little").tobytes())
    if d.n_int:
        parts.append(tag.ints.astype("<i4", copy=False).tobytes())
    if d.n_float:
        parts.append(tag.floats.astype("<f4", copy=False).tobytes())
    return b"".join(parts)


def tag_payload_descriptor_id(payload) -> int:
    return _U64.unpack_from(payload, 0)[0]


def decode_tag(payload, descriptor: TagDescriptor, writable: bool = True) -> Tag:
    """Inverse of encode_tag given the (already resolved) descriptor."""
    nbb = (descriptor.n_bool + 7) // 8
    expected = 8 + descriptor.value_nbytes()
    if len(payload) != expected:
        raise ValueError(f"tag payload is {len(payload)} bytes, descriptor implies {expected}")
    buf = memoryview(payload)
    if descriptor.n_bool:
        packed = np.frombuffer(buf, dtype=np.uint8, count=nbb, offset=8)
        bools = np.unpackbits(packed, bitorder="little")[:descriptor.n_bool].astype(bool)
    else:
        bools = np.zeros(0, dtype=bool)
    ints = np.frombuffer(buf, dtype="<i4", count=descriptor.n_int, offset=8 + nbb)
    floats = np.frombuffer(buf, dtype="<f4", count=descriptor.n_float,
                           offset=8 + nbb + 4 * descriptor.n_int)
    if writable:
        ints = ints.copy()
        floats = floats.copy()
    return Tag(descriptor, bools=bools, ints=ints, floats=floats)


def merge_union_specs(base_specs, tag_specs) -> tuple[AttributeSpec, ...]:
    """Extend a union attribute list with any new names from `tag_specs`.

    Order: existing attributes keep their positions, new ones append in first
    appearance order. A name arriving with a different kind is a conflict.
    """
    merged = list(base_specs)
    kinds = {s.name: s.kind for s in merged}
    for s in tag_specs:
        have = kinds.get(s.name)
        if have is None:
            merged.append(AttributeSpec(s.name, s.kind))
            kinds[s.name] = s.kind
        elif have is not s.kind:
            raise KindConflictError(
                f"attribute {s.name!r} is {have.value} in the union but {s.kind.value} in the tag")
    return tuple(merged)


def build_widen_mapping(src: TagDescriptor, union: TagDescriptor):
    """Per-kind index arrays mapping src positions into union positions."""
    maps = {AttrKind.BOOL: np.zeros(src.n_bool, dtype=np.intp),
            AttrKind.INT: np.zeros(src.n_int, dtype=np.intp),
            AttrKind.FLOAT: np.zeros(src.n_float, dtype=np.intp)}
    for name, (kind, idx) in src.positions.items():
        ukind, uidx = union.positions[name]
        if ukind is not kind:
            raise KindConflictError(f"attribute {name!r} changed kind in the union")
        maps[kind][idx] = uidx
    return maps[AttrKind.BOOL], maps[AttrKind.INT], maps[AttrKind.FLOAT]


def widen_tag(tag: Tag, union: TagDescriptor, mapping=None) -> Tag:
    """Rebuild `tag` over the union descriptor, defaulting attributes it lacks."""
    if mapping is None:
        mapping = build_widen_mapping(tag.descriptor, union)
    bmap, imap, fmap = mapping
    bools = np.zeros(union.n_bool, dtype=bool)
    ints = np.zeros(union.n_int, dtype=np.int32)
    floats = np.zeros(union.n_float, dtype=np.float32)
    if len(bmap):
        bools[bmap] = tag.bools
    if len(imap):
        ints[imap] = tag.ints
    if len(fmap):
        floats[fmap] = tag.floats
    return Tag(union, bools=bools, ints=ints, floats=floats)
