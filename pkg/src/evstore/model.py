"""Transient event model: identifiers, component layouts, events.

An event identifier splits into a static fragment (slowly changing, shared
between many events) and a dynamic fragment (per-event). Component layouts
serialize to a canonical packed string, `key=type` entries joined by `;`,
which is what gets deduplicated alongside the static fragment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DuplicateEntryError, IllegalCharacterError, MalformedLayoutError

FORBIDDEN_CHARS = (";", "=")
MAX_NAME_BYTES = 255


def check_name(value: str, what: str) -> str:
    """Validate a key/type/attribute name against the packed-string charset."""
    if not isinstance(value, str) or not value:
        raise IllegalCharacterError(f"{what} must be a non-empty string")
    if len(value.encode("utf-8")) > MAX_NAME_BYTES:
        raise IllegalCharacterError(f"{what} {value[:32]!r}... exceeds {MAX_NAME_BYTES} bytes")
    for ch in FORBIDDEN_CHARS:
        if ch in value:
            raise IllegalCharacterError(f"{what} {value!r} contains forbidden character {ch!r}")
    return value


@dataclass(frozen=True, slots=True)
class EventId:
    experiment_label: str
    run_number: int
    config_key: int
    event_number: int
    timestamp_us: int

    def __post_init__(self):
        check_name(self.experiment_label, "experiment_label")
        for f in ("run_number", "config_key", "event_number", "timestamp_us"):
            v = getattr(self, f)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{f} must be a non-negative integer, got {v!r}")


@dataclass(frozen=True, slots=True)
class StaticIdFragment:
    """The slowly-changing part of an event id; interns to one stored instance."""
    experiment_label: str
    run_number: int
    config_key: int


@dataclass(frozen=True, slots=True)
class DynamicIdFragment:
    """The per-event part of an event id; stored inline, never interned."""
    event_number: int
    timestamp_us: int


def split_event_id(event_id: EventId) -> tuple[StaticIdFragment, DynamicIdFragment]:
    return (
        StaticIdFragment(event_id.experiment_label, event_id.run_number, event_id.config_key),
        DynamicIdFragment(event_id.event_number, event_id.timestamp_us),
    )


def join_id_fragments(static: StaticIdFragment, dynamic: DynamicIdFragment) -> EventId:
    return EventId(
        experiment_label=static.experiment_label,
        run_number=static.run_number,
        config_key=static.config_key,
        event_number=dynamic.event_number,
        timestamp_us=dynamic.timestamp_us,
    )


@dataclass(frozen=True, slots=True)
class ComponentEntry:
    key: str
    type_name: str

    def __post_init__(self):
        check_name(self.key, "component key")
        check_name(self.type_name, "component type")


@dataclass(frozen=True, slots=True)
class PackedLayout:
    """Ordered component entries plus their canonical packed string.

    The packed form is a pure function of the entries: no sorting, no
    normalization, just `key=type` joined by `;`. Matching is therefore
    order-sensitive, which keeps positional dereference stable.
    """
    entries: tuple[ComponentEntry, ...]
    packed_form: str

    def __len__(self) -> int:
        return len(self.entries)


def pack_layout(entries) -> PackedLayout:
    entries = tuple(entries)
    seen = set()
    for e in entries:
        pair = (e.key, e.type_name)
        if pair in seen:
            raise DuplicateEntryError(f"duplicate layout entry {e.key}={e.type_name}")
        seen.add(pair)
    packed = ";".join(f"{e.key}={e.type_name}" for e in entries)
    return PackedLayout(entries=entries, packed_form=packed)


def parse_layout(packed: str) -> list[ComponentEntry]:
    if packed == "":
        return []
    out = []
    seen = set()
    for part in packed.split(";"):
        key, sep, type_name = part.partition("=")
        if not sep or not key or not type_name or "=" in type_name:
            raise MalformedLayoutError(f"malformed layout entry {part!r}")
        if (key, type_name) in seen:
            raise MalformedLayoutError(f"duplicate layout entry {part!r}")
        seen.add((key, type_name))
        out.append(ComponentEntry(key=key, type_name=type_name))
    return out


@dataclass(slots=True)
class TransientEvent:
    """An event as analysis code sees it: id, ordered typed components, tag."""
    id: EventId
    components: list = field(default_factory=list)  # [(ComponentEntry, bytes)]
    tag: "object" = None  # evstore.tags.Tag; untyped here to avoid a cycle

    def layout(self) -> PackedLayout:
        return pack_layout(entry for entry, _ in self.components)
