"""Packet headers as fixed-width bit vectors over a declared field schema.

Bit positions are 1-based over the whole header, counted from the most
significant bit of the first field.  A traffic type is a conjunction of
masked field equalities; its indicator tests only the masked positions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, Mapping, Optional, Tuple

DEFAULT_ENUM_LIMIT = 16  # free bits; 2^16 headers


class SchemaError(ValueError):
    """Schema mismatch or reference to an unknown field."""


class EnumerationLimitError(ValueError):
    """Uncapped enumeration would exceed the free-bit limit."""


class FilterError(ValueError):
    """Malformed filter expression."""


@dataclass(frozen=True)
class HeaderSchema:
    """Ordered (name, width) field layout; total width is the header size."""

    fields: Tuple[Tuple[str, int], ...]

    def __post_init__(self) -> None:
        names = [n for n, _ in self.fields]
        if len(set(names)) != len(names):
            raise SchemaError("field names must be unique")
        if any(w < 1 for _, w in self.fields):
            raise SchemaError("field widths must be >= 1")

    @property
    def total_width(self) -> int:
        return sum(w for _, w in self.fields)

    def width_of(self, name: str) -> int:
        for n, w in self.fields:
            if n == name:
                return w
        raise SchemaError(f"unknown field {name!r}")

    def offset_of(self, name: str) -> int:
        """Number of bits before this field; its MSB is bit offset+1."""
        off = 0
        for n, w in self.fields:
            if n == name:
                return off
            off += w
        raise SchemaError(f"unknown field {name!r}")


# convenience default: classic 5-tuple-ish layout, 96 bits total
DEFAULT_SCHEMA = HeaderSchema(
    (("dstIP", 32), ("srcIP", 32), ("dstTCP", 16), ("srcTCP", 16))
)


@dataclass(frozen=True)
class HeaderValue:
    """One concrete header: an integer whose bit i (1-based, MSB-first)
    is (value >> (k - i)) & 1."""

    schema: HeaderSchema
    value: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < (1 << self.schema.total_width):
            raise SchemaError("header value out of range for schema width")

    def bit(self, pos: int) -> int:
        k = self.schema.total_width
        if not 1 <= pos <= k:
            raise SchemaError(f"bit position {pos} outside 1..{k}")
        return (self.value >> (k - pos)) & 1

    def bits(self) -> str:
        return format(self.value, f"0{self.schema.total_width}b")

    def field(self, name: str) -> int:
        w = self.schema.width_of(name)
        off = self.schema.offset_of(name)
        shift = self.schema.total_width - off - w
        return (self.value >> shift) & ((1 << w) - 1)

    def fields_dict(self) -> Dict[str, int]:
        return {n: self.field(n) for n, _ in self.schema.fields}


def header_from_fields(schema: HeaderSchema, assignments: Mapping[str, int]) -> HeaderValue:
    """Lay out field values MSB-first in schema order; unassigned fields
    default to zero."""
    value = 0
    names = {n for n, _ in schema.fields}
    for name in assignments:
        if name not in names:
            raise SchemaError(f"unknown field {name!r}")
    for name, width in schema.fields:
        v = int(assignments.get(name, 0))
        if not 0 <= v < (1 << width):
            raise SchemaError(f"value {v} overflows field {name} (width {width})")
        value = (value << width) | v
    return HeaderValue(schema, value)


@dataclass(frozen=True)
class TrafficType:
    """Conjunction of masked field equalities.

    constraints maps field name -> (required value, mask); only positions
    where the mask bit is 1 are compared.  Masks use the same MSB-first
    convention as the field itself.
    """

    schema: HeaderSchema
    constraints: Tuple[Tuple[str, int, int], ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for name, value, mask in self.constraints:
            width = self.schema.width_of(name)
            if name in seen:
                raise SchemaError(f"duplicate constraint on field {name!r}")
            seen.add(name)
            top = 1 << width
            if not (0 <= value < top and 0 <= mask < top):
                raise SchemaError(f"constraint on {name} does not fit width {width}")

    def pinned_bits(self) -> Tuple[int, ...]:
        """Global 1-based positions pinned by the constraints."""
        out = []
        for name, _value, mask in self.constraints:
            width = self.schema.width_of(name)
            off = self.schema.offset_of(name)
            for j in range(width):  # j=0 is the field MSB
                if (mask >> (width - 1 - j)) & 1:
                    out.append(off + j + 1)
        return tuple(sorted(out))


def indicator_eval(t: TrafficType, h: HeaderValue) -> bool:
    """True iff h matches every masked field equality of t."""
    if h.schema != t.schema:
        raise SchemaError("header and traffic type use different schemas")
    for name, value, mask in t.constraints:
        if (h.field(name) ^ value) & mask:
            return False
    return True


def free_bit_count(t: TrafficType) -> int:
    """Header width minus the number of pinned bit positions."""
    pinned = sum(bin(mask).count("1") for _n, _v, mask in t.constraints)
    return t.schema.total_width - pinned


def enumerate_headers(
    t: TrafficType,
    cap: Optional[int] = None,
    limit: int = DEFAULT_ENUM_LIMIT,
) -> Iterator[HeaderValue]:
    """Yield every header matching t in lexicographic bit order.

    Without a cap the count is 2^free_bit_count(t), so enumeration is
    refused when the free-bit count exceeds `limit` and no cap is given.
    """
    free = free_bit_count(t)
    if cap is None and free > limit:
        raise EnumerationLimitError(
            f"enumeration too large: {free} free bits exceeds limit {limit}"
        )
    k = t.schema.total_width
    base = 0
    pinned = set()
    for name, value, mask in t.constraints:
        width = t.schema.width_of(name)
        off = t.schema.offset_of(name)
        for j in range(width):
            if (mask >> (width - 1 - j)) & 1:
                pos = off + j + 1
                pinned.add(pos)
                if (value >> (width - 1 - j)) & 1:
                    base |= 1 << (k - pos)
    free_positions = [p for p in range(1, k + 1) if p not in pinned]
    count = 0
    for n in range(1 << len(free_positions)):
        if cap is not None and count >= cap:
            return
        v = base
        # spread n over the free positions, MSB of n on the smallest position
        for j, pos in enumerate(free_positions):
            if (n >> (len(free_positions) - 1 - j)) & 1:
                v |= 1 << (k - pos)
        yield HeaderValue(t.schema, v)
        count += 1


def match_all(schema: HeaderSchema) -> TrafficType:
    return TrafficType(schema, ())


# -- filter expressions ----------------------------------------------------
#
# Grammar: term ("and" term)*; term = field "=" value ["/" maskbits].
# Values: decimal, 0x hex, or dotted-quad for 32-bit fields.  /maskbits is
# a prefix length counted from the field's MSB.


def _parse_value(text: str, width: int) -> int:
    text = text.strip()
    if "." in text:
        parts = text.split(".")
        if width != 32 or len(parts) != 4:
            raise FilterError(f"dotted-quad value {text!r} needs a 32-bit field")
        try:
            octets = [int(p) for p in parts]
        except ValueError:
            raise FilterError(f"bad dotted-quad {text!r}") from None
        if any(not 0 <= o <= 255 for o in octets):
            raise FilterError(f"octet out of range in {text!r}")
        return (octets[0] << 24) | (octets[1] << 16) | (octets[2] << 8) | octets[3]
    try:
        return int(text, 0)
    except ValueError:
        raise FilterError(f"bad value {text!r}") from None


def parse_filter(schema: HeaderSchema, text: str) -> TrafficType:
    """Parse `field=value [/prefix] and ...` into a TrafficType."""
    text = text.strip()
    if not text:
        return TrafficType(schema, ())
    constraints = []
    for term in text.split(" and "):
        term = term.strip()
        if "=" not in term:
            raise FilterError(f"expected field=value, got {term!r}")
        name, _, rhs = term.partition("=")
        name = name.strip()
        try:
            width = schema.width_of(name)
        except SchemaError:
            raise FilterError(f"unknown field {name!r}") from None
        rhs = rhs.strip()
        if "/" in rhs:
            valtext, _, prefixtext = rhs.partition("/")
            try:
                prefix = int(prefixtext)
            except ValueError:
                raise FilterError(f"bad mask length {prefixtext!r}") from None
            if not 0 <= prefix <= width:
                raise FilterError(f"mask length {prefix} outside 0..{width}")
            mask = ((1 << prefix) - 1) << (width - prefix)
        else:
            valtext = rhs
            mask = (1 << width) - 1
        value = _parse_value(valtext, width)
        if value >= (1 << width):
            raise FilterError(f"value {value} overflows field {name} (width {width})")
        constraints.append((name, value, mask))
    return TrafficType(schema, tuple(constraints))


def filter_to_text(t: TrafficType) -> str:
    """Inverse of parse_filter for full-mask and prefix-mask constraints."""
    terms = []
    for name, value, mask in t.constraints:
        width = t.schema.width_of(name)
        full = (1 << width) - 1
        if mask == full:
            terms.append(f"{name}={value}")
        else:
            prefix = bin(mask).count("1")
            expected = ((1 << prefix) - 1) << (width - prefix)
            if mask != expected:
                raise FilterError(f"mask on {name} is not a prefix mask")
            terms.append(f"{name}={value}/{prefix}")
    return " and ".join(terms)
