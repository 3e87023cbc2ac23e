"""Storage layout: slot assignment, address derivation, and reverse decoding.

Value types pack into 32-byte slots left-to-right by byte offset (offset 0 is
the least significant byte of the word, matching Solidity). Mappings, dynamic
arrays, and fixed arrays each start a fresh slot; mapping values live at
keccak256(pad32(key) ++ pad32(slot)) and dynamic-array data starts at
keccak256(pad32(slot)). Derived slots are journaled into an AddressRegistry
because the hash is one-way; decoding consults the static layout first and the
journal after.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import (
    DepthMismatchError,
    TypeMismatchError,
    UnknownAddressError,
    UnsupportedTypeError,
)
from .keccak import keccak256
from .minisol.ast import ContractDecl, DynArray, Elementary, FixedArray, Mapping, TypeExpr

WORD_BYTES = 32
MAX_WORD = (1 << 256) - 1


def pad32(value: int) -> bytes:
    """32-byte big-endian encoding of a word."""
    return value.to_bytes(WORD_BYTES, "big")


def extract_range(word: int, offset: int, width: int) -> int:
    """Value of the byte range at ``offset`` (counted from the least significant byte)."""
    return (word >> (8 * offset)) & ((1 << (8 * width)) - 1)


def splice_range(word: int, offset: int, width: int, value: int) -> int:
    """Word with the byte range replaced by ``value``."""
    mask = ((1 << (8 * width)) - 1) << (8 * offset)
    return (word & ~mask) | ((value << (8 * offset)) & mask)


@dataclass(frozen=True)
class SlotAddress:
    slot: int
    offset: int
    width: int

    def covers(self, offset: int, width: int) -> bool:
        return self.offset <= offset and offset + width <= self.offset + self.width


@dataclass(frozen=True)
class Key:
    """Mapping accessor: the key as a 256-bit word."""

    word: int


@dataclass(frozen=True)
class Index:
    """Array accessor."""

    value: int


Accessor = Union[Key, Index]


@dataclass(frozen=True)
class VariablePath:
    contract: str
    root: str
    accessors: tuple[Accessor, ...] = ()

    @property
    def text(self) -> str:
        parts = [f"{self.contract}.{self.root}"]
        for acc in self.accessors:
            if isinstance(acc, Key):
                parts.append(f"[{acc.word:#x}]")
            else:
                parts.append(f"[{acc.value}]")
        return "".join(parts)

    def child(self, accessor: Accessor) -> "VariablePath":
        return VariablePath(self.contract, self.root, self.accessors + (accessor,))


class AddressRegistry:
    """Append-only journal of derived slots, enabling reverse decoding."""

    def __init__(self) -> None:
        self._entries: dict[int, list[tuple[VariablePath, int, int]]] = {}

    def record(self, slot: int, path: VariablePath, offset: int, width: int) -> None:
        bucket = self._entries.setdefault(slot, [])
        entry = (path, offset, width)
        if entry not in bucket:
            bucket.append(entry)

    def lookup(self, slot: int) -> list[tuple[VariablePath, int, int]]:
        return list(self._entries.get(slot, ()))

    def __len__(self) -> int:
        return sum(len(b) for b in self._entries.values())


@dataclass
class StorageLayout:
    contract: str
    vars: dict[str, tuple[SlotAddress, TypeExpr]]
    next_free_slot: int

    def to_json(self) -> dict:
        return {
            "vars": [
                {
                    "name": name,
                    "type": str(ty),
                    "slot": hex(addr.slot),
                    "offset": addr.offset,
                    "width": addr.width,
                }
                for name, (addr, ty) in self.vars.items()
            ]
        }


def describe_variables(unit) -> list[dict]:
    """Flat (contract, name, type, slot, offset, width) listing for UIs and the CLI."""
    rows = []
    for contract in unit.contracts:
        layout = compute_layout(contract)
        for name, (addr, ty) in layout.vars.items():
            rows.append({
                "contract": contract.name,
                "name": name,
                "type": str(ty),
                "slot": hex(addr.slot),
                "offset": addr.offset,
                "width": addr.width,
            })
    return rows


def slot_count(ty: TypeExpr) -> int:
    """Slots a type occupies when laid out inline (fixed arrays span several)."""
    if isinstance(ty, Elementary):
        return 1
    if isinstance(ty, (Mapping, DynArray)):
        return 1
    if isinstance(ty, FixedArray):
        if isinstance(ty.elem, Elementary):
            per_slot = WORD_BYTES // ty.elem.width
            return -(-ty.length // per_slot)
        return ty.length * slot_count(ty.elem)
    raise UnsupportedTypeError(f"cannot lay out {ty!r}")


def compute_layout(contract: ContractDecl) -> StorageLayout:
    """Assign every state variable a storage location, Ethereum packing rules."""
    assignments: dict[str, tuple[SlotAddress, TypeExpr]] = {}
    slot = 0
    offset = 0
    for var in contract.state_vars:
        ty = var.ty
        if isinstance(ty, Elementary):
            if offset + ty.width > WORD_BYTES:
                slot += 1
                offset = 0
            assignments[var.name] = (SlotAddress(slot, offset, ty.width), ty)
            offset += ty.width
            if offset == WORD_BYTES:
                slot += 1
                offset = 0
        else:
            if offset > 0:
                slot += 1
                offset = 0
            assignments[var.name] = (SlotAddress(slot, 0, WORD_BYTES), ty)
            slot += slot_count(ty)
    next_free = slot + (1 if offset > 0 else 0)
    return StorageLayout(contract.name, assignments, next_free)


def _hash_word(data: bytes) -> int:
    return int.from_bytes(keccak256(data), "big")


def _leaf_width(ty: TypeExpr) -> int:
    return ty.width if isinstance(ty, Elementary) else WORD_BYTES


def resolve_address(layout: StorageLayout, path: VariablePath, registry: AddressRegistry) -> SlotAddress:
    """Translate a variable path to its slot address, journaling derived slots."""
    entry = layout.vars.get(path.root)
    if entry is None:
        raise TypeMismatchError(path.text, f"no state variable {path.root!r} in {layout.contract}")
    base, ty = entry
    slot, offset, width = base.slot, base.offset, base.width
    derived = False
    prefix = VariablePath(path.contract, path.root)
    for acc in path.accessors:
        if isinstance(ty, Elementary):
            raise DepthMismatchError(path.text, f"cannot index into {ty}")
        if isinstance(ty, Mapping):
            if not isinstance(acc, Key):
                raise TypeMismatchError(path.text, "mapping access requires a key")
            slot = _hash_word(pad32(acc.word) + pad32(slot))
            offset, width = 0, _leaf_width(ty.value)
            ty = ty.value
            derived = True
        elif isinstance(ty, DynArray):
            if not isinstance(acc, Index):
                raise TypeMismatchError(path.text, "array access requires an index")
            data_start = _hash_word(pad32(slot))
            derived = True
            if isinstance(ty.elem, Elementary):
                per_slot = WORD_BYTES // ty.elem.width
                slot = data_start + acc.value // per_slot
                offset = (acc.value % per_slot) * ty.elem.width
                width = ty.elem.width
            else:
                slot = data_start + acc.value * slot_count(ty.elem)
                offset, width = 0, WORD_BYTES
            ty = ty.elem
        elif isinstance(ty, FixedArray):
            if not isinstance(acc, Index):
                raise TypeMismatchError(path.text, "array access requires an index")
            if acc.value >= ty.length:
                raise TypeMismatchError(path.text, f"index {acc.value} out of range for {ty}")
            if isinstance(ty.elem, Elementary):
                per_slot = WORD_BYTES // ty.elem.width
                slot = slot + acc.value // per_slot
                offset = (acc.value % per_slot) * ty.elem.width
                width = ty.elem.width
            else:
                slot = slot + acc.value * slot_count(ty.elem)
                offset, width = 0, WORD_BYTES
            ty = ty.elem
        else:
            raise UnsupportedTypeError(f"cannot resolve through {ty!r}")
        prefix = prefix.child(acc)
        if derived:
            registry.record(slot, prefix, offset, width)
    return SlotAddress(slot, offset, width)


def decode_address(
    layout: StorageLayout,
    registry: AddressRegistry,
    slot: int,
    byte_range: tuple[int, int],
) -> VariablePath:
    """Reverse-map a raw slot and byte range to the variable path covering it."""
    offset, width = byte_range
    if slot <= layout.next_free_slot:
        found = _decode_static(layout, slot, offset, width)
        if found is not None:
            return found
    covering = [
        (path, e_off, e_width)
        for path, e_off, e_width in registry.lookup(slot)
        if e_off <= offset and offset + width <= e_off + e_width
    ]
    if covering:
        # Fixed-array bases alias their first element; prefer the deepest
        # (most specific) path, then the narrowest byte range.
        covering.sort(key=lambda e: (-len(e[0].accessors), e[2]))
        return covering[0][0]
    raise UnknownAddressError(slot)


def _decode_static(layout: StorageLayout, slot: int, offset: int, width: int) -> VariablePath | None:
    for name, (base, ty) in layout.vars.items():
        path = VariablePath(layout.contract, name)
        if isinstance(ty, Elementary):
            if slot == base.slot and base.covers(offset, width):
                return path
        elif isinstance(ty, (Mapping, DynArray)):
            if slot == base.slot:
                return path
        elif isinstance(ty, FixedArray):
            if base.slot <= slot < base.slot + slot_count(ty):
                found = _decode_fixed(path, ty, base.slot, slot, offset, width)
                if found is not None:
                    return found
    return None


def _decode_fixed(
    path: VariablePath, ty: FixedArray, base_slot: int, slot: int, offset: int, width: int
) -> VariablePath | None:
    if isinstance(ty.elem, Elementary):
        per_slot = WORD_BYTES // ty.elem.width
        local = offset // ty.elem.width
        index = (slot - base_slot) * per_slot + local
        elem_offset = local * ty.elem.width
        if index >= ty.length:
            return None
        if elem_offset <= offset and offset + width <= elem_offset + ty.elem.width:
            return path.child(Index(index))
        return None
    stride = slot_count(ty.elem)
    index = (slot - base_slot) // stride
    if index >= ty.length:
        return None
    child = path.child(Index(index))
    inner_base = base_slot + index * stride
    if isinstance(ty.elem, FixedArray):
        return _decode_fixed(child, ty.elem, inner_base, slot, offset, width)
    # mapping or dynamic array element: only its base slot is static
    if slot == inner_base:
        return child
    return None
