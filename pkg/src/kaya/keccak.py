"""Keccak-256 (the pre-NIST padding variant used for storage address derivation).

Pure-Python Keccak-f[1600] sponge with rate 1088 / capacity 512 and the
original 0x01 multi-rate padding. Small inputs only (address derivation
hashes at most a few dozen bytes), so no attempt at vectorization.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1

_RATE = 136  # bytes

# Rotation offset for flat lane index x + 5*y.
_ROT = (
    0, 1, 62, 28, 27,
    36, 44, 6, 55, 20,
    3, 10, 43, 25, 39,
    41, 45, 15, 21, 8,
    18, 2, 61, 56, 14,
)

_RC = (
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A, 0x8000000080008000,
    0x000000000000808B, 0x0000000080000001, 0x8000000080008081, 0x8000000000008009,
    0x000000000000008A, 0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089, 0x8000000000008003,
    0x8000000000008002, 0x8000000000000080, 0x000000000000800A, 0x800000008000000A,
    0x8000000080008081, 0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
)


def _permute(lanes: list[int]) -> None:
    for rc in _RC:
        # theta
        c = [lanes[x] ^ lanes[x + 5] ^ lanes[x + 10] ^ lanes[x + 15] ^ lanes[x + 20] for x in range(5)]
        for x in range(5):
            cx1 = c[(x + 1) % 5]
            d = c[(x - 1) % 5] ^ (((cx1 << 1) | (cx1 >> 63)) & _MASK)
            for y in range(0, 25, 5):
                lanes[x + y] ^= d
        # rho + pi
        b = [0] * 25
        for x in range(5):
            for y in range(5):
                v = lanes[x + 5 * y]
                n = _ROT[x + 5 * y]
                b[y + 5 * ((2 * x + 3 * y) % 5)] = ((v << n) | (v >> (64 - n))) & _MASK if n else v
        # chi
        for y in range(0, 25, 5):
            for x in range(5):
                lanes[x + y] = b[x + y] ^ ((~b[(x + 1) % 5 + y] & _MASK) & b[(x + 2) % 5 + y])
        # iota
        lanes[0] ^= rc


def keccak256(data: bytes) -> bytes:
    """Return the 32-byte Keccak-256 digest of ``data``."""
    padded = bytearray(data)
    pad_len = _RATE - (len(padded) % _RATE)
    if pad_len == 1:
        padded.append(0x81)
    else:
        padded.append(0x01)
        padded.extend(b"\x00" * (pad_len - 2))
        padded.append(0x80)

    lanes = [0] * 25
    for start in range(0, len(padded), _RATE):
        for i in range(_RATE // 8):
            lanes[i] ^= int.from_bytes(padded[start + 8 * i : start + 8 * i + 8], "little")
        _permute(lanes)

    return b"".join(lanes[i].to_bytes(8, "little") for i in range(4))
