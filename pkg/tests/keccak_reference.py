"""Reference Keccak-256 used only as a test oracle.

Deliberately shares nothing with the production module: the state is a
(x, y)-keyed dict instead of a flat lane list, rotation offsets come from
the (t+1)(t+2)/2 schedule, and round constants are generated by the
degree-8 LFSR instead of a hardcoded table.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


def _rc_bit(t: int) -> int:
    # LFSR over x^8 + x^6 + x^5 + x^4 + 1; taps at bits 0, 4, 5, 6.
    if t % 255 == 0:
        return 1
    r = 1
    for _ in range(t % 255):
        r <<= 1
        if r & 0x100:
            r ^= 0x171
    return r & 1


def _round_constants() -> list[int]:
    rcs = []
    for i in range(24):
        rc = 0
        for j in range(7):
            rc |= _rc_bit(j + 7 * i) << ((1 << j) - 1)
        rcs.append(rc)
    return rcs


def _rotation_offsets() -> dict[tuple[int, int], int]:
    offs = {(0, 0): 0}
    x, y = 1, 0
    for t in range(24):
        offs[(x, y)] = ((t + 1) * (t + 2) // 2) % 64
        x, y = y, (2 * x + 3 * y) % 5
    return offs


_RC = _round_constants()
_ROT = _rotation_offsets()


def _rotl(v: int, n: int) -> int:
    n %= 64
    return ((v << n) | (v >> (64 - n))) & _MASK


def _permute(state: dict[tuple[int, int], int]) -> None:
    for rnd in range(24):
        # theta
        c = {x: state[(x, 0)] ^ state[(x, 1)] ^ state[(x, 2)] ^ state[(x, 3)] ^ state[(x, 4)] for x in range(5)}
        d = {x: c[(x - 1) % 5] ^ _rotl(c[(x + 1) % 5], 1) for x in range(5)}
        for x in range(5):
            for y in range(5):
                state[(x, y)] ^= d[x]
        # rho + pi
        b = {}
        for x in range(5):
            for y in range(5):
                b[(y, (2 * x + 3 * y) % 5)] = _rotl(state[(x, y)], _ROT[(x, y)])
        # chi
        for x in range(5):
            for y in range(5):
                state[(x, y)] = b[(x, y)] ^ ((~b[((x + 1) % 5, y)] & _MASK) & b[((x + 2) % 5, y)])
        # iota
        state[(0, 0)] ^= _RC[rnd]


def keccak256_reference(data: bytes) -> bytes:
    rate = 136
    padded = bytearray(data)
    pad_len = rate - (len(padded) % rate)
    padded += b"\x01" + b"\x00" * (pad_len - 2) + b"\x80" if pad_len >= 2 else b"\x81"

    state = {(x, y): 0 for x in range(5) for y in range(5)}
    for block_start in range(0, len(padded), rate):
        block = padded[block_start : block_start + rate]
        for i in range(rate // 8):
            lane = int.from_bytes(block[8 * i : 8 * i + 8], "little")
            x, y = i % 5, i // 5
            state[(x, y)] ^= lane
        _permute(state)

    out = b""
    for i in range(4):
        x, y = i % 5, i // 5
        out += state[(x, y)].to_bytes(8, "little")
    return out
