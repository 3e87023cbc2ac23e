"""Keccak-256 digest checks against published constants and an independent oracle."""

import random

from kaya.keccak import keccak256

from keccak_reference import keccak256_reference

# Published Keccak-256 (pre-NIST padding) test vectors; the empty-input
# digest is the well-known constant used all over Ethereum.
EMPTY_DIGEST = bytes.fromhex("c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470")
ABC_DIGEST = bytes.fromhex("4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45")


def test_empty_input_golden():
    assert keccak256(b"") == EMPTY_DIGEST


def test_abc_golden():
    assert keccak256(b"abc") == ABC_DIGEST


def test_reference_oracle_matches_goldens():
    # Sanity-check the oracle itself before trusting the cross-check below.
    assert keccak256_reference(b"") == EMPTY_DIGEST
    assert keccak256_reference(b"abc") == ABC_DIGEST


def test_determinism():
    data = b"kaya determinism probe"
    assert keccak256(data) == keccak256(data)


def test_cross_check_against_reference():
    rng = random.Random(0x5EED)
    lengths = [0, 1, 7, 8, 31, 32, 33, 64, 135, 136, 137, 200, 271, 272, 273, 500]
    for length in lengths:
        data = rng.randbytes(length)
        assert keccak256(data) == keccak256_reference(data), f"mismatch at length {length}"
    for _ in range(100):
        data = rng.randbytes(rng.randrange(0, 300))
        assert keccak256(data) == keccak256_reference(data)
