# bits.py - Packing boolean rows into 64-bit words and counting set bits

import numpy as np

WORD_BITS = 64

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


def word_count(bits: int) -> int:
    """Number of 64-bit words needed to hold the given number of bits"""
    return (bits + WORD_BITS - 1) // WORD_BITS


def bit_count64(arr: np.ndarray) -> np.ndarray:
    """Per-word population count (SWAR, works on any numpy version)"""
    arr = np.asarray(arr, dtype=np.uint64)
    arr = arr - ((arr >> np.uint64(1)) & _M1)
    arr = (arr & _M2) + ((arr >> np.uint64(2)) & _M2)
    arr = (arr + (arr >> np.uint64(4))) & _M4
    return (arr * _H01) >> np.uint64(56)


def popcount(arr: np.ndarray) -> int:
    """Total number of set bits across an array of words"""
    return int(bit_count64(arr).sum())


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack the last axis of a boolean array into little-endian uint64 words"""
    bits = np.asarray(bits, dtype=bool)
    n = bits.shape[-1]
    words = max(word_count(n), 1)
    padded = np.zeros(bits.shape[:-1] + (words * WORD_BITS,), dtype=bool)
    padded[..., :n] = bits
    packed = np.ascontiguousarray(np.packbits(padded, axis=-1, bitorder="little"))
    return packed.view("<u8").astype(np.uint64)


def unpack_bits(words: np.ndarray, n: int) -> np.ndarray:
    """Inverse of pack_bits, keeping the first n bits of the last axis"""
    raw = np.ascontiguousarray(np.asarray(words, dtype=np.uint64).astype("<u8"))
    unpacked = np.unpackbits(raw.view(np.uint8), axis=-1, bitorder="little")
    return unpacked[..., :n].astype(bool)


def set_bits(words: np.ndarray, rows: np.ndarray, positions: np.ndarray) -> None:
    """Toggle bit `positions[k]` of row `rows[k]` in a 2D word array, in place"""
    if len(positions) == 0:
        return
    positions = np.asarray(positions, dtype=np.int64)
    values = np.left_shift(np.uint64(1), (positions & 63).astype(np.uint64))
    np.bitwise_xor.at(words, (np.asarray(rows, dtype=np.int64), positions >> 6), values)
