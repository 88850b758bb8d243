"""xorshift64* generator, pure-Python side.

The training kernels inline the identical update so that a Python loop can
replay a kernel run draw for draw. A test pins the two sequences together.
State is a nonzero 64-bit integer; output is state * M after three shifts.
"""

from __future__ import annotations

import numpy as np

__all__ = ["seed_state", "next_u64", "unit_float", "draw_index"]

_MASK = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


def seed_state(seed: int) -> int:
    """Scramble an arbitrary integer seed into a nonzero 64-bit state."""
    z = (seed + _SPLITMIX_GAMMA) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    z ^= z >> 31
    return z if z != 0 else _SPLITMIX_GAMMA


def next_u64(state: int) -> tuple[int, int]:
    """Advance the state; return (new_state, output_value)."""
    state ^= state >> 12
    state = (state ^ (state << 25)) & _MASK
    state ^= state >> 27
    return state, (state * _MULT) & _MASK


def unit_float(value: int) -> float:
    """Top 53 bits of a draw as a float in [0, 1)."""
    return (value >> 11) * (2.0 ** -53)


def draw_index(state: int, cum: np.ndarray) -> tuple[int, int]:
    """Draw an index from a cumulative distribution table."""
    state, value = next_u64(state)
    idx = int(np.searchsorted(cum, unit_float(value), side="right"))
    return state, min(idx, len(cum) - 1)
