"""
QSched - Seed derivation
"""

from typing import Union

import numpy as np


def derive_seed(*keys: Union[int, str]) -> int:
    """Stable 32-bit seed from a tuple of keys (strings are hashed by their bytes)"""
    entropy = []
    for key in keys:
        if isinstance(key, str):
            entropy.append(int.from_bytes(key.encode('utf-8'), 'little') % (2 ** 63))
        else:
            entropy.append(int(key) % (2 ** 63))
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])
