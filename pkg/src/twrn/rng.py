"""Counter-based random substreams.

Every unit of simulation work draws from its own Philox stream keyed by the
master seed and the unit's coordinates, so results do not depend on how the
units are scheduled across workers.
"""

import numpy as np


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the work unit identified by ``key``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
