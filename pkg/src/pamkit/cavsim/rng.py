"""Counter-based random streams keyed by (seed, acquisition, role)."""

import numpy as np

ROLES = {"spec": 0, "cloud": 1, "emission": 2, "noise": 3}

_U64 = (1 << 64) - 1


def stream(seed: int, acquisition: int = 0, role: str = "cloud") -> np.random.Generator:
    """Independent Philox generator for one role of one acquisition.

    Streams for different roles never share state, so e.g. changing the SNR
    of an acquisition leaves its bubble cloud untouched.
    """
    if role not in ROLES:
        raise KeyError(f"unknown stream role {role!r}; expected one of {sorted(ROLES)}")
    entropy = [int(seed) & _U64, int(acquisition), ROLES[role]]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
