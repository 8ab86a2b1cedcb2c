"""Resource caps for exhaustive routines.

``SPARSEZEROS_MAX_ENUM`` overrides every enumeration cap at once.
"""

import os

DEFAULTS = {
    "field": 2 ** 20,
    "oracle": 2 ** 22,
    "recenter": 4096,
    "subspace": 2 ** 16,
    "bound": 2 ** 22,
}

WINDOW = 32


def max_enum(kind: str) -> int:
    env = os.environ.get("SPARSEZEROS_MAX_ENUM")
    if env:
        return int(env)
    return DEFAULTS[kind]
