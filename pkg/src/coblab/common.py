import os
from typing import Any

from coblab.errors import ConfigurationError

DEFAULT_CUTOFF = 512


def get_cutoff() -> int:
    raw = os.environ.get("COBLAB_CUTOFF")
    if raw is None:
        return DEFAULT_CUTOFF
    try:
        cutoff = int(raw)
    except ValueError:
        raise ConfigurationError(f"COBLAB_CUTOFF must be an integer, got {raw!r}.")
    if cutoff < 1:
        raise ConfigurationError(f"COBLAB_CUTOFF must be positive, got {cutoff}.")
    return cutoff


def as_complex(value: Any) -> complex:
    """Parse a scalar in any of the accepted encodings.

    Accepts a real or complex number, an ``[re, im]`` pair or a
    ``{"re": ..., "im": ...}`` mapping.
    """
    if isinstance(value, (int, float, complex)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, dict):
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ValueError(f"cannot interpret {value!r} as a complex scalar")
